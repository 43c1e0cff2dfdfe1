#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ree/matkit.hpp"

namespace ree {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

// Bipartite density matrix: Hermitian within 1e-10, unit trace within 1e-10,
// min eigenvalue >= -1e-10. Violations throw NotAStateError naming the
// failed invariant.
class DensityMatrix {
 public:
  DensityMatrix(std::size_t dim_a, std::size_t dim_b, ComplexMatrix matrix);

  std::size_t dim_a() const { return dim_a_; }
  std::size_t dim_b() const { return dim_b_; }
  std::size_t total_dim() const { return dim_a_ * dim_b_; }
  const ComplexMatrix& matrix() const { return matrix_; }

  std::size_t party_dim(Party x) const { return x == Party::A ? dim_a_ : dim_b_; }

  // Reduction with respect to party X, i.e. the other party traced out.
  ComplexMatrix reduction(Party x) const;

 private:
  std::size_t dim_a_;
  std::size_t dim_b_;
  ComplexMatrix matrix_;
};

// Bloch vectors and correlation matrix of a two-qubit state:
// rho = (1/4)(I(x)I + rA.sigma(x)I + I(x)rB.sigma + sum_nm T_nm sigma_n(x)sigma_m).
struct HilbertSchmidtForm {
  Vec3 r_a{};
  Vec3 r_b{};
  Mat3 t{};
};

HilbertSchmidtForm to_hilbert_schmidt(const DensityMatrix& rho);
DensityMatrix from_hilbert_schmidt(const HilbertSchmidtForm& h);

// Local frame in which the correlation matrix is diagonal:
// T' = O_A T O_B^T with O_A, O_B special orthogonal, r_A' = O_A r_A,
// r_B' = O_B r_B. Convention: |T'_11| >= |T'_22| >= |T'_33| and the first two
// entries negative (so det T < 0 gives an all-negative diagonal).
struct CanonicalForm {
  DensityMatrix state;
  Mat3 o_a;
  Mat3 o_b;
};

CanonicalForm canonical_form(const DensityMatrix& rho);

// d^2-1 Hermitian traceless generators with Tr(J_a J_b) = 2 delta_ab.
// Ordered: d(d-1)/2 symmetric, d(d-1)/2 antisymmetric, d-1 diagonal;
// for d = 2 these are the Pauli matrices (x, y, z).
struct GeneratorBasis {
  std::size_t d = 0;
  std::vector<ComplexMatrix> generators;
};

GeneratorBasis generator_basis(std::size_t d);

// v_a = Tr(X J_a); for trace-1 X, X = I/d + (1/2) sum_a v_a J_a.
std::vector<double> bloch_vector(const ComplexMatrix& x, const GeneratorBasis& basis);

// Pauli matrices; index 0 is the identity.
const ComplexMatrix& pauli(int i);
// n[0]*sigma_x + n[1]*sigma_y + n[2]*sigma_z.
ComplexMatrix pauli_dot(const Vec3& n);

// --- State families ---------------------------------------------------------

// sqrt(p)|00> + sqrt(1-p)|11>.
DensityMatrix pure_state(double p);
// p|00><00| + (1-p)|11><11|.
DensityMatrix pure_closest(double p);
// Weights on (Phi+, Phi-, Psi+, Psi-).
DensityMatrix bell_diagonal(double l1, double l2, double l3, double l4);
// F on the singlet, (1-F)/3 on the rest.
DensityMatrix werner(double f);
// sum_i a_i |ii> in d(x)d, d = amplitudes.size().
DensityMatrix maximally_correlated(const std::vector<Complex>& amplitudes);
// F on the maximally entangled state, (1-F)/(d^2-1) on its complement.
DensityMatrix isotropic(std::size_t d, double f);
// rho_a (x) rho_b; each factor must itself be a valid state.
DensityMatrix product_state(const ComplexMatrix& rho_a, const ComplexMatrix& rho_b);
// Single-qubit state with the given Bloch vector (|r| <= 1).
ComplexMatrix qubit_state(const Vec3& r);

// Hilbert-Schmidt measure: normalized Gram matrix of a standard-normal
// complex square matrix.
DensityMatrix random_state(std::size_t dim_a, std::size_t dim_b, std::mt19937_64& rng);

// Named family dispatch used by the CLI and sweeps.
struct FamilySpec {
  std::string family;
  double p = 0.5;
  double f = 0.5;
  std::array<double, 4> lambdas{1.0, 0.0, 0.0, 0.0};
  std::size_t d = 2;
  std::vector<Complex> amplitudes;
  Vec3 bloch_a{};
  Vec3 bloch_b{};
};

DensityMatrix make_family(const FamilySpec& spec);

// --- Small real-3x3 helpers shared with boundopt ----------------------------

Mat3 mat3_mul(const Mat3& a, const Mat3& b);
Mat3 mat3_transpose(const Mat3& a);
Vec3 mat3_apply(const Mat3& a, const Vec3& v);
double mat3_det(const Mat3& a);

}  // namespace ree
