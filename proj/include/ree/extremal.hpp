#pragma once

#include "ree/measures.hpp"

namespace ree {

// Scalar kernel of the g-matrix: ((a+b)/2) * (log a - log b)/(a - b) - 1,
// zero on the degenerate branch |a-b| <= 1e-12 * max(a,b). Symmetric in its
// arguments and nonnegative (arithmetic mean >= logarithmic mean).
double g_kernel(double lambda_i, double lambda_j);

// g in the eigenbasis of sigma. Entries touching the null space of sigma are
// stored as zero with the support mask recording the masked indices; this is
// exact because the support precondition forces the matching matrix elements
// of rho to vanish.
struct GMatrix {
  std::size_t n = 0;
  std::vector<double> entries;  // n x n, row-major, real symmetric, zero diagonal
  EigDecomposition basis;       // eigendecomposition of sigma
  std::vector<bool> support;    // eigenvalue >= kSupportCutoff

  double entry(std::size_t i, std::size_t j) const { return entries[i * n + j]; }
};

GMatrix compute_g(const DensityMatrix& rho, const DensityMatrix& sigma);

// Residuals of the stationarity conditions on one party's reduction:
//   filter:  sigma_X - rho_X - (rho o g)_X          (local filtering)
//   unitary: ([rho, log sigma])_X                   (local unitary)
// Bloch vectors (s, r, g_vec, h) are reported when the party dimension is at
// most 3; the matrix-form residuals are dimension-free.
struct ConditionReport {
  Party party = Party::A;
  std::vector<double> s;      // Bloch vector of sigma_X
  std::vector<double> r;      // Bloch vector of rho_X
  std::vector<double> g_vec;  // Bloch vector of (rho o g)_X
  std::vector<double> h;      // ([rho, log sigma])_X = (i/2) h . J
  double filter_residual = 0.0;
  double unitary_residual = 0.0;
  double tolerance = 1e-6;
  bool filter_satisfied = false;
  bool unitary_satisfied = false;
};

ConditionReport filter_residual(const DensityMatrix& rho, const DensityMatrix& sigma, Party party,
                                double tolerance = 1e-6);
ConditionReport unitary_residual(const DensityMatrix& rho, const DensityMatrix& sigma, Party party,
                                 double tolerance = 1e-6);

// Residuals of the constraints s_A = r_A, s_B = r_B and
// ([rho, sigma])_A = ([rho, sigma])_B = 0, plus (for canonical rho, T
// diagonal within 1e-8) the six scalar equations
//   t_ii tau_ij - t_jj tau_ji = 0,  tau_ij t_jj - tau_ji t_ii = 0
// over the index pairs (1,2), (1,3), (2,3).
struct WeakConstraintReport {
  double reduction_diff_a = 0.0;  // |s_A - r_A|
  double reduction_diff_b = 0.0;  // |s_B - r_B|
  double commutator_reduction_a = 0.0;
  double commutator_reduction_b = 0.0;
  bool has_tau_t = false;
  std::array<double, 6> tau_t_residuals{};
};

// The full stationarity system in d(x)d counts 4(d^2-1) scalar equations;
// these weak constraints are the part used by the bound prescription.
constexpr int full_condition_equation_count(int d) { return 4 * (d * d - 1); }

WeakConstraintReport weak_constraint_residual(const DensityMatrix& rho, const DensityMatrix& sigma,
                                              bool with_tau_t = true);

enum class Category {
  CategoryI,       // [rho, sigma] = 0
  CategoryII,      // cross reductions |j><i| vanish within supp rho
  ConstraintOnly,  // per-pair constraint holds, neither category does
  None,
};

Category category_classify(const DensityMatrix& rho, const DensityMatrix& sigma);

const char* category_name(Category c);

// Relative entropy along the local filtering
// sigma'(t) = (e^{t n.sigma/2} on party X) sigma (same) / trace, with the
// central-difference derivative at t = 0 (step 1e-4) and the first-order
// prediction n.(s - r - g_vec).
struct PerturbationScan {
  Party party = Party::B;
  Vec3 direction{};
  std::vector<double> t_values;
  std::vector<double> entropies_nats;
  double derivative = 0.0;
  double analytic_derivative = 0.0;
};

PerturbationScan filter_perturbation_scan(const DensityMatrix& rho, const DensityMatrix& sigma,
                                          Party party, const Vec3& direction,
                                          const std::vector<double>& t_grid);

// Stationarity residual of the Bures distance under the same filtering:
//   (n.s_X) Tr(sqrt(sigma) rho sqrt(sigma))
//   - sum_ij ((l_i+l_j)/2) N_ij {rho, sqrt(sigma)}_ji / (sqrt(l_i)+sqrt(l_j))
// using (1/pi) int sqrt(x)/((a+x)(b+x)) dx = 1/(sqrt(a)+sqrt(b)).
double bures_residual(const DensityMatrix& rho, const DensityMatrix& sigma, Party party,
                      const Vec3& direction);

}  // namespace ree
