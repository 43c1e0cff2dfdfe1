#include "ree/states.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ree {

namespace {

constexpr double kHermTol = 1e-10;
constexpr double kTraceTol = 1e-10;
constexpr double kPsdTol = -1e-10;

const Complex kI(0.0, 1.0);

ComplexMatrix make_pauli(int i) {
  ComplexMatrix m(2, 2);
  switch (i) {
    case 0:
      m(0, 0) = 1.0;
      m(1, 1) = 1.0;
      break;
    case 1:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case 2:
      m(0, 1) = -kI;
      m(1, 0) = kI;
      break;
    case 3:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
    default:
      throw InputError("pauli: index must be 0..3");
  }
  return m;
}

}  // namespace

const ComplexMatrix& pauli(int i) {
  static const ComplexMatrix p0 = make_pauli(0);
  static const ComplexMatrix p1 = make_pauli(1);
  static const ComplexMatrix p2 = make_pauli(2);
  static const ComplexMatrix p3 = make_pauli(3);
  switch (i) {
    case 0:
      return p0;
    case 1:
      return p1;
    case 2:
      return p2;
    default:
      if (i != 3) throw InputError("pauli: index must be 0..3");
      return p3;
  }
}

ComplexMatrix pauli_dot(const Vec3& n) {
  ComplexMatrix m(2, 2);
  m(0, 0) = n[2];
  m(1, 1) = -n[2];
  m(0, 1) = Complex(n[0], -n[1]);
  m(1, 0) = Complex(n[0], n[1]);
  return m;
}

DensityMatrix::DensityMatrix(std::size_t dim_a, std::size_t dim_b, ComplexMatrix matrix)
    : dim_a_(dim_a), dim_b_(dim_b), matrix_(std::move(matrix)) {
  if (dim_a_ == 0 || dim_b_ == 0 || matrix_.rows() != matrix_.cols() ||
      matrix_.rows() != dim_a_ * dim_b_) {
    std::ostringstream msg;
    msg << "DensityMatrix: matrix is " << matrix_.rows() << "x" << matrix_.cols()
        << " but dims are (" << dim_a_ << "," << dim_b_ << ")";
    throw DimensionError(msg.str());
  }

  double herm_dev = 0.0;
  for (std::size_t i = 0; i < matrix_.rows(); ++i)
    for (std::size_t j = i; j < matrix_.cols(); ++j)
      herm_dev = std::max(herm_dev, std::abs(matrix_(i, j) - std::conj(matrix_(j, i))));
  if (herm_dev > kHermTol) {
    std::ostringstream msg;
    msg << "not a state: Hermiticity violated by " << herm_dev;
    throw NotAStateError(msg.str(), "hermitian", herm_dev);
  }

  const double trace_dev = std::abs(matrix_.trace() - Complex(1.0));
  if (trace_dev > kTraceTol) {
    std::ostringstream msg;
    msg << "not a state: trace deviates from 1 by " << trace_dev;
    throw NotAStateError(msg.str(), "trace", trace_dev);
  }

  const EigDecomposition eig = hermitian_eig(matrix_);
  const double min_eig = eig.values.back();
  if (min_eig < kPsdTol) {
    std::ostringstream msg;
    msg << "not a state: min eigenvalue " << min_eig;
    throw NotAStateError(msg.str(), "positive", min_eig);
  }
}

ComplexMatrix DensityMatrix::reduction(Party x) const {
  return partial_trace(matrix_, dim_a_, dim_b_, x == Party::A ? Party::B : Party::A);
}

HilbertSchmidtForm to_hilbert_schmidt(const DensityMatrix& rho) {
  if (rho.dim_a() != 2 || rho.dim_b() != 2)
    throw DimensionError("to_hilbert_schmidt: requires a 2x2-partite state");
  HilbertSchmidtForm h;
  const ComplexMatrix& m = rho.matrix();
  for (int n = 0; n < 3; ++n) {
    h.r_a[n] = (kron(pauli(n + 1), pauli(0)) * m).trace().real();
    h.r_b[n] = (kron(pauli(0), pauli(n + 1)) * m).trace().real();
    for (int k = 0; k < 3; ++k) h.t[n][k] = (kron(pauli(n + 1), pauli(k + 1)) * m).trace().real();
  }
  return h;
}

DensityMatrix from_hilbert_schmidt(const HilbertSchmidtForm& h) {
  ComplexMatrix m = ComplexMatrix::identity(4);
  for (int n = 0; n < 3; ++n) {
    m += h.r_a[n] * kron(pauli(n + 1), pauli(0));
    m += h.r_b[n] * kron(pauli(0), pauli(n + 1));
    for (int k = 0; k < 3; ++k) {
      if (h.t[n][k] != 0.0) m += h.t[n][k] * kron(pauli(n + 1), pauli(k + 1));
    }
  }
  m *= Complex(0.25);
  return DensityMatrix(2, 2, std::move(m));
}

Mat3 mat3_mul(const Mat3& a, const Mat3& b) {
  Mat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) out[i][j] += a[i][k] * b[k][j];
  return out;
}

Mat3 mat3_transpose(const Mat3& a) {
  Mat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i][j] = a[j][i];
  return out;
}

Vec3 mat3_apply(const Mat3& a, const Vec3& v) {
  Vec3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i] += a[i][j] * v[j];
  return out;
}

double mat3_det(const Mat3& a) {
  return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
         a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

namespace {

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 normalized(const Vec3& v) {
  const double n = std::sqrt(dot(v, v));
  return {v[0] / n, v[1] / n, v[2] / n};
}

// T = U diag(s1, s2, d3) V^T with U, V in SO(3), s1 >= s2 >= |d3|.
// The sign of the smallest entry carries det T.
struct SignedSvd3 {
  Mat3 u;
  Mat3 v;
  Vec3 diag;
};

SignedSvd3 signed_svd3(const Mat3& t) {
  // Eigenbasis of T^T T via the complex Jacobi solver (real symmetric input
  // keeps everything real).
  Mat3 m{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) m[i][j] += t[k][i] * t[k][j];
  ComplexMatrix mc(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) mc(i, j) = m[i][j];
  const EigDecomposition eig = hermitian_eig(mc);

  std::array<Vec3, 3> v;
  Vec3 s{};
  for (int i = 0; i < 3; ++i) {
    s[i] = std::sqrt(std::max(eig.values[i], 0.0));
    for (int k = 0; k < 3; ++k) v[i][k] = eig.vectors(k, i).real();
  }

  SignedSvd3 out{};
  if (s[0] <= 1e-13) {
    // T vanishes: identity frames, zero diagonal.
    for (int i = 0; i < 3; ++i) out.u[i][i] = out.v[i][i] = 1.0;
    return out;
  }

  auto apply_t = [&](const Vec3& x) {
    Vec3 y{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) y[i] += t[i][j] * x[j];
    return y;
  };

  std::array<Vec3, 3> u;
  u[0] = normalized(apply_t(v[0]));
  Vec3 u1raw = apply_t(v[1]);
  const double proj = dot(u[0], u1raw);
  for (int k = 0; k < 3; ++k) u1raw[k] -= proj * u[0][k];
  if (s[1] > 1e-13 && std::sqrt(dot(u1raw, u1raw)) > 1e-13 * s[0]) {
    u[1] = normalized(u1raw);
  } else {
    // Rank-1 T: complete with any unit vector orthogonal to u[0].
    int kmin = 0;
    for (int k = 1; k < 3; ++k)
      if (std::abs(u[0][k]) < std::abs(u[0][kmin])) kmin = k;
    Vec3 e{};
    e[kmin] = 1.0;
    u[1] = normalized(cross(u[0], e));
  }
  u[2] = cross(u[0], u[1]);  // det U = +1 by construction

  double d3 = dot(u[2], apply_t(v[2]));
  const double detv = dot(v[0], cross(v[1], v[2]));
  if (detv < 0.0) {
    for (int k = 0; k < 3; ++k) v[2][k] = -v[2][k];
    d3 = -d3;
  }

  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      out.u[k][i] = u[i][k];
      out.v[k][i] = v[i][k];
    }
  out.diag = {s[0], s[1], d3};
  return out;
}

}  // namespace

CanonicalForm canonical_form(const DensityMatrix& rho) {
  const HilbertSchmidtForm h = to_hilbert_schmidt(rho);
  const SignedSvd3 svd = signed_svd3(h.t);

  // O_A = F U^T with F = diag(-1,-1,1), O_B = V^T. F is a rotation, so both
  // stay special orthogonal; it makes entries 1 and 2 of the diagonal
  // negative (all three when det T < 0).
  Mat3 o_a = mat3_transpose(svd.u);
  for (int j = 0; j < 3; ++j) {
    o_a[0][j] = -o_a[0][j];
    o_a[1][j] = -o_a[1][j];
  }
  const Mat3 o_b = mat3_transpose(svd.v);

  HilbertSchmidtForm hc;
  hc.r_a = mat3_apply(o_a, h.r_a);
  hc.r_b = mat3_apply(o_b, h.r_b);
  hc.t = mat3_mul(o_a, mat3_mul(h.t, mat3_transpose(o_b)));

  return CanonicalForm{from_hilbert_schmidt(hc), o_a, o_b};
}

GeneratorBasis generator_basis(std::size_t d) {
  if (d < 2) throw InputError("generator_basis: d must be >= 2");
  GeneratorBasis basis;
  basis.d = d;
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = j + 1; k < d; ++k) {
      ComplexMatrix sym(d, d);
      sym(j, k) = 1.0;
      sym(k, j) = 1.0;
      basis.generators.push_back(std::move(sym));
    }
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = j + 1; k < d; ++k) {
      ComplexMatrix anti(d, d);
      anti(j, k) = -kI;
      anti(k, j) = kI;
      basis.generators.push_back(std::move(anti));
    }
  for (std::size_t l = 1; l < d; ++l) {
    ComplexMatrix diag(d, d);
    const double norm = std::sqrt(2.0 / static_cast<double>(l * (l + 1)));
    for (std::size_t m = 0; m < l; ++m) diag(m, m) = norm;
    diag(l, l) = -norm * static_cast<double>(l);
    basis.generators.push_back(std::move(diag));
  }
  return basis;
}

std::vector<double> bloch_vector(const ComplexMatrix& x, const GeneratorBasis& basis) {
  if (x.rows() != basis.d || x.cols() != basis.d)
    throw DimensionError("bloch_vector: matrix does not match basis dimension");
  std::vector<double> v;
  v.reserve(basis.generators.size());
  for (const ComplexMatrix& j : basis.generators) v.push_back((x * j).trace().real());
  return v;
}

namespace {

void require_unit_interval(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) {
    std::ostringstream msg;
    msg << name << " must lie in [0,1], got " << x;
    throw InputError(msg.str());
  }
}

DensityMatrix pure_from_vector(std::size_t dim_a, std::size_t dim_b,
                               const std::vector<Complex>& psi) {
  ComplexMatrix m(psi.size(), psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i)
    for (std::size_t j = 0; j < psi.size(); ++j) m(i, j) = psi[i] * std::conj(psi[j]);
  return DensityMatrix(dim_a, dim_b, std::move(m));
}

}  // namespace

DensityMatrix pure_state(double p) {
  require_unit_interval(p, "pure: p");
  return pure_from_vector(2, 2, {std::sqrt(p), 0.0, 0.0, std::sqrt(1.0 - p)});
}

DensityMatrix pure_closest(double p) {
  require_unit_interval(p, "pure_closest: p");
  ComplexMatrix m(4, 4);
  m(0, 0) = p;
  m(3, 3) = 1.0 - p;
  return DensityMatrix(2, 2, std::move(m));
}

DensityMatrix bell_diagonal(double l1, double l2, double l3, double l4) {
  const std::array<double, 4> l{l1, l2, l3, l4};
  double sum = 0.0;
  for (double w : l) {
    if (w < -1e-12) throw InputError("bell_diagonal: weights must be nonnegative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InputError("bell_diagonal: weights must sum to 1");

  const double inv = 1.0 / std::sqrt(2.0);
  const std::array<std::vector<Complex>, 4> bell{{{inv, 0.0, 0.0, inv},
                                                  {inv, 0.0, 0.0, -inv},
                                                  {0.0, inv, inv, 0.0},
                                                  {0.0, inv, -inv, 0.0}}};
  ComplexMatrix m(4, 4);
  for (int k = 0; k < 4; ++k)
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) m(i, j) += l[k] * bell[k][i] * std::conj(bell[k][j]);
  return DensityMatrix(2, 2, std::move(m));
}

DensityMatrix werner(double f) {
  require_unit_interval(f, "werner: F");
  const double rest = (1.0 - f) / 3.0;
  return bell_diagonal(rest, rest, rest, f);
}

DensityMatrix maximally_correlated(const std::vector<Complex>& amplitudes) {
  const std::size_t d = amplitudes.size();
  if (d < 2) throw InputError("maximally_correlated: need at least two amplitudes");
  double norm2 = 0.0;
  for (const Complex& a : amplitudes) norm2 += std::norm(a);
  if (std::abs(norm2 - 1.0) > 1e-6)
    throw InputError("maximally_correlated: amplitudes must be normalized");
  const double scale = 1.0 / std::sqrt(norm2);
  std::vector<Complex> psi(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) psi[i * d + i] = amplitudes[i] * scale;
  return pure_from_vector(d, d, psi);
}

DensityMatrix isotropic(std::size_t d, double f) {
  if (d < 2) throw InputError("isotropic: d must be >= 2");
  require_unit_interval(f, "isotropic: F");
  const std::size_t n = d * d;
  const double offweight = (1.0 - f) / static_cast<double>(n - 1);
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = offweight;
  const double phi = 1.0 / static_cast<double>(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      m(i * d + i, j * d + j) += (f - offweight) * phi;
  return DensityMatrix(d, d, std::move(m));
}

namespace {

void require_single_party_state(const ComplexMatrix& m, const char* name) {
  if (m.rows() != m.cols()) throw DimensionError("product_state: factor not square");
  if (!m.is_hermitian(kHermTol)) {
    std::ostringstream msg;
    msg << "not a state: " << name << " factor not Hermitian";
    throw NotAStateError(msg.str(), "hermitian", 0.0);
  }
  const double trace_dev = std::abs(m.trace() - Complex(1.0));
  if (trace_dev > kTraceTol) {
    std::ostringstream msg;
    msg << "not a state: " << name << " factor trace deviates by " << trace_dev;
    throw NotAStateError(msg.str(), "trace", trace_dev);
  }
  const double min_eig = hermitian_eig(m).values.back();
  if (min_eig < kPsdTol) {
    std::ostringstream msg;
    msg << "not a state: " << name << " factor min eigenvalue " << min_eig;
    throw NotAStateError(msg.str(), "positive", min_eig);
  }
}

}  // namespace

DensityMatrix product_state(const ComplexMatrix& rho_a, const ComplexMatrix& rho_b) {
  require_single_party_state(rho_a, "A");
  require_single_party_state(rho_b, "B");
  return DensityMatrix(rho_a.rows(), rho_b.rows(), kron(rho_a, rho_b));
}

ComplexMatrix qubit_state(const Vec3& r) {
  const double norm = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
  if (norm > 1.0 + 1e-10) throw InputError("qubit_state: Bloch vector longer than 1");
  ComplexMatrix m = pauli_dot(r);
  m += ComplexMatrix::identity(2);
  m *= Complex(0.5);
  return m;
}

DensityMatrix random_state(std::size_t dim_a, std::size_t dim_b, std::mt19937_64& rng) {
  const std::size_t n = dim_a * dim_b;
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      g(i, j) = Complex(re, im);
    }
  ComplexMatrix m = g * g.adjoint();
  m *= Complex(1.0) / m.trace();
  return DensityMatrix(dim_a, dim_b, std::move(m));
}

DensityMatrix make_family(const FamilySpec& spec) {
  if (spec.family == "pure") return pure_state(spec.p);
  if (spec.family == "pure_closest") return pure_closest(spec.p);
  if (spec.family == "bell_diagonal")
    return bell_diagonal(spec.lambdas[0], spec.lambdas[1], spec.lambdas[2], spec.lambdas[3]);
  if (spec.family == "werner") return werner(spec.f);
  if (spec.family == "maximally_correlated") return maximally_correlated(spec.amplitudes);
  if (spec.family == "isotropic") return isotropic(spec.d, spec.f);
  if (spec.family == "product")
    return product_state(qubit_state(spec.bloch_a), qubit_state(spec.bloch_b));
  throw InputError("unknown family: " + spec.family);
}

}  // namespace ree
