#include "ree/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ree {

namespace {

constexpr double kDegeneracyRel = 1e-12;

void require_same_dims(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim_a() != sigma.dim_a() || rho.dim_b() != sigma.dim_b())
    throw DimensionError("extremal: rho and sigma dimensions disagree");
}

// supp(rho) must be contained in supp(sigma); otherwise the relative entropy
// is infinite and none of the stationarity quantities exist.
void require_support(const DensityMatrix& rho, const EigDecomposition& sigma_eig) {
  const std::size_t n = rho.total_dim();
  const EigDecomposition rho_eig = hermitian_eig(rho.matrix());
  for (std::size_t k = 0; k < n; ++k) {
    if (rho_eig.values[k] <= kRhoEigCut) continue;
    double overlap = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (sigma_eig.values[i] < kSupportCutoff) continue;
      Complex amp = 0.0;
      for (std::size_t r = 0; r < n; ++r)
        amp += std::conj(sigma_eig.vectors(r, i)) * rho_eig.vectors(r, k);
      overlap += std::norm(amp);
    }
    if (overlap < 1.0 - kSupportOverlapTol) {
      std::ostringstream msg;
      msg << "support of rho not contained in support of sigma (overlap deficit "
          << 1.0 - overlap << ")";
      throw SupportError(msg.str());
    }
  }
}

// Conjugate m into the eigenbasis of sigma: V^dagger m V.
ComplexMatrix to_eigenbasis(const ComplexMatrix& m, const EigDecomposition& eig) {
  return eig.vectors.adjoint() * m * eig.vectors;
}

ComplexMatrix from_eigenbasis(const ComplexMatrix& m, const EigDecomposition& eig) {
  return eig.vectors * m * eig.vectors.adjoint();
}

// Both condition residuals share the same ingredients; compute them once.
ConditionReport analyze_party(const DensityMatrix& rho, const DensityMatrix& sigma, Party party,
                              double tolerance) {
  require_same_dims(rho, sigma);
  const GMatrix g = compute_g(rho, sigma);  // also enforces the support precondition
  const std::size_t n = rho.total_dim();
  const std::size_t dx = rho.party_dim(party);

  const ComplexMatrix rho_tilde = to_eigenbasis(rho.matrix(), g.basis);

  // (rho o g) back in the computational basis.
  ComplexMatrix hadamard(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) hadamard(i, j) = rho_tilde(i, j) * g.entry(i, j);
  const ComplexMatrix rho_g = from_eigenbasis(hadamard, g.basis);

  // [rho, log sigma] with the logarithm on the support of sigma.
  ComplexMatrix commutator_tilde(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double li = g.support[i] ? std::log(g.basis.values[i]) : 0.0;
      const double lj = g.support[j] ? std::log(g.basis.values[j]) : 0.0;
      commutator_tilde(i, j) = rho_tilde(i, j) * (lj - li);
    }
  const ComplexMatrix commutator = from_eigenbasis(commutator_tilde, g.basis);

  const Party traced = (party == Party::A) ? Party::B : Party::A;
  const ComplexMatrix sigma_x = partial_trace(sigma.matrix(), sigma.dim_a(), sigma.dim_b(), traced);
  const ComplexMatrix rho_x = partial_trace(rho.matrix(), rho.dim_a(), rho.dim_b(), traced);
  const ComplexMatrix rho_g_x = partial_trace(rho_g, rho.dim_a(), rho.dim_b(), traced);
  const ComplexMatrix comm_x = partial_trace(commutator, rho.dim_a(), rho.dim_b(), traced);

  ConditionReport report;
  report.party = party;
  report.tolerance = tolerance;
  report.filter_residual = (sigma_x - rho_x - rho_g_x).frobenius_norm();
  report.unitary_residual = comm_x.frobenius_norm();
  report.filter_satisfied = report.filter_residual <= tolerance;
  report.unitary_satisfied = report.unitary_residual <= tolerance;

  if (dx <= 3) {
    const GeneratorBasis basis = generator_basis(dx);
    report.s = bloch_vector(sigma_x, basis);
    report.r = bloch_vector(rho_x, basis);
    report.g_vec = bloch_vector(rho_g_x, basis);
    report.h.reserve(basis.generators.size());
    for (const ComplexMatrix& j : basis.generators)
      report.h.push_back((Complex(0.0, -1.0) * (comm_x * j).trace()).real());
  }
  return report;
}

}  // namespace

double g_kernel(double lambda_i, double lambda_j) {
  const double hi = std::max(lambda_i, lambda_j);
  const double lo = std::min(lambda_i, lambda_j);
  const double diff = hi - lo;
  if (diff <= kDegeneracyRel * hi) return 0.0;
  // log(hi) - log(lo) evaluated as log1p(diff/lo) to stay accurate near the
  // degenerate branch.
  const double ratio = std::log1p(diff / lo) / diff;
  return 0.5 * (hi + lo) * ratio - 1.0;
}

GMatrix compute_g(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_dims(rho, sigma);
  const EigDecomposition sigma_eig = hermitian_eig(sigma.matrix());
  require_support(rho, sigma_eig);

  const std::size_t n = sigma.total_dim();
  GMatrix g;
  g.n = n;
  g.entries.assign(n * n, 0.0);
  g.basis = sigma_eig;
  g.support.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.support[i] = sigma_eig.values[i] >= kSupportCutoff;

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!g.support[i] || !g.support[j]) continue;
      const double value = g_kernel(sigma_eig.values[i], sigma_eig.values[j]);
      g.entries[i * n + j] = value;
      g.entries[j * n + i] = value;
    }
  return g;
}

ConditionReport filter_residual(const DensityMatrix& rho, const DensityMatrix& sigma, Party party,
                                double tolerance) {
  return analyze_party(rho, sigma, party, tolerance);
}

ConditionReport unitary_residual(const DensityMatrix& rho, const DensityMatrix& sigma, Party party,
                                 double tolerance) {
  return analyze_party(rho, sigma, party, tolerance);
}

WeakConstraintReport weak_constraint_residual(const DensityMatrix& rho, const DensityMatrix& sigma,
                                              bool with_tau_t) {
  require_same_dims(rho, sigma);
  if (rho.dim_a() != 2 || rho.dim_b() != 2)
    throw DimensionError("weak_constraint_residual: requires 2x2-partite states");

  WeakConstraintReport report;
  const HilbertSchmidtForm hr = to_hilbert_schmidt(rho);
  const HilbertSchmidtForm hs = to_hilbert_schmidt(sigma);

  Vec3 da{}, db{};
  for (int k = 0; k < 3; ++k) {
    da[k] = hs.r_a[k] - hr.r_a[k];
    db[k] = hs.r_b[k] - hr.r_b[k];
  }
  report.reduction_diff_a = std::sqrt(da[0] * da[0] + da[1] * da[1] + da[2] * da[2]);
  report.reduction_diff_b = std::sqrt(db[0] * db[0] + db[1] * db[1] + db[2] * db[2]);

  const ComplexMatrix comm = rho.matrix() * sigma.matrix() - sigma.matrix() * rho.matrix();
  report.commutator_reduction_a = partial_trace(comm, 2, 2, Party::B).frobenius_norm();
  report.commutator_reduction_b = partial_trace(comm, 2, 2, Party::A).frobenius_norm();

  if (with_tau_t) {
    double offdiag = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) offdiag = std::max(offdiag, std::abs(hr.t[i][j]));
    if (offdiag > 1e-8) {
      std::ostringstream msg;
      msg << "weak_constraint_residual: rho is not canonical (T off-diagonal " << offdiag << ")";
      throw InputError(msg.str());
    }
    report.has_tau_t = true;
    int slot = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        report.tau_t_residuals[slot++] = hr.t[i][i] * hs.t[i][j] - hr.t[j][j] * hs.t[j][i];
        report.tau_t_residuals[slot++] = hs.t[i][j] * hr.t[j][j] - hs.t[j][i] * hr.t[i][i];
      }
  }
  return report;
}

Category category_classify(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_dims(rho, sigma);
  const EigDecomposition sigma_eig = hermitian_eig(sigma.matrix());
  require_support(rho, sigma_eig);

  constexpr double kTol = 1e-9;
  const std::size_t n = rho.total_dim();

  const ComplexMatrix comm = rho.matrix() * sigma.matrix() - sigma.matrix() * rho.matrix();
  if (comm.frobenius_norm() <= kTol) return Category::CategoryI;

  // Projector onto supp(rho), for deciding which eigenvector pairs matter.
  const EigDecomposition rho_eig = hermitian_eig(rho.matrix());
  std::vector<double> rho_overlap(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (rho_eig.values[k] <= kRhoEigCut) continue;
      Complex amp = 0.0;
      for (std::size_t r = 0; r < n; ++r)
        amp += std::conj(rho_eig.vectors(r, k)) * sigma_eig.vectors(r, i);
      rho_overlap[i] += std::norm(amp);
    }
  }

  const ComplexMatrix rho_tilde =
      sigma_eig.vectors.adjoint() * rho.matrix() * sigma_eig.vectors;

  auto ketbra_reduction_norms = [&](std::size_t i, std::size_t j) {
    ComplexMatrix kb(n, n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        kb(r, c) = sigma_eig.vectors(r, j) * std::conj(sigma_eig.vectors(c, i));
    const double na = partial_trace(kb, rho.dim_a(), rho.dim_b(), Party::B).frobenius_norm();
    const double nb = partial_trace(kb, rho.dim_a(), rho.dim_b(), Party::A).frobenius_norm();
    return std::pair<double, double>{na, nb};
  };

  bool category_ii = true;
  for (std::size_t i = 0; i < n && category_ii; ++i) {
    if (rho_overlap[i] <= kTol) continue;
    for (std::size_t j = i + 1; j < n && category_ii; ++j) {
      if (rho_overlap[j] <= kTol) continue;
      const auto [na, nb] = ketbra_reduction_norms(i, j);
      if (na > kTol || nb > kTol) category_ii = false;
    }
  }
  if (category_ii) return Category::CategoryII;

  bool constraint = true;
  for (std::size_t i = 0; i < n && constraint; ++i) {
    if (sigma_eig.values[i] < kSupportCutoff) continue;
    for (std::size_t j = i + 1; j < n && constraint; ++j) {
      if (sigma_eig.values[j] < kSupportCutoff) continue;
      const double li = sigma_eig.values[i];
      const double lj = sigma_eig.values[j];
      if (std::abs(li - lj) <= kDegeneracyRel * std::max(li, lj)) continue;
      const double coherence = std::abs(rho_tilde(j, i));
      if (coherence <= kTol) continue;
      const auto [na, nb] = ketbra_reduction_norms(i, j);
      if (na * coherence > kTol || nb * coherence > kTol) constraint = false;
    }
  }
  return constraint ? Category::ConstraintOnly : Category::None;
}

const char* category_name(Category c) {
  switch (c) {
    case Category::CategoryI:
      return "category_i";
    case Category::CategoryII:
      return "category_ii";
    case Category::ConstraintOnly:
      return "constraint_only";
    default:
      return "none";
  }
}

namespace {

ComplexMatrix filter_operator(const DensityMatrix& sigma, Party party, const Vec3& n, double t) {
  // exp(t n.sigma / 2) = cosh(t/2) I + sinh(t/2) n.sigma for unit n.
  ComplexMatrix f2 = pauli_dot(n);
  f2 *= Complex(std::sinh(0.5 * t));
  f2 += std::cosh(0.5 * t) * ComplexMatrix::identity(2);
  if (party == Party::B) return kron(ComplexMatrix::identity(sigma.dim_a()), f2);
  return kron(f2, ComplexMatrix::identity(sigma.dim_b()));
}

void require_unit(const Vec3& n) {
  const double norm = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
  if (std::abs(norm - 1.0) > 1e-10) {
    std::ostringstream msg;
    msg << "direction must be a unit vector (|n| = " << norm << ")";
    throw InputError(msg.str());
  }
}

void require_qubit_party(const DensityMatrix& rho, Party party, const char* op) {
  if (rho.party_dim(party) != 2) {
    std::ostringstream msg;
    msg << op << ": filtered party must be a qubit";
    throw DimensionError(msg.str());
  }
}

// Filtering a rank-deficient sigma tilts its support by O(t^2), which the
// measures-level overlap tolerance (1e-9) would already reject at the 1e-4
// derivative step. The scan therefore projects onto the filtered support and
// reports support loss only beyond a 1e-6 deficit.
double entropy_at(const EigDecomposition& rho_eig, const ComplexMatrix& rho_matrix,
                  double tr_rho_log_rho, const DensityMatrix& sigma, Party party, const Vec3& n,
                  double t) {
  constexpr double kScanOverlapTol = 1e-6;
  const ComplexMatrix f = filter_operator(sigma, party, n, t);
  ComplexMatrix m = f * sigma.matrix() * f;
  m *= Complex(1.0) / m.trace();
  const EigDecomposition sigma_eig = hermitian_eig(m);
  const std::size_t dim = m.rows();

  for (std::size_t k = 0; k < dim; ++k) {
    if (rho_eig.values[k] <= kRhoEigCut) continue;
    double overlap = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      if (sigma_eig.values[i] < kSupportCutoff) continue;
      Complex amp = 0.0;
      for (std::size_t r = 0; r < dim; ++r)
        amp += std::conj(sigma_eig.vectors(r, i)) * rho_eig.vectors(r, k);
      overlap += std::norm(amp);
    }
    if (overlap < 1.0 - kScanOverlapTol) {
      std::ostringstream msg;
      msg << "filter_perturbation_scan: support of rho lost at t = " << t;
      throw SupportError(msg.str());
    }
  }

  double cross = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    if (sigma_eig.values[i] < kSupportCutoff) continue;
    Complex q = 0.0;
    for (std::size_t r = 0; r < dim; ++r) {
      Complex rv = 0.0;
      for (std::size_t c = 0; c < dim; ++c) rv += rho_matrix(r, c) * sigma_eig.vectors(c, i);
      q += std::conj(sigma_eig.vectors(r, i)) * rv;
    }
    cross += std::log(sigma_eig.values[i]) * q.real();
  }
  return tr_rho_log_rho - cross;
}

}  // namespace

PerturbationScan filter_perturbation_scan(const DensityMatrix& rho, const DensityMatrix& sigma,
                                          Party party, const Vec3& direction,
                                          const std::vector<double>& t_grid) {
  require_same_dims(rho, sigma);
  require_qubit_party(rho, party, "filter_perturbation_scan");
  require_unit(direction);

  const EigDecomposition rho_eig = hermitian_eig(rho.matrix());
  double tr_rho_log_rho = 0.0;
  for (double lambda : rho_eig.values)
    if (lambda >= kSupportCutoff) tr_rho_log_rho += lambda * std::log(lambda);

  auto entropy = [&](double t) {
    return entropy_at(rho_eig, rho.matrix(), tr_rho_log_rho, sigma, party, direction, t);
  };

  PerturbationScan scan;
  scan.party = party;
  scan.direction = direction;
  scan.t_values = t_grid;
  scan.entropies_nats.reserve(t_grid.size());
  for (double t : t_grid) scan.entropies_nats.push_back(entropy(t));

  constexpr double kStep = 1e-4;
  scan.derivative = (entropy(kStep) - entropy(-kStep)) / (2.0 * kStep);

  const ConditionReport report = filter_residual(rho, sigma, party);
  scan.analytic_derivative = 0.0;
  for (int k = 0; k < 3; ++k)
    scan.analytic_derivative += direction[k] * (report.s[k] - report.r[k] - report.g_vec[k]);
  return scan;
}

double bures_residual(const DensityMatrix& rho, const DensityMatrix& sigma, Party party,
                      const Vec3& direction) {
  require_same_dims(rho, sigma);
  require_qubit_party(rho, party, "bures_residual");
  require_unit(direction);

  const EigDecomposition sigma_eig = hermitian_eig(sigma.matrix());
  if (sigma_eig.values.back() <= 1e-12)
    throw SingularityError("bures_residual: sigma must be strictly positive");

  const std::size_t n = sigma.total_dim();
  const ComplexMatrix sqrt_sigma = matrix_function(sigma.matrix(), SpectralFn::Sqrt);

  const Party traced = (party == Party::A) ? Party::B : Party::A;
  const ComplexMatrix sigma_x = partial_trace(sigma.matrix(), sigma.dim_a(), sigma.dim_b(), traced);
  const std::vector<double> s = bloch_vector(sigma_x, generator_basis(2));
  const double n_dot_s = direction[0] * s[0] + direction[1] * s[1] + direction[2] * s[2];
  const double lhs = n_dot_s * (sqrt_sigma * rho.matrix() * sqrt_sigma).trace().real();

  const ComplexMatrix nop = (party == Party::B)
                                ? kron(ComplexMatrix::identity(sigma.dim_a()), pauli_dot(direction))
                                : kron(pauli_dot(direction), ComplexMatrix::identity(sigma.dim_b()));
  const ComplexMatrix anticomm = rho.matrix() * sqrt_sigma + sqrt_sigma * rho.matrix();

  const ComplexMatrix n_tilde = to_eigenbasis(nop, sigma_eig);
  const ComplexMatrix a_tilde = to_eigenbasis(anticomm, sigma_eig);

  Complex rhs = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double li = sigma_eig.values[i];
      const double lj = sigma_eig.values[j];
      rhs += 0.5 * (li + lj) / (std::sqrt(li) + std::sqrt(lj)) * n_tilde(i, j) * a_tilde(j, i);
    }
  return lhs - rhs.real();
}

}  // namespace ree
