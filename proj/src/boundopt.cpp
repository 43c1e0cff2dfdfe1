#include "ree/boundopt.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "ree/simplex.hpp"

namespace ree {

namespace {

// PSD / PPT slack allowed during the bound search; slightly looser than the
// phase-1 feasibility target so boundary points found there stay usable.
constexpr double kFeasTol = -1e-11;
constexpr double kLogClip = 1e-12;  // eigenvalue clip inside the objective

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int workers = std::min(threads, count);
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (std::thread& th : pool) th.join();
}

// Fixed part of the minimization target: Tr rho log rho and the matrix of
// rho for the cross term.
struct RhoTerms {
  ComplexMatrix matrix;
  double tr_rho_log_rho = 0.0;
};

RhoTerms rho_terms(const DensityMatrix& rho) {
  RhoTerms terms{rho.matrix(), 0.0};
  for (double lambda : hermitian_eig(rho.matrix()).values)
    if (lambda >= kSupportCutoff) terms.tr_rho_log_rho += lambda * std::log(lambda);
  return terms;
}

// -Tr rho log sigma with sigma's eigenvalues clipped at kLogClip so the
// objective stays finite on the boundary of positivity.
double clipped_cross_entropy(const RhoTerms& rho, const EigDecomposition& sigma_eig) {
  const std::size_t n = rho.matrix.rows();
  double cross = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Complex q = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      Complex rv = 0.0;
      for (std::size_t c = 0; c < n; ++c) rv += rho.matrix(r, c) * sigma_eig.vectors(c, i);
      q += std::conj(sigma_eig.vectors(r, i)) * rv;
    }
    cross += std::log(std::max(sigma_eig.values[i], kLogClip)) * q.real();
  }
  return -cross;
}

double min_pt_eigenvalue(const ComplexMatrix& m, std::size_t dim_a, std::size_t dim_b) {
  return hermitian_eig(partial_transpose(m, dim_a, dim_b, Party::B)).values.back();
}

}  // namespace

BoundResult upper_bound_ree(const DensityMatrix& rho, const BoundOptions& options) {
  if (rho.dim_a() != 2 || rho.dim_b() != 2)
    throw DimensionError("upper_bound_ree: requires a 2x2-partite state");

  const CanonicalForm canonical = canonical_form(rho);
  const HilbertSchmidtForm hs = to_hilbert_schmidt(canonical.state);

  // sigma(tau) = base + sum_n tau_n * (1/4) sigma_n (x) sigma_n, sharing
  // rho's canonical Bloch vectors so the reductions match by construction.
  ComplexMatrix base = ComplexMatrix::identity(4);
  for (int n = 0; n < 3; ++n) {
    base += hs.r_a[n] * kron(pauli(n + 1), pauli(0));
    base += hs.r_b[n] * kron(pauli(0), pauli(n + 1));
  }
  base *= Complex(0.25);
  std::array<ComplexMatrix, 3> corr;
  for (int n = 0; n < 3; ++n) {
    corr[n] = kron(pauli(n + 1), pauli(n + 1));
    corr[n] *= Complex(0.25);
  }

  auto assemble = [&](const std::vector<double>& tau) {
    ComplexMatrix m = base;
    for (int n = 0; n < 3; ++n) {
      ComplexMatrix term = corr[n];
      term *= Complex(tau[n]);
      m += term;
    }
    return m;
  };

  const RhoTerms rho_c = rho_terms(canonical.state);
  const double inf = std::numeric_limits<double>::infinity();

  auto objective = [&](const std::vector<double>& tau) {
    const ComplexMatrix sigma = assemble(tau);
    const EigDecomposition eig = hermitian_eig(sigma);
    if (eig.values.back() < kFeasTol) return inf;
    if (min_pt_eigenvalue(sigma, 2, 2) < kFeasTol) return inf;
    return rho_c.tr_rho_log_rho + clipped_cross_entropy(rho_c, eig);
  };

  auto feasible = [&](const std::vector<double>& tau) { return std::isfinite(objective(tau)); };

  // Phase 1: locate a feasible tau. The combined PSD/PPT violation is convex
  // in tau, so a simplex descent from the center finds the feasible set
  // whenever it is nonempty.
  auto violation = [&](const std::vector<double>& tau) {
    const ComplexMatrix sigma = assemble(tau);
    double v = std::max(0.0, -hermitian_eig(sigma).values.back());
    v += std::max(0.0, -min_pt_eigenvalue(sigma, 2, 2));
    return v;
  };
  SimplexOptions phase1;
  phase1.max_iterations = 2000;
  phase1.diameter_tol = 1e-13;
  phase1.initial_step = 0.3;
  const SimplexResult feas = nelder_mead(violation, {0.0, 0.0, 0.0}, phase1);
  const bool slice_feasible = feas.value <= 1e-12;

  // Start points: the center, the phase-1 point, rho's own correlation
  // diagonal pulled toward feasibility, and the octahedron vertices.
  std::vector<std::vector<double>> starts;
  starts.push_back({0.0, 0.0, 0.0});
  if (slice_feasible) starts.push_back(feas.x);
  {
    std::vector<double> t_diag{hs.t[0][0], hs.t[1][1], hs.t[2][2]};
    if (!feasible(t_diag)) {
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        std::vector<double> probe{mid * t_diag[0], mid * t_diag[1], mid * t_diag[2]};
        (feasible(probe) ? lo : hi) = mid;
      }
      for (double& v : t_diag) v *= lo;
    }
    starts.push_back(std::move(t_diag));
  }
  for (int axis = 0; axis < 3; ++axis)
    for (double sign : {1.0, -1.0}) {
      std::vector<double> vertex{0.0, 0.0, 0.0};
      vertex[axis] = sign * 0.999;
      starts.push_back(std::move(vertex));
    }

  SimplexOptions simplex_options;
  simplex_options.max_iterations = options.max_iterations;
  simplex_options.diameter_tol = options.simplex_tol;
  simplex_options.initial_step = 0.1;

  SimplexResult best;
  best.value = inf;
  int best_start = 0;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    SimplexResult run = nelder_mead(objective, starts[i], simplex_options);
    if (run.value < best.value) {
      best = std::move(run);
      best_start = static_cast<int>(i);
    }
  }

  HilbertSchmidtForm hs_star;
  hs_star.r_a = mat3_apply(mat3_transpose(canonical.o_a), hs.r_a);
  hs_star.r_b = mat3_apply(mat3_transpose(canonical.o_b), hs.r_b);
  Vec3 tau_star{};
  bool converged = best.converged;

  if (std::isfinite(best.value)) {
    tau_star = Vec3{best.x[0], best.x[1], best.x[2]};
    Mat3 tau_diag{};
    for (int n = 0; n < 3; ++n) tau_diag[n][n] = tau_star[n];
    hs_star.t = mat3_mul(mat3_transpose(canonical.o_a), mat3_mul(tau_diag, canonical.o_b));
  } else {
    // No PPT state in the diagonal-tau slice: fall back to the product of
    // the reductions, which shares them and is separable, so the value is
    // still an upper bound.
    converged = false;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) hs_star.t[i][j] = hs_star.r_a[i] * hs_star.r_b[j];
    const Mat3 tau_canonical =
        mat3_mul(canonical.o_a, mat3_mul(hs_star.t, mat3_transpose(canonical.o_b)));
    tau_star = Vec3{tau_canonical[0][0], tau_canonical[1][1], tau_canonical[2][2]};
  }
  DensityMatrix sigma_star = from_hilbert_schmidt(hs_star);

  BoundResult result{tau_star,
                     sigma_star,
                     relative_entropy(rho, sigma_star),
                     canonical.o_a,
                     canonical.o_b,
                     BoundDiagnostics{static_cast<int>(starts.size()), best_start, best.iterations,
                                      best.diameter, converged},
                     filter_residual(rho, sigma_star, Party::A, options.condition_tol),
                     filter_residual(rho, sigma_star, Party::B, options.condition_tol)};
  return result;
}

namespace {

// Complex lower-triangular G <-> n^2 real parameters: real diagonal, then
// (re, im) pairs below it, row by row.
ComplexMatrix gram_factor(const std::vector<double>& params, std::size_t n) {
  ComplexMatrix g(n, n);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      if (i == j) {
        g(i, j) = params[idx++];
      } else {
        g(i, j) = Complex(params[idx], params[idx + 1]);
        idx += 2;
      }
    }
  return g;
}

ComplexMatrix sigma_from_params(const std::vector<double>& params, std::size_t n) {
  const ComplexMatrix g = gram_factor(params, n);
  ComplexMatrix sigma = g * g.adjoint();
  const double tr = sigma.trace().real();
  sigma *= Complex(1.0 / std::max(tr, 1e-300));
  return sigma;
}

// Value and gradient of the penalized objective in the G parameterization.
// The cross-entropy gradient is V (K o rho_tilde) V^dagger with K the
// divided-difference kernel of the clipped logarithm; the penalty gradient
// follows from the min-eigenvector rule applied to the partial transpose.
// Both chain through sigma = G G^dagger / Tr(G G^dagger).
struct PenalizedGradient {
  double value = 0.0;
  std::vector<double> grad;
};

PenalizedGradient penalized_with_gradient(const RhoTerms& rho_data,
                                          const std::vector<double>& params, std::size_t n,
                                          std::size_t dim_a, std::size_t dim_b, double mu) {
  const ComplexMatrix g = gram_factor(params, n);
  ComplexMatrix h = g * g.adjoint();
  const double tr = std::max(h.trace().real(), 1e-300);
  ComplexMatrix sigma = h;
  sigma *= Complex(1.0 / tr);

  const EigDecomposition eig = hermitian_eig(sigma);
  PenalizedGradient out;
  out.value = rho_data.tr_rho_log_rho + clipped_cross_entropy(rho_data, eig);

  const ComplexMatrix rho_tilde = eig.vectors.adjoint() * rho_data.matrix * eig.vectors;
  auto f_clip = [](double lambda) { return std::log(std::max(lambda, kLogClip)); };
  auto f_slope = [](double lambda) { return lambda > kLogClip ? 1.0 / lambda : 0.0; };
  ComplexMatrix kernel_had(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double li = eig.values[i];
      const double lj = eig.values[j];
      const double k = (std::abs(li - lj) <= 1e-12 * std::max(std::abs(li), std::abs(lj)))
                           ? f_slope(0.5 * (li + lj))
                           : (f_clip(li) - f_clip(lj)) / (li - lj);
      kernel_had(i, j) = k * rho_tilde(i, j);
    }
  const ComplexMatrix w = eig.vectors * kernel_had * eig.vectors.adjoint();

  ComplexMatrix d = w;
  d *= Complex(-1.0);

  const ComplexMatrix pt = partial_transpose(sigma, dim_a, dim_b, Party::B);
  const EigDecomposition pt_eig = hermitian_eig(pt);
  const double pt_min = pt_eig.values.back();
  if (pt_min < 0.0) {
    out.value += mu * pt_min * pt_min;
    ComplexMatrix projector(n, n);
    const std::size_t last = n - 1;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        projector(r, c) = pt_eig.vectors(r, last) * std::conj(pt_eig.vectors(c, last));
    ComplexMatrix pen = partial_transpose(projector, dim_a, dim_b, Party::B);
    pen *= Complex(2.0 * mu * pt_min);  // d(mu v^2) = -2 mu v d(lambda_min), v = -lambda_min
    d += pen;
  }

  const double c_shift = (d * sigma).trace().real();
  ComplexMatrix shifted = d;
  for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= c_shift;
  const ComplexMatrix z = shifted * g;

  out.grad.resize(n * n);
  std::size_t idx = 0;
  const double scale = 2.0 / tr;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      if (i == j) {
        out.grad[idx++] = scale * z(i, j).real();
      } else {
        out.grad[idx++] = scale * z(i, j).real();
        out.grad[idx++] = scale * z(i, j).imag();
      }
    }
  return out;
}

// Monotone Barzilai-Borwein descent with backtracking.
void gradient_polish(const RhoTerms& rho_data, std::vector<double>& x, std::size_t n,
                     std::size_t dim_a, std::size_t dim_b, const std::vector<double>& mu_stages,
                     int iterations) {
  for (double mu : mu_stages) {
    PenalizedGradient cur = penalized_with_gradient(rho_data, x, n, dim_a, dim_b, mu);
    double alpha = 1e-3;
    for (int it = 0; it < iterations; ++it) {
      std::vector<double> xn(x.size());
      PenalizedGradient next;
      int backtracks = 0;
      while (true) {
        for (std::size_t k = 0; k < x.size(); ++k) xn[k] = x[k] - alpha * cur.grad[k];
        next = penalized_with_gradient(rho_data, xn, n, dim_a, dim_b, mu);
        if (next.value <= cur.value || backtracks >= 50) break;
        alpha *= 0.5;
        ++backtracks;
      }
      if (next.value > cur.value) break;

      double sy = 0.0, yy = 0.0, gmax = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double s = xn[k] - x[k];
        const double y = next.grad[k] - cur.grad[k];
        sy += s * y;
        yy += y * y;
        gmax = std::max(gmax, std::abs(next.grad[k]));
      }
      x = xn;
      cur = std::move(next);
      if (gmax < 1e-11) break;
      alpha = (sy > 0.0 && yy > 0.0) ? std::clamp(sy / yy, 1e-12, 10.0)
                                     : std::min(alpha * 2.0, 1e-2);
    }
  }
}

std::vector<double> params_from_cholesky(const ComplexMatrix& psd, std::size_t n) {
  // Regularized Cholesky of (psd + eps I) / (1 + n eps).
  constexpr double kEps = 1e-6;
  ComplexMatrix a = psd;
  for (std::size_t i = 0; i < n; ++i) a(i, i) += kEps;
  a *= Complex(1.0 / (1.0 + static_cast<double>(n) * kEps));

  ComplexMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    Complex diag = a(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * std::conj(l(j, k));
    const double d = std::sqrt(std::max(diag.real(), 1e-12));
    l(j, j) = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      Complex v = a(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * std::conj(l(j, k));
      l(i, j) = v / d;
    }
  }

  std::vector<double> params;
  params.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      if (i == j) {
        params.push_back(l(i, j).real());
      } else {
        params.push_back(l(i, j).real());
        params.push_back(l(i, j).imag());
      }
    }
  return params;
}

// Smallest mixing weight toward the maximally mixed state that lifts the
// partial transpose to PSD.
ComplexMatrix restore_ppt(ComplexMatrix sigma, std::size_t dim_a, std::size_t dim_b) {
  const std::size_t n = sigma.rows();
  if (min_pt_eigenvalue(sigma, dim_a, dim_b) >= 0.0) return sigma;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    ComplexMatrix mixed = sigma;
    mixed *= Complex(1.0 - mid);
    ComplexMatrix eye = ComplexMatrix::identity(n);
    eye *= Complex(mid / static_cast<double>(n));
    mixed += eye;
    (min_pt_eigenvalue(mixed, dim_a, dim_b) >= 0.0 ? hi : lo) = mid;
  }
  ComplexMatrix eye = ComplexMatrix::identity(n);
  eye *= Complex(hi / static_cast<double>(n));
  sigma *= Complex(1.0 - hi);
  sigma += eye;
  return sigma;
}

}  // namespace

OracleResult closest_ppt_oracle(const DensityMatrix& rho, int starts, std::uint64_t seed,
                                const OracleOptions& options) {
  if (starts < 1) throw InputError("closest_ppt_oracle: starts must be >= 1");
  if (options.mu_schedule.empty()) throw InputError("closest_ppt_oracle: empty penalty schedule");

  const std::size_t n = rho.total_dim();
  const std::size_t dim_a = rho.dim_a();
  const std::size_t dim_b = rho.dim_b();
  const RhoTerms rho_data = rho_terms(rho);

  auto penalized = [&](const std::vector<double>& params, double mu) {
    const ComplexMatrix sigma = sigma_from_params(params, n);
    const EigDecomposition eig = hermitian_eig(sigma);
    const double value = rho_data.tr_rho_log_rho + clipped_cross_entropy(rho_data, eig);
    const double pt_min = min_pt_eigenvalue(sigma, dim_a, dim_b);
    const double violation = std::max(0.0, -pt_min);
    return value + mu * violation * violation;
  };

  auto restored_value = [&](const ComplexMatrix& sigma) {
    const EntropyValue value = relative_entropy(rho, DensityMatrix(dim_a, dim_b, sigma));
    return value.infinite ? std::numeric_limits<double>::infinity() : value.nats;
  };

  std::vector<std::pair<double, double>> stages;  // (mu, initial simplex step)
  const std::array<double, 3> stage_steps{0.25, 0.05, 0.01};
  for (std::size_t s = 0; s < options.mu_schedule.size(); ++s)
    stages.emplace_back(options.mu_schedule[s], stage_steps[std::min(s, stage_steps.size() - 1)]);

  struct StartOutcome {
    double value = std::numeric_limits<double>::infinity();
    std::vector<double> params;
    ComplexMatrix sigma;
  };
  std::vector<StartOutcome> outcomes(starts);

  parallel_for(starts, options.threads, [&](int index) {
    std::vector<double> x;
    if (index == 0) {
      x = params_from_cholesky(rho.matrix(), n);
    } else {
      std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(index)));
      std::normal_distribution<double> gauss(0.0, 0.5);
      x.resize(n * n);
      for (double& v : x) v = gauss(rng);
    }

    for (const auto& stage : stages) {
      const double mu = stage.first;
      SimplexOptions so;
      so.max_iterations = options.iterations_per_stage;
      so.diameter_tol = 1e-12;
      so.initial_step = stage.second;
      SimplexResult run =
          nelder_mead([&](const std::vector<double>& p) { return penalized(p, mu); }, x, so);
      x = std::move(run.x);
    }

    ComplexMatrix sigma = restore_ppt(sigma_from_params(x, n), dim_a, dim_b);
    outcomes[index] = StartOutcome{restored_value(sigma), std::move(x), std::move(sigma)};
  });

  int best = 0;
  for (int i = 1; i < starts; ++i)
    if (outcomes[i].value < outcomes[best].value) best = i;
  if (!std::isfinite(outcomes[best].value))
    throw Error("closest_ppt_oracle: no start produced a finite value");

  if (options.polish_iterations > 0) {
    std::vector<double> mu_polish{options.mu_schedule.back(), options.mu_schedule.back() * 1e2,
                                  options.mu_schedule.back() * 1e4};
    std::vector<double> x = outcomes[best].params;
    gradient_polish(rho_data, x, n, dim_a, dim_b, mu_polish, options.polish_iterations);
    ComplexMatrix sigma = restore_ppt(sigma_from_params(x, n), dim_a, dim_b);
    const double value = restored_value(sigma);
    if (value < outcomes[best].value)
      outcomes[best] = StartOutcome{value, std::move(x), std::move(sigma)};
  }

  OracleResult result{DensityMatrix(dim_a, dim_b, outcomes[best].sigma),
                      EntropyValue::from_nats(outcomes[best].value),
                      starts,
                      {},
                      seed};
  result.per_start_nats.reserve(starts);
  for (const StartOutcome& o : outcomes) result.per_start_nats.push_back(o.value);
  return result;
}

namespace detail {

OracleGradient oracle_objective_gradient(const DensityMatrix& rho,
                                         const std::vector<double>& params, double mu) {
  const std::size_t n = rho.total_dim();
  if (params.size() != n * n)
    throw InputError("oracle_objective_gradient: wrong parameter count");
  const PenalizedGradient pg =
      penalized_with_gradient(rho_terms(rho), params, n, rho.dim_a(), rho.dim_b(), mu);
  return OracleGradient{pg.value, pg.grad};
}

}  // namespace detail

SweepTable sweep(const std::string& family, const std::string& param, double from, double to,
                 int steps, bool with_oracle, std::uint64_t seed, int oracle_starts,
                 const OracleOptions& oracle_options) {
  if (steps < 2) throw InputError("sweep: steps must be >= 2");

  auto state_at = [&](double value) -> DensityMatrix {
    if (family == "pure" && param == "p") return pure_state(value);
    if (family == "bell_diagonal" && param == "lambda1") {
      if (value < 0.0 || value > 1.0)
        throw InputError("sweep: lambda1 must lie in [0,1]");
      return bell_diagonal(value, 1.0 - value, 0.0, 0.0);
    }
    if (family == "werner" && param == "F") return werner(value);
    std::ostringstream msg;
    msg << "sweep: unsupported family/param pair " << family << "/" << param;
    throw InputError(msg.str());
  };

  SweepTable table;
  table.family = family;
  table.param = param;
  table.with_oracle = with_oracle;
  table.rows.reserve(steps);

  for (int i = 0; i < steps; ++i) {
    const double value = from + (to - from) * static_cast<double>(i) / (steps - 1);
    const DensityMatrix rho = state_at(value);
    const BoundResult bound = upper_bound_ree(rho);

    SweepRow row;
    row.param = value;
    row.bound_nats = bound.value.nats;
    row.bound_bits = bound.value.bits;
    row.filter_residual_a = bound.condition_a.filter_residual;
    row.filter_residual_b = bound.condition_b.filter_residual;
    row.unitary_residual_a = bound.condition_a.unitary_residual;
    row.unitary_residual_b = bound.condition_b.unitary_residual;
    if (with_oracle) {
      const OracleResult oracle = closest_ppt_oracle(
          rho, oracle_starts, mix_seed(seed, static_cast<std::uint64_t>(i)), oracle_options);
      row.oracle_nats = oracle.value.nats;
    }
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace ree
