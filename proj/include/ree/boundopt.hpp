#pragma once

#include <cstdint>
#include <optional>

#include "ree/extremal.hpp"

namespace ree {

struct BoundOptions {
  int max_iterations = 2000;
  double simplex_tol = 1e-9;
  double condition_tol = 1e-6;
};

struct BoundDiagnostics {
  int starts = 0;
  int best_start = 0;
  int iterations = 0;  // of the best start's descent
  double final_simplex_size = 0.0;
  bool converged = true;
};

struct BoundResult {
  Vec3 tau_star{};
  DensityMatrix sigma_star;
  EntropyValue value;
  Mat3 o_a{};
  Mat3 o_b{};
  BoundDiagnostics diagnostics;
  ConditionReport condition_a;
  ConditionReport condition_b;
};

// Upper bound on the relative entropy of entanglement of a two-qubit state:
// rho is brought to canonical form, sigma(tau) shares its Bloch vectors and
// carries a diagonal correlation matrix tau, and S(rho||sigma(tau)) is
// minimized over the three tau components subject to sigma being PSD and
// PPT (the exact separability condition in 2x2). The returned sigma is
// rotated back to rho's original frame.
BoundResult upper_bound_ree(const DensityMatrix& rho, const BoundOptions& options = {});

struct OracleOptions {
  std::vector<double> mu_schedule{10.0, 1e3, 1e5};
  int iterations_per_stage = 400;
  // Exact-gradient descent applied to the winning start under continued
  // penalty stiffening; finishes the flat directions the simplex cannot.
  int polish_iterations = 300;
  int threads = 1;
};

struct OracleResult {
  DensityMatrix sigma_star;
  EntropyValue value;
  int starts = 0;
  std::vector<double> per_start_nats;
  std::uint64_t seed = 0;
};

// Brute-force closest-PPT search over all density matrices: sigma is
// parameterized as G G^dagger / Tr(G G^dagger) with G complex lower
// triangular (n^2 real parameters), the PPT constraint enters as an
// increasing quadratic penalty on the most negative eigenvalue of the
// partial transpose, and the best of `starts` seeded descents wins (ties by
// lowest start index). Deterministic for a fixed seed.
OracleResult closest_ppt_oracle(const DensityMatrix& rho, int starts, std::uint64_t seed,
                                const OracleOptions& options = {});

namespace detail {

// Test hook: value and exact gradient of the oracle's penalized objective in
// the lower-triangular-factor parameterization.
struct OracleGradient {
  double value = 0.0;
  std::vector<double> grad;
};

OracleGradient oracle_objective_gradient(const DensityMatrix& rho,
                                         const std::vector<double>& params, double mu);

}  // namespace detail

struct SweepRow {
  double param = 0.0;
  double bound_nats = 0.0;
  double bound_bits = 0.0;
  std::optional<double> oracle_nats;
  double filter_residual_a = 0.0;
  double filter_residual_b = 0.0;
  double unitary_residual_a = 0.0;
  double unitary_residual_b = 0.0;
};

struct SweepTable {
  std::string family;
  std::string param;
  bool with_oracle = false;
  std::vector<SweepRow> rows;
};

// Bound (optionally oracle) along a one-parameter family. Families/params:
// pure/p, bell_diagonal/lambda1 (rest of the weight on one other Bell
// state), werner/F.
SweepTable sweep(const std::string& family, const std::string& param, double from, double to,
                 int steps, bool with_oracle, std::uint64_t seed, int oracle_starts = 32,
                 const OracleOptions& oracle_options = {});

}  // namespace ree
