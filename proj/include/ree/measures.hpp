#pragma once

#include "ree/states.hpp"

namespace ree {

// Support semantics shared by every quantity built on log(sigma):
// eigenvalues of rho above kRhoEigCut must have squared overlap at least
// 1 - kSupportOverlapTol with the support of sigma (eigenvalues above
// kSupportCutoff), otherwise the relative entropy is infinite.
inline constexpr double kRhoEigCut = 1e-12;
inline constexpr double kSupportOverlapTol = 1e-9;

struct EntropyValue {
  double nats = 0.0;
  double bits = 0.0;
  bool infinite = false;

  static EntropyValue from_nats(double nats);
  static EntropyValue infinity();
};

EntropyValue von_neumann_entropy(const DensityMatrix& rho);

// Tr rho log rho - Tr rho log sigma, natural log, log sigma on its support.
EntropyValue relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);

// Wootters concurrence of a two-qubit state.
double concurrence(const DensityMatrix& rho);

struct PptResult {
  bool is_ppt = false;
  double min_eigenvalue = 0.0;
};

// Positivity of the partial transpose; exact separability test in 2x2.
PptResult ppt_check(const DensityMatrix& rho);

struct OctahedronResult {
  bool inside = false;
  double margin = 0.0;  // 1 - (|tau1| + |tau2| + |tau3|)
};

OctahedronResult octahedron_check(const Vec3& tau);

struct UncorrelatedResult {
  DensityMatrix sigma_u;
  EntropyValue distance;
};

// sigma_u = rho_A (x) rho_B; the distance equals the mutual information
// S(rho_A) + S(rho_B) - S(rho).
UncorrelatedResult closest_uncorrelated(const DensityMatrix& rho);

}  // namespace ree
