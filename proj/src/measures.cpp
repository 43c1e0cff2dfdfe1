#include "ree/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ree {

EntropyValue EntropyValue::from_nats(double nats) {
  // Clamp eigensolver noise; anything genuinely negative is left visible.
  if (nats < 0.0 && nats > -1e-9) nats = 0.0;
  nats += 0.0;  // normalize -0
  return EntropyValue{nats, nats / std::numbers::ln2, false};
}

EntropyValue EntropyValue::infinity() {
  const double inf = std::numeric_limits<double>::infinity();
  return EntropyValue{inf, inf, true};
}

EntropyValue von_neumann_entropy(const DensityMatrix& rho) {
  const EigDecomposition eig = hermitian_eig(rho.matrix());
  double nats = 0.0;
  for (double lambda : eig.values)
    if (lambda >= kSupportCutoff) nats -= lambda * std::log(lambda);
  return EntropyValue::from_nats(nats);
}

namespace {

double entropy_nats(const EigDecomposition& eig) {
  double s = 0.0;
  for (double lambda : eig.values)
    if (lambda >= kSupportCutoff) s -= lambda * std::log(lambda);
  return s;
}

// Squared overlap of column k of vecs with the support of sigma_eig.
double support_overlap(const ComplexMatrix& vecs, std::size_t k, const EigDecomposition& sigma_eig) {
  double overlap = 0.0;
  const std::size_t n = vecs.rows();
  for (std::size_t i = 0; i < sigma_eig.values.size(); ++i) {
    if (sigma_eig.values[i] < kSupportCutoff) continue;
    Complex amp = 0.0;
    for (std::size_t r = 0; r < n; ++r) amp += std::conj(sigma_eig.vectors(r, i)) * vecs(r, k);
    overlap += std::norm(amp);
  }
  return overlap;
}

}  // namespace

EntropyValue relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim_a() != sigma.dim_a() || rho.dim_b() != sigma.dim_b())
    throw DimensionError("relative_entropy: dimension mismatch");

  const EigDecomposition rho_eig = hermitian_eig(rho.matrix());
  const EigDecomposition sigma_eig = hermitian_eig(sigma.matrix());
  const std::size_t n = rho.total_dim();

  for (std::size_t k = 0; k < n; ++k) {
    if (rho_eig.values[k] <= kRhoEigCut) continue;
    if (support_overlap(rho_eig.vectors, k, sigma_eig) < 1.0 - kSupportOverlapTol)
      return EntropyValue::infinity();
  }

  double cross = 0.0;  // Tr rho log sigma on the support of sigma
  for (std::size_t i = 0; i < n; ++i) {
    const double lambda = sigma_eig.values[i];
    if (lambda < kSupportCutoff) continue;
    Complex q = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      Complex rv = 0.0;
      for (std::size_t c = 0; c < n; ++c) rv += rho.matrix()(r, c) * sigma_eig.vectors(c, i);
      q += std::conj(sigma_eig.vectors(r, i)) * rv;
    }
    cross += std::log(lambda) * q.real();
  }

  return EntropyValue::from_nats(-entropy_nats(rho_eig) - cross);
}

double concurrence(const DensityMatrix& rho) {
  if (rho.dim_a() != 2 || rho.dim_b() != 2)
    throw DimensionError("concurrence: requires a 2x2-partite state");

  const ComplexMatrix yy = kron(pauli(2), pauli(2));
  const ComplexMatrix sqrt_rho = matrix_function(rho.matrix(), SpectralFn::Sqrt, true);
  const ComplexMatrix flipped = yy * rho.matrix().conjugate() * yy;
  const EigDecomposition eig = hermitian_eig(sqrt_rho * flipped * sqrt_rho);

  std::array<double, 4> mu{};
  for (int i = 0; i < 4; ++i) mu[i] = std::sqrt(std::max(eig.values[i], 0.0));
  return std::max(0.0, mu[0] - mu[1] - mu[2] - mu[3]);
}

PptResult ppt_check(const DensityMatrix& rho) {
  const ComplexMatrix pt =
      partial_transpose(rho.matrix(), rho.dim_a(), rho.dim_b(), Party::B);
  const double min_eig = hermitian_eig(pt).values.back();
  return PptResult{min_eig >= -1e-10, min_eig};
}

OctahedronResult octahedron_check(const Vec3& tau) {
  const double margin = 1.0 - (std::abs(tau[0]) + std::abs(tau[1]) + std::abs(tau[2]));
  return OctahedronResult{margin >= 0.0, margin};
}

UncorrelatedResult closest_uncorrelated(const DensityMatrix& rho) {
  DensityMatrix sigma_u(rho.dim_a(), rho.dim_b(),
                        kron(rho.reduction(Party::A), rho.reduction(Party::B)));
  EntropyValue distance = relative_entropy(rho, sigma_u);
  return UncorrelatedResult{std::move(sigma_u), distance};
}

}  // namespace ree
