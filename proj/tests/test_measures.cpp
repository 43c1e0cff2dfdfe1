#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ree/measures.hpp"
#include "test_helpers.hpp"

using namespace ree;
using namespace ree::testing;

TEST_CASE("von_neumann_entropy") {
  SUBCASE("pure states have zero entropy") {
    CHECK(von_neumann_entropy(pure_state(0.3)).nats == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("maximally mixed two qubits") {
    ComplexMatrix m = ComplexMatrix::identity(4);
    m *= Complex(0.25);
    const EntropyValue s = von_neumann_entropy(DensityMatrix(2, 2, std::move(m)));
    CHECK(s.nats == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    CHECK(s.bits == doctest::Approx(2.0).epsilon(1e-12));
  }

  SUBCASE("diag(0.9, 0.1)") {
    ComplexMatrix m(2, 2);
    m(0, 0) = 0.9;
    m(1, 1) = 0.1;
    const EntropyValue s = von_neumann_entropy(DensityMatrix(1, 2, std::move(m)));
    CHECK(s.nats == doctest::Approx(0.3250829733914482).epsilon(1e-12));
  }
}

TEST_CASE("entropy units stay consistent") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const EntropyValue s = von_neumann_entropy(random_state(2, 2, rng));
    REQUIRE(std::abs(s.bits * std::numbers::ln2 - s.nats) <= 1e-12);
  }
}

TEST_CASE("relative_entropy") {
  std::mt19937_64 rng(37);

  SUBCASE("S(rho||rho) = 0") {
    for (int trial = 0; trial < 50; ++trial) {
      const DensityMatrix rho = random_state(2, 2, rng);
      CHECK(relative_entropy(rho, rho).nats == doctest::Approx(0.0).epsilon(1e-12));
    }
  }

  SUBCASE("disjoint supports are infinite") {
    ComplexMatrix p0(2, 2);
    p0(0, 0) = 1.0;
    ComplexMatrix p1(2, 2);
    p1(1, 1) = 1.0;
    const EntropyValue s =
        relative_entropy(DensityMatrix(1, 2, p0), DensityMatrix(1, 2, p1));
    CHECK(s.infinite);
  }

  SUBCASE("Bell state against the dephased closest state") {
    const EntropyValue s = relative_entropy(pure_state(0.5), pure_closest(0.5));
    CHECK(s.nats == doctest::Approx(std::numbers::ln2).epsilon(1e-12));
    CHECK(s.bits == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("commuting qutrit pair against the scalar formula") {
    // Both isotropic states diagonalize in the same basis, so the relative
    // entropy reduces to the classical divergence of the spectra.
    const double f_rho = 0.9;
    const double f_sigma = 1.0 / 3.0;
    const EntropyValue s = relative_entropy(isotropic(3, f_rho), isotropic(3, f_sigma));
    const double rest_rho = (1.0 - f_rho) / 8.0;
    const double rest_sigma = (1.0 - f_sigma) / 8.0;
    const double expected =
        f_rho * std::log(f_rho / f_sigma) + 8.0 * rest_rho * std::log(rest_rho / rest_sigma);
    CHECK(s.nats == doctest::Approx(expected).epsilon(1e-12));
  }

  SUBCASE("nonnegative on random pairs") {
    for (int trial = 0; trial < 200; ++trial) {
      const DensityMatrix rho = random_state(2, 2, rng);
      const DensityMatrix sigma = random_state(2, 2, rng);
      const EntropyValue s = relative_entropy(rho, sigma);
      REQUIRE(!s.infinite);
      REQUIRE(s.nats >= 0.0);
    }
  }

  SUBCASE("zero iff equal within tolerance") {
    for (int trial = 0; trial < 50; ++trial) {
      const DensityMatrix rho = random_state(2, 2, rng);
      CHECK(relative_entropy(rho, rho).nats <= 1e-12);
      const DensityMatrix sigma = random_state(2, 2, rng);
      const double diff = max_abs_diff(rho.matrix(), sigma.matrix());
      if (diff > 1e-3) CHECK(relative_entropy(rho, sigma).nats > 1e-9);
    }
  }

  SUBCASE("dimension mismatch") {
    std::mt19937_64 rng2(3);
    CHECK_THROWS_AS(relative_entropy(random_state(2, 2, rng2), random_state(1, 2, rng2)),
                    DimensionError);
  }
}

TEST_CASE("concurrence") {
  std::mt19937_64 rng(41);

  SUBCASE("product states are unentangled") {
    const DensityMatrix prod =
        product_state(qubit_state(Vec3{0.1, 0.2, 0.6}), qubit_state(Vec3{0.0, 0.5, -0.2}));
    CHECK(concurrence(prod) == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("the singlet is maximally entangled") {
    CHECK(concurrence(bell_diagonal(0.0, 0.0, 0.0, 1.0)) == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("Schmidt-form pure states") {
    for (double p : {0.1, 0.25, 0.5, 0.75, 0.9}) {
      CHECK(concurrence(pure_state(p)) ==
            doctest::Approx(2.0 * std::sqrt(p * (1.0 - p))).epsilon(1e-10));
    }
  }

  SUBCASE("invariant under local unitaries") {
    for (int trial = 0; trial < 25; ++trial) {
      const DensityMatrix rho = random_state(2, 2, rng);
      const DensityMatrix rotated =
          apply_local_unitary(rho, random_unitary(2, rng), random_unitary(2, rng));
      REQUIRE(std::abs(concurrence(rho) - concurrence(rotated)) <= 1e-10);
    }
  }
}

TEST_CASE("ppt_check") {
  SUBCASE("product state") {
    const DensityMatrix prod =
        product_state(qubit_state(Vec3{0.0, 0.0, 0.4}), qubit_state(Vec3{0.2, 0.0, 0.0}));
    const PptResult r = ppt_check(prod);
    CHECK(r.is_ppt);
    CHECK(r.min_eigenvalue >= -1e-12);
  }

  SUBCASE("singlet") {
    const PptResult r = ppt_check(bell_diagonal(0.0, 0.0, 0.0, 1.0));
    CHECK(!r.is_ppt);
    CHECK(r.min_eigenvalue == doctest::Approx(-0.5).epsilon(1e-12));
  }

  SUBCASE("werner threshold at F = 1/2") {
    CHECK(ppt_check(werner(0.3)).is_ppt);
    CHECK(ppt_check(werner(0.5 - 1e-8)).is_ppt);
    CHECK(ppt_check(werner(0.5)).is_ppt);
    CHECK(!ppt_check(werner(0.5 + 1e-8)).is_ppt);
    CHECK(!ppt_check(werner(0.75)).is_ppt);
  }

  SUBCASE("convex mixtures of products stay PPT") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
      std::array<double, 4> w{};
      double total = 0.0;
      for (double& v : w) {
        v = unif(rng);
        total += v;
      }
      ComplexMatrix mix(4, 4);
      for (double v : w) {
        const DensityMatrix part = product_state(random_state(1, 2, rng).matrix(),
                                                 random_state(1, 2, rng).matrix());
        ComplexMatrix scaled = part.matrix();
        scaled *= Complex(v / total);
        mix += scaled;
      }
      REQUIRE(ppt_check(DensityMatrix(2, 2, mix)).is_ppt);
    }
  }
}

TEST_CASE("octahedron_check") {
  const OctahedronResult center = octahedron_check(Vec3{0.0, 0.0, 0.0});
  CHECK(center.inside);
  CHECK(center.margin == doctest::Approx(1.0));

  const OctahedronResult face = octahedron_check(Vec3{1.0, 0.0, 0.0});
  CHECK(face.inside);
  CHECK(face.margin == doctest::Approx(0.0));

  const OctahedronResult outside = octahedron_check(Vec3{-1.0, -1.0, -1.0});
  CHECK(!outside.inside);
  CHECK(outside.margin == doctest::Approx(-2.0));
}

TEST_CASE("closest_uncorrelated") {
  std::mt19937_64 rng(47);

  SUBCASE("product states are already uncorrelated") {
    const DensityMatrix prod =
        product_state(qubit_state(Vec3{0.0, 0.3, 0.4}), qubit_state(Vec3{0.1, 0.0, -0.5}));
    const UncorrelatedResult r = closest_uncorrelated(prod);
    CHECK(r.distance.nats <= 1e-10);
    CHECK(max_abs_diff(r.sigma_u.matrix(), prod.matrix()) <= 1e-12);
  }

  SUBCASE("Bell state sits two bits away") {
    const UncorrelatedResult r = closest_uncorrelated(pure_state(0.5));
    CHECK(r.distance.bits == doctest::Approx(2.0).epsilon(1e-10));
  }

  SUBCASE("pure Schmidt states give twice the binary entropy") {
    for (double p : {0.1, 0.4, 0.9}) {
      const UncorrelatedResult r = closest_uncorrelated(pure_state(p));
      CHECK(r.distance.nats == doctest::Approx(2.0 * binary_entropy_nats(p)).epsilon(1e-9));
    }
  }

  SUBCASE("matches the mutual information on random states") {
    for (int trial = 0; trial < 200; ++trial) {
      const DensityMatrix rho = random_state(2, 2, rng);
      const UncorrelatedResult r = closest_uncorrelated(rho);
      const double mutual =
          von_neumann_entropy(DensityMatrix(1, 2, rho.reduction(Party::A))).nats +
          von_neumann_entropy(DensityMatrix(1, 2, rho.reduction(Party::B))).nats -
          von_neumann_entropy(rho).nats;
      REQUIRE(std::abs(r.distance.nats - mutual) <= 1e-10);
    }
  }
}
