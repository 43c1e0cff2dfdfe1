#include <doctest.h>

#include <cmath>

#include "ree/extremal.hpp"
#include "test_helpers.hpp"

using namespace ree;
using namespace ree::testing;

namespace {

DensityMatrix maximally_mixed() {
  ComplexMatrix m = ComplexMatrix::identity(4);
  m *= Complex(0.25);
  return DensityMatrix(2, 2, std::move(m));
}

// Commuting full-rank pair sharing a random eigenbasis.
std::pair<DensityMatrix, DensityMatrix> commuting_pair(std::mt19937_64& rng) {
  const ComplexMatrix u = random_unitary(4, rng);
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  auto spectrum_state = [&] {
    std::array<double, 4> w{};
    double total = 0.0;
    for (double& v : w) {
      v = unif(rng);
      total += v;
    }
    ComplexMatrix m(4, 4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        Complex s = 0.0;
        for (std::size_t k = 0; k < 4; ++k)
          s += u(i, k) * (w[k] / total) * std::conj(u(j, k));
        m(i, j) = s;
      }
    return DensityMatrix(2, 2, std::move(m));
  };
  DensityMatrix rho = spectrum_state();
  DensityMatrix sigma = spectrum_state();
  return {std::move(rho), std::move(sigma)};
}

double vec3_norm(const std::vector<double>& v) {
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

}  // namespace

TEST_CASE("g_kernel") {
  SUBCASE("hand value at (0.75, 0.25)") {
    CHECK(g_kernel(0.75, 0.25) == doctest::Approx(std::log(3.0) - 1.0).epsilon(1e-13));
  }

  SUBCASE("symmetric and nonnegative over random pairs") {
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> unif(1e-6, 1.0);
    for (int trial = 0; trial < 10000; ++trial) {
      const double a = unif(rng);
      const double b = unif(rng);
      const double g = g_kernel(a, b);
      REQUIRE(g == g_kernel(b, a));  // exact, by construction
      REQUIRE(g >= -1e-12);
    }
  }

  SUBCASE("degenerate branch and continuity") {
    CHECK(g_kernel(0.5, 0.5) == 0.0);
    CHECK(std::abs(g_kernel(0.5 + 1e-9, 0.5 - 1e-9)) <= 1e-12);
    std::mt19937_64 rng(59);
    std::uniform_real_distribution<double> unif(1e-3, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
      const double a = unif(rng);
      const double b = a * (1.0 + 1e-6);
      REQUIRE(std::abs(g_kernel(a, b)) <= 1e-9);
    }
  }
}

TEST_CASE("compute_g") {
  SUBCASE("fully degenerate sigma gives g = 0") {
    const GMatrix g = compute_g(pure_state(0.5), maximally_mixed());
    for (double v : g.entries) CHECK(v == 0.0);
  }

  SUBCASE("a (0.75, 0.25) spectrum") {
    ComplexMatrix m(2, 2);
    m(0, 0) = 0.75;
    m(1, 1) = 0.25;
    const DensityMatrix sigma(1, 2, m);
    const GMatrix g = compute_g(sigma, sigma);
    CHECK(g.entry(0, 1) == doctest::Approx(std::log(3.0) - 1.0).epsilon(1e-13));
    CHECK(g.entry(0, 0) == 0.0);
    CHECK(g.entry(1, 1) == 0.0);
  }

  SUBCASE("null-space entries are masked") {
    const GMatrix g = compute_g(pure_state(0.9), pure_closest(0.9));
    REQUIRE(g.support[0]);
    REQUIRE(g.support[1]);
    REQUIRE(!g.support[2]);
    REQUIRE(!g.support[3]);
    CHECK(g.entry(0, 1) == doctest::Approx(g_kernel(0.9, 0.1)).epsilon(1e-12));
    CHECK(g.entry(0, 2) == 0.0);
    CHECK(g.entry(2, 3) == 0.0);
  }

  SUBCASE("support violation is rejected") {
    CHECK_THROWS_AS(compute_g(pure_state(0.5), pure_closest(0.0)), SupportError);
  }

  SUBCASE("Tr(rho o g) vanishes") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 50; ++trial) {
      const DensityMatrix rho = random_state(2, 2, rng);
      const DensityMatrix sigma = random_state(2, 2, rng);
      const GMatrix g = compute_g(rho, sigma);
      const ComplexMatrix rho_tilde =
          g.basis.vectors.adjoint() * rho.matrix() * g.basis.vectors;
      Complex tr = 0.0;
      for (std::size_t i = 0; i < 4; ++i) tr += rho_tilde(i, i) * g.entry(i, i);
      REQUIRE(std::abs(tr) <= 1e-12);
    }
  }
}

TEST_CASE("filter_residual") {
  SUBCASE("pure state against its dephasing") {
    for (Party party : {Party::A, Party::B}) {
      const ConditionReport r = filter_residual(pure_state(0.9), pure_closest(0.9), party);
      CHECK(r.filter_residual <= 1e-12);
      CHECK(r.unitary_residual <= 1e-12);
      CHECK(r.filter_satisfied);
      CHECK(vec3_norm(r.g_vec) <= 1e-12);
    }
  }

  SUBCASE("sigma = rho for a full-rank PPT state") {
    std::mt19937_64 rng(67);
    int found = 0;
    while (found < 5) {
      const DensityMatrix rho = random_state(2, 2, rng);
      if (!ppt_check(rho).is_ppt) continue;
      ++found;
      for (Party party : {Party::A, Party::B}) {
        const ConditionReport r = filter_residual(rho, rho, party);
        REQUIRE(r.filter_residual <= 1e-12);
        REQUIRE(r.unitary_residual <= 1e-12);
      }
    }
  }

  SUBCASE("Bell state against the maximally mixed state") {
    const ConditionReport r = filter_residual(pure_state(0.5), maximally_mixed(), Party::B);
    CHECK(r.filter_residual <= 1e-12);
  }

  SUBCASE("matrix and Bloch forms agree in d = 2") {
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 100; ++trial) {
      const DensityMatrix rho = random_state(2, 2, rng);
      const DensityMatrix sigma = random_state(2, 2, rng);
      for (Party party : {Party::A, Party::B}) {
        const ConditionReport r = filter_residual(rho, sigma, party);
        double norm2 = 0.0;
        for (int k = 0; k < 3; ++k) {
          const double d = r.s[k] - r.r[k] - r.g_vec[k];
          norm2 += d * d;
        }
        REQUIRE(std::abs(r.filter_residual - std::sqrt(norm2 / 2.0)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("unitary_residual") {
  SUBCASE("commuting Bell-diagonal pair") {
    const ConditionReport r = unitary_residual(bell_diagonal(0.75, 0.25, 0.0, 0.0),
                                               bell_diagonal(0.5, 0.5, 0.0, 0.0), Party::B);
    CHECK(r.unitary_residual <= 1e-12);
    CHECK(r.unitary_satisfied);
  }

  SUBCASE("pure state against its dephasing") {
    const ConditionReport r = unitary_residual(pure_state(0.9), pure_closest(0.9), Party::A);
    CHECK(r.unitary_residual <= 1e-12);
  }

  SUBCASE("a seeded non-commuting pair is far from stationary") {
    std::mt19937_64 rng(73);
    const DensityMatrix rho = random_state(2, 2, rng);
    const DensityMatrix sigma = random_state(2, 2, rng);
    const ConditionReport ra = unitary_residual(rho, sigma, Party::A);
    const ConditionReport rb = unitary_residual(rho, sigma, Party::B);
    CHECK(std::max(ra.unitary_residual, rb.unitary_residual) > 1e-3);
  }

  SUBCASE("partial-trace route matches the eigenbasis route") {
    std::mt19937_64 rng(79);
    for (int trial = 0; trial < 50; ++trial) {
      const DensityMatrix rho = random_state(2, 2, rng);
      DensityMatrix raw = random_state(2, 2, rng);
      ComplexMatrix mixed = raw.matrix();
      mixed *= Complex(0.9);
      ComplexMatrix eye = ComplexMatrix::identity(4);
      eye *= Complex(0.025);
      mixed += eye;
      const DensityMatrix sigma(2, 2, mixed);  // full rank

      const ComplexMatrix log_sigma = matrix_function(sigma.matrix(), SpectralFn::Log, true);
      const ComplexMatrix comm = rho.matrix() * log_sigma - log_sigma * rho.matrix();
      for (Party party : {Party::A, Party::B}) {
        const double direct =
            partial_trace(comm, 2, 2, party == Party::A ? Party::B : Party::A).frobenius_norm();
        const ConditionReport r = unitary_residual(rho, sigma, party);
        REQUIRE(std::abs(direct - r.unitary_residual) <= 1e-10);
      }
    }
  }

  SUBCASE("the h vector reproduces the residual in d = 2") {
    std::mt19937_64 rng(83);
    const DensityMatrix rho = random_state(2, 2, rng);
    const DensityMatrix sigma = random_state(2, 2, rng);
    const ConditionReport r = unitary_residual(rho, sigma, Party::B);
    // ([rho, log sigma])_B = (i/2) h.sigma has Frobenius norm |h|/sqrt(2).
    CHECK(std::abs(r.unitary_residual - vec3_norm(r.h) / std::sqrt(2.0)) <= 1e-12);
  }
}

TEST_CASE("condition reports work for mixed local dimensions") {
  // 2x3 commuting pair sharing an eigenbasis: both residuals collapse.
  std::mt19937_64 rng(151);
  const ComplexMatrix u = random_unitary(6, rng);
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  auto spectrum_state = [&] {
    std::array<double, 6> w{};
    double total = 0.0;
    for (double& v : w) {
      v = unif(rng);
      total += v;
    }
    ComplexMatrix m(6, 6);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 6; ++j) {
        Complex s = 0.0;
        for (std::size_t k = 0; k < 6; ++k) s += u(i, k) * (w[k] / total) * std::conj(u(j, k));
        m(i, j) = s;
      }
    return DensityMatrix(2, 3, std::move(m));
  };
  const DensityMatrix rho = spectrum_state();
  const DensityMatrix sigma = spectrum_state();

  for (Party party : {Party::A, Party::B}) {
    const ConditionReport r = filter_residual(rho, sigma, party);
    REQUIRE(r.unitary_residual <= 1e-10);
    // g reductions vanish for commuting pairs; what remains is the Bloch
    // mismatch of the reductions.
    const std::size_t dx = party == Party::A ? 2 : 3;
    REQUIRE(r.s.size() == dx * dx - 1);
    double sr = 0.0;
    for (std::size_t k = 0; k < r.s.size(); ++k)
      sr += (r.s[k] - r.r[k]) * (r.s[k] - r.r[k]);
    REQUIRE(std::abs(r.filter_residual - std::sqrt(sr / 2.0)) <= 1e-10);
  }

  CHECK(category_classify(rho, sigma) == Category::CategoryI);
}

TEST_CASE("commuting full-rank pairs collapse the conditions") {
  std::mt19937_64 rng(89);
  for (int trial = 0; trial < 25; ++trial) {
    const auto [rho, sigma] = commuting_pair(rng);
    for (Party party : {Party::A, Party::B}) {
      const ConditionReport r = filter_residual(rho, sigma, party);
      double sr = 0.0;
      for (int k = 0; k < 3; ++k) sr += (r.s[k] - r.r[k]) * (r.s[k] - r.r[k]);
      REQUIRE(std::abs(r.filter_residual - std::sqrt(sr / 2.0)) <= 1e-10);
      REQUIRE(vec3_norm(r.g_vec) <= 1e-10);
      REQUIRE(r.unitary_residual <= 1e-10);
    }
  }
}

TEST_CASE("weak_constraint_residual") {
  SUBCASE("Bell-diagonal pair satisfies everything") {
    const WeakConstraintReport r = weak_constraint_residual(bell_diagonal(0.75, 0.25, 0.0, 0.0),
                                                            bell_diagonal(0.5, 0.5, 0.0, 0.0));
    CHECK(r.reduction_diff_a <= 1e-12);
    CHECK(r.reduction_diff_b <= 1e-12);
    CHECK(r.commutator_reduction_a <= 1e-12);
    CHECK(r.commutator_reduction_b <= 1e-12);
    REQUIRE(r.has_tau_t);
    for (double v : r.tau_t_residuals) CHECK(std::abs(v) <= 1e-12);
  }

  SUBCASE("an off-diagonal tau against distinct t is flagged") {
    // rho = pure(0.9) has t = diag(0.6, -0.6, 1). sigma mixes the dephased
    // state toward white noise and adds tau_12 = 0.08.
    const DensityMatrix rho = pure_state(0.9);
    HilbertSchmidtForm hs;
    hs.r_a = {0.0, 0.0, 0.8 * 0.8};
    hs.r_b = {0.0, 0.0, 0.8 * 0.8};
    hs.t[2][2] = 0.8;
    hs.t[0][1] = 0.08;
    const DensityMatrix sigma = from_hilbert_schmidt(hs);

    const WeakConstraintReport r = weak_constraint_residual(rho, sigma);
    REQUIRE(r.has_tau_t);
    // Pair (1,2): t_11 tau_12 - t_22 tau_21 = 0.6 * 0.08.
    CHECK(r.tau_t_residuals[0] == doctest::Approx(0.048).epsilon(1e-12));
    // Second equation of the pair: tau_12 t_22 - tau_21 t_11 = -0.6 * 0.08.
    CHECK(r.tau_t_residuals[1] == doctest::Approx(-0.048).epsilon(1e-12));
  }

  SUBCASE("degenerate t with symmetric tau passes") {
    const DensityMatrix rho = werner(0.3);  // t = beta I, fully degenerate
    const HilbertSchmidtForm base = to_hilbert_schmidt(rho);
    HilbertSchmidtForm hs = base;
    hs.t[0][1] = 0.05;
    hs.t[1][0] = 0.05;
    const DensityMatrix sigma = from_hilbert_schmidt(hs);
    const WeakConstraintReport r = weak_constraint_residual(rho, sigma);
    REQUIRE(r.has_tau_t);
    for (double v : r.tau_t_residuals) CHECK(std::abs(v) <= 1e-12);
  }

  SUBCASE("non-canonical rho is rejected for the tau/t check") {
    HilbertSchmidtForm hs;
    hs.t[0][1] = 0.3;
    hs.t[1][0] = 0.3;
    hs.t[2][2] = 0.2;
    const DensityMatrix rho = from_hilbert_schmidt(hs);
    CHECK_THROWS_AS(weak_constraint_residual(rho, werner(0.2)), InputError);
    CHECK_NOTHROW(weak_constraint_residual(rho, werner(0.2), false));
  }

  SUBCASE("equation count in d x d") {
    CHECK(full_condition_equation_count(2) == 12);
    CHECK(full_condition_equation_count(3) == 32);
  }
}

TEST_CASE("category_classify") {
  SUBCASE("commuting Bell-diagonal pair is category (i)") {
    CHECK(category_classify(bell_diagonal(0.75, 0.25, 0.0, 0.0),
                            bell_diagonal(0.5, 0.5, 0.0, 0.0)) == Category::CategoryI);
  }

  SUBCASE("isotropic d = 3 pair is category (i)") {
    CHECK(category_classify(isotropic(3, 0.9), isotropic(3, 1.0 / 3.0)) == Category::CategoryI);
  }

  SUBCASE("pure state with its dephasing is category (ii)") {
    CHECK(category_classify(pure_state(0.9), pure_closest(0.9)) == Category::CategoryII);
  }

  SUBCASE("maximally correlated d = 3 pure state is category (ii)") {
    const std::vector<Complex> amps{Complex(0.6, 0.0), Complex(0.64, 0.0), Complex(0.48, 0.0)};
    const DensityMatrix rho = maximally_correlated(amps);
    ComplexMatrix diag(9, 9);
    diag(0, 0) = 0.36;
    diag(4, 4) = 0.4096;
    diag(8, 8) = 0.2304;
    const DensityMatrix sigma(3, 3, std::move(diag));
    CHECK(category_classify(rho, sigma) == Category::CategoryII);
  }

  SUBCASE("coherence with vanishing cross reductions is constraint_only") {
    // sigma diagonal with distinct weights on |00> and |11>; rho carries
    // coherence only between them, so every eigenpair satisfies the
    // constraint while the commutator and the |00><01|-type reductions keep
    // both categories out.
    ComplexMatrix sm(4, 4);
    sm(0, 0) = 0.4;
    sm(1, 1) = 0.2;
    sm(2, 2) = 0.1;
    sm(3, 3) = 0.3;
    const DensityMatrix sigma(2, 2, std::move(sm));

    ComplexMatrix rm = ComplexMatrix::identity(4);
    rm *= Complex(0.3 * 0.25);
    rm(0, 0) += 0.35;
    rm(3, 3) += 0.35;
    rm(0, 3) += 0.35;
    rm(3, 0) += 0.35;
    const DensityMatrix rho(2, 2, std::move(rm));

    CHECK(category_classify(rho, sigma) == Category::ConstraintOnly);
  }

  SUBCASE("a generic pair is none") {
    std::mt19937_64 rng(97);
    const DensityMatrix rho = random_state(2, 2, rng);
    const DensityMatrix sigma = random_state(2, 2, rng);
    CHECK(category_classify(rho, sigma) == Category::None);
  }

  SUBCASE("classified pairs have vanishing g reductions") {
    struct Pair {
      DensityMatrix rho;
      DensityMatrix sigma;
    };
    std::vector<Pair> pairs;
    pairs.push_back({bell_diagonal(0.75, 0.25, 0.0, 0.0), bell_diagonal(0.5, 0.5, 0.0, 0.0)});
    pairs.push_back({pure_state(0.9), pure_closest(0.9)});
    for (const Pair& p : pairs) {
      REQUIRE(category_classify(p.rho, p.sigma) != Category::None);
      for (Party party : {Party::A, Party::B}) {
        const ConditionReport r = filter_residual(p.rho, p.sigma, party);
        REQUIRE(vec3_norm(r.g_vec) <= 1e-9);
      }
    }
  }
}

TEST_CASE("filter_perturbation_scan") {
  SUBCASE("stationary at the pure-state minimizer for any direction") {
    std::mt19937_64 rng(101);
    const DensityMatrix rho = pure_state(0.9);
    const DensityMatrix sigma = pure_closest(0.9);
    const std::vector<Vec3> dirs{{1.0, 0.0, 0.0},
                                 {0.0, 1.0, 0.0},
                                 {0.0, 0.0, 1.0},
                                 random_unit_vec3(rng),
                                 random_unit_vec3(rng)};
    for (const Vec3& n : dirs)
      for (Party party : {Party::A, Party::B}) {
        const PerturbationScan scan = filter_perturbation_scan(rho, sigma, party, n, {});
        REQUIRE(std::abs(scan.derivative) <= 1e-5);
        REQUIRE(std::abs(scan.analytic_derivative) <= 1e-9);
      }
  }

  SUBCASE("degenerate sigma exposes the bare Bloch mismatch") {
    const PerturbationScan scan = filter_perturbation_scan(
        pure_state(0.9), maximally_mixed(), Party::B, Vec3{0.0, 0.0, 1.0}, {-0.1, 0.0, 0.1});
    CHECK(scan.derivative == doctest::Approx(-0.8).epsilon(1e-6));
    CHECK(scan.analytic_derivative == doctest::Approx(-0.8).epsilon(1e-10));
    CHECK(scan.entropies_nats.size() == 3);
  }

  SUBCASE("Bell state against white noise is flat") {
    const PerturbationScan scan = filter_perturbation_scan(
        pure_state(0.5), maximally_mixed(), Party::B, Vec3{0.0, 1.0, 0.0}, {});
    CHECK(std::abs(scan.derivative) <= 1e-9);
  }

  SUBCASE("support loss at a grid point is an error naming t") {
    try {
      filter_perturbation_scan(pure_state(0.9), pure_closest(0.9), Party::B,
                               Vec3{1.0, 0.0, 0.0}, {0.5});
      FAIL("expected SupportError");
    } catch (const SupportError& e) {
      CHECK(std::string(e.what()).find("0.5") != std::string::npos);
    }
  }

  SUBCASE("direction must be normalized") {
    CHECK_THROWS_AS(filter_perturbation_scan(pure_state(0.9), pure_closest(0.9), Party::B,
                                             Vec3{1.0, 1.0, 0.0}, {}),
                    InputError);
  }

  SUBCASE("matches the first-order expression on random full-rank pairs") {
    std::mt19937_64 rng(103);
    for (int trial = 0; trial < 20; ++trial) {
      const DensityMatrix rho = random_state(2, 2, rng);
      DensityMatrix raw = random_state(2, 2, rng);
      ComplexMatrix mixed = raw.matrix();
      mixed *= Complex(0.85);
      ComplexMatrix eye = ComplexMatrix::identity(4);
      eye *= Complex(0.15 * 0.25);
      mixed += eye;
      const DensityMatrix sigma(2, 2, mixed);
      const Vec3 n = random_unit_vec3(rng);
      for (Party party : {Party::A, Party::B}) {
        const PerturbationScan scan = filter_perturbation_scan(rho, sigma, party, n, {});
        REQUIRE(std::abs(scan.derivative - scan.analytic_derivative) <= 1e-5);
      }
    }
  }
}

TEST_CASE("bures_residual") {
  SUBCASE("maximally mixed against itself") {
    CHECK(std::abs(bures_residual(maximally_mixed(), maximally_mixed(), Party::B,
                                  Vec3{0.0, 0.0, 1.0})) <= 1e-12);
  }

  SUBCASE("Bell-diagonal rho against white noise") {
    const DensityMatrix rho = bell_diagonal(0.7, 0.1, 0.1, 0.1);
    for (const Vec3& n : {Vec3{1.0, 0.0, 0.0}, Vec3{0.0, 0.0, 1.0}}) {
      CHECK(std::abs(bures_residual(rho, maximally_mixed(), Party::B, n)) <= 1e-12);
    }
  }

  SUBCASE("pure(0.9) against white noise along z") {
    const double r = bures_residual(pure_state(0.9), maximally_mixed(), Party::B,
                                    Vec3{0.0, 0.0, 1.0});
    CHECK(r == doctest::Approx(-0.2).epsilon(1e-12));
  }

  SUBCASE("singular sigma is rejected") {
    CHECK_THROWS_AS(
        bures_residual(pure_state(0.9), pure_closest(0.9), Party::B, Vec3{0.0, 0.0, 1.0}),
        SingularityError);
  }
}
