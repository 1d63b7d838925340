#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "freefall/cascade.hpp"
#include "freefall/errors.hpp"
#include "freefall/heatflow.hpp"

using namespace freefall;

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kTwoPi = 2.0 * kPi;

SolverConfig sweep_cfg(int samples = 48) {
    SolverConfig cfg;
    cfg.n_modes = 8;
    cfg.theta_samples = samples;
    return cfg;
}

EvTable synthetic_table(int n, const std::function<double(double)>& ev) {
    EvTable t;
    t.k = 1;
    t.thetas.resize(n);
    t.ev_phases.resize(n);
    t.converged.assign(n, 1);
    for (int i = 0; i < n; ++i) {
        t.thetas[i] = kTwoPi * i / n;
        t.ev_phases[i] = wrap_2pi(ev(t.thetas[i]));
    }
    return t;
}
} // namespace

TEST_CASE("phase utilities") {
    CHECK(wrap_2pi(-0.1) == doctest::Approx(kTwoPi - 0.1));
    CHECK(wrap_2pi(kTwoPi + 0.3) == doctest::Approx(0.3));
    CHECK(circ_diff(0.1, kTwoPi - 0.1) == doctest::Approx(0.2));
    CHECK(circ_diff(kTwoPi - 0.1, 0.1) == doctest::Approx(-0.2));
    CHECK(circ_dist(0.0, kPi) == doctest::Approx(kPi));
}

TEST_CASE("gf2: rank and multiplication") {
    Gf2Matrix m(3, 3);
    m.set(0, 0, true);
    m.set(0, 1, true);
    m.set(1, 1, true);
    m.set(2, 2, true);
    CHECK(m.rank() == 3);

    Gf2Matrix singular(3, 3);
    singular.set(0, 0, true);
    singular.set(1, 0, true);  // identical columns 0 and... rows dependent
    singular.set(0, 1, true);
    singular.set(1, 1, true);
    CHECK(singular.rank() == 1);

    Gf2Matrix a(2, 2), b(2, 2);
    a.set(0, 1, true);
    b.set(1, 0, true);
    const Gf2Matrix ab = a.multiply(b);
    CHECK(ab.get(0, 0));
    CHECK(!ab.get(0, 1));
    CHECK(!ab.is_zero());
    const Gf2Matrix sq = a.multiply(a);
    CHECK(sq.is_zero());
}

TEST_CASE("evaluation_map: full convergence and the expected circle map") {
    const SolverConfig cfg = sweep_cfg(48);
    const EvTable t = evaluation_map(1, cfg, /*jobs=*/2);
    REQUIRE(t.size() == 48);
    for (size_t i = 0; i < t.size(); ++i) {
        REQUIRE(static_cast<bool>(t.converged[i]));
        CHECK(t.ev_phases[i] >= 0.0);
        CHECK(t.ev_phases[i] < kTwoPi);
    }
    // the mode planes are only coupled through the scalar alpha, so the
    // unstable direction angle maps to the limit phase as theta -> -theta
    for (size_t i = 0; i < t.size(); ++i)
        CHECK(circ_dist(t.ev_phases[i], wrap_2pi(-t.thetas[i])) < 1e-9);

    // deterministic across worker counts
    const EvTable t1 = evaluation_map(1, cfg, /*jobs=*/1);
    for (size_t i = 0; i < t.size(); ++i)
        CHECK(t.ev_phases[i] == t1.ev_phases[i]);
}

TEST_CASE("evaluation_map is equivariant under time shift of the saddle") {
    SolverConfig cfg = sweep_cfg();
    const int k = 1;
    const double sigma = 0.13;
    const double dk = kTwoPi * k * sigma;          // mode-k plane rotation
    const double dk1 = kTwoPi * (k + 1) * sigma;   // saddle phase rotation
    for (double theta : {0.4, 2.0, 5.1}) {
        const FlowTrajectory base = shoot_unstable(k, theta, cfg, 0.0);
        const FlowTrajectory shifted =
            shoot_unstable(k, theta - dk, cfg, wrap_2pi(dk1));
        REQUIRE(base.converged);
        REQUIRE(shifted.converged);
        CHECK(circ_dist(*shifted.limit_phase, *base.limit_phase + dk) < 1e-9);
    }
}

TEST_CASE("select_M: admissibility on a real table") {
    const SolverConfig cfg = sweep_cfg(48);
    const EvTable t = evaluation_map(1, cfg);
    const double m_phase = 0.0;
    const double M = select_M(1, t, m_phase);
    CHECK(circ_dist(M, m_phase) > 0.1);
    CHECK(M >= 0.0);
    CHECK(M < kTwoPi);
    // ev is a degree -1 rotation-like map with no extrema: the admissible
    // phase farthest from m wins
    CHECK(circ_dist(M, m_phase) == doctest::Approx(kPi).epsilon(0.01));
}

TEST_CASE("evaluation_map: hopeless flow budget raises SweepFailure") {
    SolverConfig cfg = sweep_cfg(16);
    cfg.max_s = 0.01;  // no shot can converge in this flow time
    CHECK_THROWS_AS(evaluation_map(1, cfg, 2), SweepFailure);
}

TEST_CASE("select_M: constant table has no regular value") {
    const EvTable t = synthetic_table(64, [](double) { return 0.77; });
    CHECK_THROWS_AS(select_M(1, t, 0.0), NoRegularValue);
}

TEST_CASE("select_M: avoids extremum zones of a non-monotone table") {
    const EvTable t =
        synthetic_table(256, [](double th) { return 0.5 + 0.4 * std::sin(th); });
    const double M = select_M(1, t, /*m_phase=*/0.5);
    // critical values are 0.9 and 0.1; M must stay clear of both
    CHECK(circ_dist(M, 0.9) > 0.01);
    CHECK(circ_dist(M, 0.1) > 0.01);
    CHECK(circ_dist(M, 0.5) > 0.1);
}

TEST_CASE("select_M: impossible slope threshold leaves no admissible value") {
    const SolverConfig cfg = sweep_cfg(48);
    const EvTable t = evaluation_map(1, cfg);
    CHECK_THROWS_AS(select_M(1, t, 0.0, /*slope_tol=*/5.0), NoRegularValue);
}

TEST_CASE("count_mod2: one transversal crossing per target, odd parity") {
    const SolverConfig cfg = sweep_cfg(48);
    const EvTable t = evaluation_map(1, cfg);
    const double M = select_M(1, t, 0.0);
    const CountResult r = count_mod2(t, M, cfg);
    CHECK(r.parity == Parity::Odd);
    CHECK(r.count == 1);

    // a second admissible regular value gives the same parity
    const double M2 = wrap_2pi(M + 2.0);
    const CountResult r2 = count_mod2(t, M2, cfg);
    CHECK(r2.parity == Parity::Odd);

    // refinement against an impossible slope threshold is ambiguous
    CHECK_THROWS_AS(count_mod2(t, M, cfg, /*slope_tol=*/5.0), AmbiguousCrossing);
}

TEST_CASE("build_complex: boundary entries, dd = 0, counts recorded") {
    const SolverConfig cfg = sweep_cfg(48);
    const CascadeComplex cx = build_complex(3, cfg, /*jobs=*/2);
    REQUIRE(cx.generators.size() == 6);

    // degrees 1..6 in order m_1, M_1, m_2, M_2, m_3, M_3
    for (int d = 1; d <= 6; ++d) CHECK(cx.generators[d - 1].degree == d);

    const int m2 = cx.generator_index(GeneratorKind::Min, 2);
    const int M1 = cx.generator_index(GeneratorKind::Max, 1);
    const int m3 = cx.generator_index(GeneratorKind::Min, 3);
    const int M2 = cx.generator_index(GeneratorKind::Max, 2);
    CHECK(cx.boundary.get(M1, m2));
    CHECK(cx.boundary.get(M2, m3));

    int entries = 0;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            if (cx.boundary.get(i, j)) {
                ++entries;
                CHECK(cx.generators[i].degree == cx.generators[j].degree - 1);
            }
        }
    CHECK(entries == 2);
    CHECK(cx.boundary.multiply(cx.boundary).is_zero());
    CHECK(cx.counts.at(1) == 1);
    CHECK(cx.counts.at(2) == 1);

    // minima at phase 0, maxima elsewhere
    for (const auto& g : cx.generators)
        if (g.kind == GeneratorKind::Max) CHECK(circ_dist(g.phase, 0.0) > 0.1);
}

TEST_CASE("homology of the truncated complex: degree 1 and degree 2K survive") {
    const SolverConfig cfg = sweep_cfg(48);

    const CascadeComplex cx3 = build_complex(3, cfg, 2);
    const HomologyResult h3 = homology(cx3);
    CHECK(h3.rank(1) == 1);
    CHECK(h3.rank(6) == 1);
    for (int d : {0, 2, 3, 4, 5}) CHECK(h3.rank(d) == 0);

    const CascadeComplex cx1 = build_complex(1, cfg, 1);
    CHECK(cx1.boundary.is_zero());
    const HomologyResult h1 = homology(cx1);
    CHECK(h1.rank(1) == 1);
    CHECK(h1.rank(2) == 1);

    // the pattern persists across truncations: Z2 at degree 1 and 2K only
    for (int K : {2, 4}) {
        const HomologyResult h = homology(build_complex(K, cfg, 2));
        CHECK(h.rank(1) == 1);
        CHECK(h.rank(2 * K) == 1);
        for (int d = 0; d <= 2 * K; ++d)
            if (d != 1 && d != 2 * K) CHECK(h.rank(d) == 0);
    }

    // the degree-1 class is the minimum m_1: nothing of degree 2 hits it
    const int m1 = cx3.generator_index(GeneratorKind::Min, 1);
    for (int j = 0; j < 6; ++j) CHECK(!cx3.boundary.get(m1, j));
}

TEST_CASE("homology rejects a non-complex") {
    CascadeComplex bad;
    bad.K = 1;
    bad.generators = {
        {GeneratorKind::Min, 1, 1, 0.0},
        {GeneratorKind::Max, 1, 2, kPi},
    };
    bad.boundary = Gf2Matrix(2, 2);
    bad.boundary.set(0, 0, true);  // d m_1 = m_1: d^2 != 0
    CHECK_THROWS_AS(homology(bad), NotAComplex);
}

TEST_CASE("restricted complex reproduces the 3-sphere") {
    const SolverConfig cfg = sweep_cfg(48);
    for (int k : {1, 2, 3}) {
        const HomologyResult h = restricted_complex_check(k, cfg, 2);
        CHECK(h.rank(0) == 1);
        CHECK(h.rank(1) == 0);
        CHECK(h.rank(2) == 0);
        CHECK(h.rank(3) == 1);
    }

    // an (artificial) even count would leave classes in degrees 1 and 2
    const HomologyResult even = restricted_complex_from_parity(Parity::Even);
    CHECK(even.rank(1) == 1);
    CHECK(even.rank(2) == 1);
}
