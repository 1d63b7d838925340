#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "freefall/critical.hpp"
#include "freefall/errors.hpp"
#include "test_support.hpp"

using namespace freefall;
using namespace freefall::test;

namespace {
constexpr double kC1 = 0.60829144672079527;
constexpr double kC2 = 0.48280124121392419;
constexpr double kActionQ1 = 8.1077030701904706;
constexpr double kActionQ2 = 12.870176382666154;
constexpr double kPi = 3.1415926535897932384626433832795;
} // namespace

TEST_CASE("amplitude: closed form and monotonicity") {
    CHECK(rel_err(amplitude(1), kC1) < 1e-15);
    CHECK(rel_err(amplitude(2), kC2) < 1e-15);
    CHECK(amplitude(1) > amplitude(2));
    CHECK(amplitude(2) > amplitude(3));
    for (int k = 1; k <= 20; ++k) {
        CHECK(amplitude(k) > 0.0);
        CHECK(amplitude(k) < 1.0);
    }
    CHECK_THROWS_AS(amplitude(0), std::invalid_argument);
}

TEST_CASE("expand: coefficient placement by phase") {
    const FourierLoop q = expand({1, 0.0}, 4);
    CHECK(q.cos_coeff(1) == doctest::Approx(kC1).epsilon(1e-15));
    CHECK(q.sin_coeff(1) == 0.0);
    CHECK(norm_sq(q) > 0.0);
    for (int n = 2; n <= 4; ++n) CHECK(mode_amplitude(q, n) == 0.0);

    const FourierLoop qh = expand({1, kPi / 2}, 4);
    CHECK(std::fabs(qh.cos_coeff(1)) < 1e-16);
    CHECK(qh.sin_coeff(1) == doctest::Approx(-kC1).epsilon(1e-15));

    const FourierLoop q2 = expand({2, kPi}, 4);
    CHECK(q2.cos_coeff(2) == doctest::Approx(-kC2).epsilon(1e-15));
    CHECK(std::fabs(q2.sin_coeff(2)) < 1e-15);

    CHECK_THROWS_AS(expand({3, 0.0}, 2), std::invalid_argument);
}

TEST_CASE("expand agrees with the time-shifted cosine loop") {
    // phase = 2 pi k sigma: expanding at that phase must reproduce
    // time_shift of the pure cosine loop
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int k = 1; k <= 4; ++k) {
        const double sigma = dist(rng);
        const FourierLoop shifted = time_shift(expand({k, 0.0}, 6), sigma);
        const FourierLoop direct = expand({k, 2.0 * kPi * k * sigma}, 6);
        CHECK(std::fabs(shifted.cos_coeff(k) - direct.cos_coeff(k)) < 1e-14);
        CHECK(std::fabs(shifted.sin_coeff(k) - direct.sin_coeff(k)) < 1e-14);
    }
}

TEST_CASE("critical_value: closed form, action route, phase independence") {
    CHECK(rel_err(critical_value(1), kActionQ1) < 1e-15);
    CHECK(rel_err(critical_value(2), kActionQ2) < 1e-15);
    CHECK(std::fabs(critical_value(1) - action(expand({1, 1.234}, 8))) < 1e-12);

    for (int k = 1; k <= 8; ++k) {
        for (int p = 0; p < 16; ++p) {
            const double phi = 2.0 * kPi * p / 16.0;
            const FourierLoop q = expand({k, phi}, 10);
            CHECK(sup_coeff(gradient(q)) < 1e-10);
            CHECK(rel_err(action(q), critical_value(k)) < 1e-12);
        }
        if (k > 1) CHECK(critical_value(k) > critical_value(k - 1));
    }
}

TEST_CASE("morse_index_formula") {
    CHECK(morse_index_formula(1) == 1);
    CHECK(morse_index_formula(2) == 3);
    CHECK(morse_index_formula(5) == 9);
}

TEST_CASE("find_critical: radial perturbations return to the circle") {
    const SolverConfig cfg = newton_defaults();
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> radial(-0.1, 0.1);
    for (int k = 1; k <= 4; ++k) {
        for (int trial = 0; trial < 3; ++trial) {
            const double phi = phase(rng);
            FourierLoop seed = expand({k, phi}, 8);
            const double scale = 1.0 + radial(rng);
            seed.cos_coeff(k) *= scale;
            seed.sin_coeff(k) *= scale;
            const FourierLoop q = find_critical(seed, cfg);
            CHECK(sup_coeff(gradient(q)) < cfg.grad_tol);
            CHECK(std::fabs(mode_amplitude(q, k) - amplitude(k)) < 1e-8);
            for (int n = 1; n <= 8; ++n) {
                if (n == k) continue;
                CHECK(mode_amplitude(q, n) < 1e-8);
            }
            CHECK(std::fabs(q.a0) < 1e-8);
        }
    }
}

TEST_CASE("find_critical: critical seed is a fixed point") {
    const SolverConfig cfg = newton_defaults();
    const FourierLoop seed = expand({2, 0.3}, 8);
    const FourierLoop q = find_critical(seed, cfg);
    CHECK(std::fabs(q.cos_coeff(2) - seed.cos_coeff(2)) < 1e-12);
    CHECK(std::fabs(q.sin_coeff(2) - seed.sin_coeff(2)) < 1e-12);
}

TEST_CASE("find_critical: constant seeds escape (no critical constants)") {
    // Along span{1} the gradient map is G(a0) = -a0^{-5}/2: its norm decays
    // as the iterates grow, so a root-finder follows the escape to infinite
    // norm. The scalar-ODE oracle for the flow confirms a0 only grows:
    // a0' = a0^{-5}/2 > 0, i.e. a0(s)^6 = a0(0)^6 + 3s is unbounded.
    double a0 = 1.0;
    const double h = 1e-4;
    for (int i = 0; i < 20000; ++i) {
        const double rhs1 = 0.5 * std::pow(a0, -5.0);
        const double rhs2 = 0.5 * std::pow(a0 + 0.5 * h * rhs1, -5.0);
        const double rhs3 = 0.5 * std::pow(a0 + 0.5 * h * rhs2, -5.0);
        const double rhs4 = 0.5 * std::pow(a0 + h * rhs3, -5.0);
        a0 += h / 6.0 * (rhs1 + 2.0 * rhs2 + 2.0 * rhs3 + rhs4);
    }
    const double s_end = 20000 * h;
    CHECK(a0 > 1.0);
    CHECK(rel_err(a0, std::pow(1.0 + 3.0 * s_end, 1.0 / 6.0)) < 1e-10);

    SolverConfig cfg = newton_defaults();
    FourierLoop seed(4);
    seed.a0 = 1.0;
    CHECK_THROWS_AS(find_critical(seed, cfg), NonConvergence);
}

TEST_CASE("find_critical: zero-ish seed is rejected") {
    const SolverConfig cfg = newton_defaults();
    CHECK_THROWS_AS(find_critical(FourierLoop(4), cfg), DomainError);
}
