#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "freefall/cascade.hpp"
#include "freefall/errors.hpp"
#include "freefall/heatflow.hpp"
#include "test_support.hpp"

using namespace freefall;
using namespace freefall::test;

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kC1 = 0.60829144672079527;

// Scalar radial oracle for a one-mode-k loop of amplitude r:
// r' = -(2 (2 pi k)^2 - 4 / r^6) r, integrated with tiny RK4 steps.
double radial_oracle(int k, double r0, double s_end, double h = 1e-6) {
    const double w2 = kTwoPi * k * kTwoPi * k;
    auto rhs = [&](double r) { return -(2.0 * w2 - 4.0 / std::pow(r, 6.0)) * r; };
    double r = r0;
    const long n = std::lround(s_end / h);
    for (long i = 0; i < n; ++i) {
        const double k1 = rhs(r);
        const double k2 = rhs(r + 0.5 * h * k1);
        const double k3 = rhs(r + 0.5 * h * k2);
        const double k4 = rhs(r + h * k3);
        r += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return r;
}

FourierLoop one_mode(int k, double amp, int n_modes = 8) {
    FourierLoop q(n_modes);
    q.cos_coeff(k) = amp;
    return q;
}
} // namespace

TEST_CASE("flow_rhs: fixed points, radial attraction, diagonality") {
    for (int k = 1; k <= 4; ++k)
        CHECK(sup_coeff(flow_rhs(expand({k, 0.4 * k}, 8))) < 1e-12);

    // one-mode loops: rhs points toward the circle amplitude
    CHECK(flow_rhs(one_mode(1, 0.9 * kC1)).cos_coeff(1) > 0.0);
    CHECK(flow_rhs(one_mode(1, 1.1 * kC1)).cos_coeff(1) < 0.0);
    CHECK(std::fabs(flow_rhs(one_mode(1, kC1)).cos_coeff(1)) < 1e-12);

    // superposition of modes 1 and 3: rhs supported on modes 1 and 3 only
    FourierLoop q = expand({1, 0.0}, 8);
    const FourierLoop q3 = expand({3, 0.0}, 8);
    q.cos_coeff(3) = q3.cos_coeff(3);
    const FourierLoop r = flow_rhs(q);
    CHECK(r.cos_coeff(1) != 0.0);
    CHECK(r.cos_coeff(3) != 0.0);
    CHECK(r.a0 == 0.0);
    for (int n : {2, 4, 5, 6, 7, 8}) CHECK(mode_amplitude(r, n) == 0.0);

    CHECK_THROWS_AS(flow_rhs(FourierLoop(4)), DomainError);
}

TEST_CASE("step: critical points are fixed points of both schemes") {
    SolverConfig cfg;
    cfg.n_modes = 8;
    for (Scheme sch : {Scheme::SemiImplicitExponential, Scheme::Rk4}) {
        cfg.scheme = sch;
        for (int k : {1, 2}) {
            const FourierLoop q = expand({k, 1.1}, 8);
            const FourierLoop next = step(q, cfg);
            CHECK(std::fabs(next.cos_coeff(k) - q.cos_coeff(k)) < 1e-14);
            CHECK(std::fabs(next.sin_coeff(k) - q.sin_coeff(k)) < 1e-14);
        }
    }
}

TEST_CASE("step: modes that start exactly zero stay bitwise zero") {
    SolverConfig cfg;
    cfg.n_modes = 16;
    for (Scheme sch : {Scheme::SemiImplicitExponential, Scheme::Rk4}) {
        cfg.scheme = sch;
        const int n_steps = sch == Scheme::SemiImplicitExponential ? 10000 : 2000;
        FourierLoop q = expand({2, 0.0}, 16);
        q.cos_coeff(1) = 1e-4;
        q.sin_coeff(1) = -2e-4;
        for (int i = 0; i < n_steps; ++i) {
            q = step(q, cfg);
            CHECK(q.a0 == 0.0);
            for (int n = 3; n <= 16; ++n) {
                REQUIRE(q.cos_coeff(n) == 0.0);
                REQUIRE(q.sin_coeff(n) == 0.0);
            }
        }
    }
}

TEST_CASE("step: one-mode amplitude converges to c_1, matching the radial oracle") {
    const double r_oracle = radial_oracle(1, 0.9 * kC1, 5.0);
    CHECK(std::fabs(r_oracle - kC1) < 1e-9);

    SolverConfig cfg;
    cfg.n_modes = 4;
    FourierLoop q = one_mode(1, 0.9 * kC1, 4);
    for (int i = 0; i < 5000; ++i) q = step(q, cfg);
    CHECK(std::fabs(q.cos_coeff(1) - kC1) < 1e-9);
}

TEST_CASE("step: near-zero loops fail loudly") {
    SolverConfig cfg;
    cfg.n_modes = 4;
    FourierLoop q(4);
    q.a0 = 3e-4;  // alpha ~ -7e20: the exponential step would overflow
    CHECK_THROWS_AS(step(q, cfg), DomainError);
    CHECK_THROWS_AS(step(FourierLoop(4), cfg), DomainError);
}

TEST_CASE("integrate: radial perturbation relaxes onto C_1") {
    SolverConfig cfg;
    cfg.n_modes = 8;
    FourierLoop q0 = expand({1, 0.0}, 8);
    q0.cos_coeff(1) *= 1.05;
    const FlowTrajectory traj = integrate(q0, cfg);
    CHECK(traj.converged);
    CHECK(traj.limit_circle == 1);
    CHECK(std::fabs(mode_amplitude(traj.states.back(), 1) - kC1) < 1e-6);
    for (size_t i = 0; i + 1 < traj.size(); ++i)
        CHECK(traj.action_values[i + 1] <= traj.action_values[i] + 1e-10);
}

TEST_CASE("integrate: constant loop escapes slowly and times out") {
    SolverConfig cfg;
    cfg.n_modes = 2;
    cfg.max_s = 2.0;  // the escape is polynomial; no budget changes the outcome
    FourierLoop q0(2);
    q0.a0 = 1.0;
    const FlowTrajectory traj = integrate(q0, cfg);
    CHECK(!traj.converged);
    // a0 grows monotonically and tracks the closed form (1 + 3s)^{1/6}
    for (size_t i = 0; i + 1 < traj.size(); ++i)
        CHECK(traj.states[i + 1].a0 >= traj.states[i].a0);
    const double a_end = traj.states.back().a0;
    CHECK(rel_err(a_end, std::pow(1.0 + 3.0 * traj.s_grid.back(), 1.0 / 6.0)) < 1e-4);
}

TEST_CASE("integrate: norm escape guard raises Divergence") {
    SolverConfig cfg;
    cfg.n_modes = 2;
    FourierLoop q0(2);
    q0.a0 = 1.5e3;  // norm_sq = 2.25e6 > 1e6
    CHECK_THROWS_AS(integrate(q0, cfg), Divergence);
}

TEST_CASE("shoot_unstable: saddle connections land on C_k") {
    SolverConfig cfg;
    cfg.n_modes = 16;
    const FlowTrajectory t0 = shoot_unstable(1, 0.0, cfg);
    CHECK(t0.converged);
    CHECK(t0.limit_circle == 1);

    const FlowTrajectory tpi = shoot_unstable(1, kPi, cfg);
    CHECK(tpi.converged);
    CHECK(tpi.limit_circle == 1);
    CHECK(circ_dist(*t0.limit_phase, *tpi.limit_phase) > 0.1);

    // the whole flow line stays inside span{mode 1, mode 2}
    CHECK(mode_interval_check(t0, 1, 2, 1e-300));
}

TEST_CASE("integrate: index-2 saddle in V_1 flows down to the minimum circle") {
    SolverConfig cfg;
    cfg.n_modes = 8;
    FourierLoop q0 = expand({2, 0.0}, 8);
    q0.cos_coeff(1) = cfg.eps_unstable * std::cos(0.3);
    q0.sin_coeff(1) = cfg.eps_unstable * std::sin(0.3);
    const FlowTrajectory traj = integrate(q0, cfg);
    CHECK(traj.converged);
    CHECK(traj.limit_circle == 1);
}

TEST_CASE("project_to_circle: inverse of expansion, leakage rejected") {
    CHECK(std::fabs(project_to_circle(expand({1, 0.3}, 8), 1) - 0.3) < 1e-12);
    CHECK(std::fabs(project_to_circle(expand({2, 5.9}, 8), 2) - 5.9) < 1e-12);

    FourierLoop q = expand({1, 0.0}, 8);
    q.cos_coeff(3) = 0.1 * amplitude(3);
    CHECK_THROWS_AS(project_to_circle(q, 1), NotOnCircle);

    FourierLoop off = expand({1, 0.0}, 8);
    off.cos_coeff(1) *= 1.05;  // 5% off the circle radius
    CHECK_THROWS_AS(project_to_circle(off, 1), NotOnCircle);
}

TEST_CASE("mode_interval_check") {
    SolverConfig cfg;
    cfg.n_modes = 8;
    const FlowTrajectory traj = shoot_unstable(1, 1.0, cfg);
    CHECK(mode_interval_check(traj, 1, 2, 1e-10));
    CHECK(mode_interval_check(traj, 1, 2, 1e-300));  // structural zeros

    FlowTrajectory leaky = traj;
    leaky.states[leaky.size() / 2].cos_coeff(3) = 0.01;
    CHECK(!mode_interval_check(leaky, 1, 2, 1e-10));

    FlowTrajectory a0_leak = traj;
    a0_leak.states[0].a0 = 1e-6;
    CHECK(!mode_interval_check(a0_leak, 1, 2, 1e-10));
    CHECK(mode_interval_check(a0_leak, 0, 2, 1e-10));
}

TEST_CASE("schemes agree at s=1 on convergent data") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> coeff(-0.5, 0.5);
    for (int trial = 0; trial < 3; ++trial) {
        FourierLoop q0(6);
        q0.cos_coeff(1) = coeff(rng) + 0.6;
        q0.sin_coeff(1) = coeff(rng);
        q0.cos_coeff(2) = coeff(rng);
        q0.sin_coeff(2) = coeff(rng);

        FourierLoop qa = q0, qb = q0;
        SolverConfig ca, cb;
        ca.n_modes = cb.n_modes = 6;
        ca.step = cb.step = 1e-4;
        ca.scheme = Scheme::SemiImplicitExponential;
        cb.scheme = Scheme::Rk4;
        for (int i = 0; i < 10000; ++i) {
            qa = step(qa, ca);
            qb = step(qb, cb);
        }
        double diff = std::fabs(qa.a0 - qb.a0);
        for (int n = 1; n <= 6; ++n) {
            diff = std::max(diff, std::fabs(qa.cos_coeff(n) - qb.cos_coeff(n)));
            diff = std::max(diff, std::fabs(qa.sin_coeff(n) - qb.sin_coeff(n)));
        }
        CHECK(diff < 1e-6);
    }
}

TEST_CASE("step-size convergence: first order (alpha freeze) vs fourth order") {
    // Slow dynamics (constant mode plus a small oscillation) keeps the
    // s=1 state in transit, so the scheme orders are visible.
    auto run = [](Scheme sch, double h) {
        SolverConfig cfg;
        cfg.n_modes = 2;
        cfg.scheme = sch;
        cfg.step = h;
        FourierLoop q(2);
        q.a0 = 1.0;
        q.cos_coeff(1) = 0.1;
        const long n = std::lround(1.0 / h);
        for (long i = 0; i < n; ++i) q = step(q, cfg);
        return q;
    };
    auto diff_norm = [](const FourierLoop& x, const FourierLoop& y) {
        double d = std::fabs(x.a0 - y.a0);
        for (int n = 1; n <= x.n_modes; ++n) {
            d = std::max(d, std::fabs(x.cos_coeff(n) - y.cos_coeff(n)));
            d = std::max(d, std::fabs(x.sin_coeff(n) - y.sin_coeff(n)));
        }
        return d;
    };

    // semi-implicit: error(h) ~ C h, so successive halvings shrink by ~2
    {
        const std::vector<double> hs = {8e-3, 4e-3, 2e-3, 1e-3};
        std::vector<double> err;
        for (double h : hs) err.push_back(diff_norm(run(Scheme::SemiImplicitExponential, h),
                                                    run(Scheme::SemiImplicitExponential, h / 2)));
        for (size_t i = 0; i + 1 < err.size(); ++i) {
            const double order = std::log2(err[i] / err[i + 1]);
            CHECK(order > 0.7);
            CHECK(order < 1.3);
        }
    }
    // rk4: error(h) ~ C h^4
    {
        const std::vector<double> hs = {2e-2, 1e-2, 5e-3};
        std::vector<double> err;
        for (double h : hs)
            err.push_back(diff_norm(run(Scheme::Rk4, h), run(Scheme::Rk4, h / 2)));
        for (size_t i = 0; i + 1 < err.size(); ++i) {
            const double order = std::log2(err[i] / err[i + 1]);
            CHECK(order > 3.5);
            CHECK(order < 4.5);
        }
    }
}

TEST_CASE("exponential tail: decay slope matches 4 pi^2 (2k+1)") {
    SolverConfig cfg;
    cfg.n_modes = 8;
    const FlowTrajectory traj = shoot_unstable(1, 0.7, cfg);
    REQUIRE(traj.converged);
    const FourierLoop limit = expand({1, *traj.limit_phase}, 8);
    const double slope = fit_tail_slope(traj, limit, 1e-8, 1e-4);
    const double want = 12.0 * kPi * kPi;  // 4 pi^2 (2k+1), k = 1
    CHECK(std::fabs(-slope - want) < 0.1 * want);
}

TEST_CASE("heat_residual: integrator output replays exactly") {
    SolverConfig cfg;
    cfg.n_modes = 8;
    const FlowTrajectory traj = shoot_unstable(1, 2.0, cfg);
    CHECK(heat_residual(traj) < 1e-12);

    FlowTrajectory tampered = traj;
    tampered.states[tampered.size() / 2].cos_coeff(1) += 1e-3;
    CHECK(heat_residual(tampered) > 1e-4);

    const FlowTrajectory cst = constant_trajectory({2, 0.5}, 8, 0.1, 1e-3);
    CHECK(heat_residual(cst) < 1e-12);
}
