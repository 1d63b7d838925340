#include "freefall/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "freefall/cascade.hpp"
#include "freefall/critical.hpp"
#include "freefall/errors.hpp"
#include "freefall/fourier_loop.hpp"
#include "freefall/heatflow.hpp"
#include "freefall/hessian.hpp"
#include "freefall/linearization.hpp"

namespace freefall {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kFourPiSq = 4.0 * kPi * kPi;

struct Reporter {
    std::ostream& out;
    int failures = 0;

    void result(int id, const std::string& name, bool ok, const std::string& detail) {
        out << (ok ? "[PASS] " : "[FAIL] ") << id << ". " << name;
        if (!detail.empty()) out << "  (" << detail << ")";
        out << "\n";
        out.flush();
        if (!ok) ++failures;
    }
};

std::string fmt(double x) {
    std::ostringstream ss;
    ss.precision(3);
    ss << std::scientific << x;
    return ss.str();
}

FourierLoop random_loop(std::mt19937_64& rng, int n_modes) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    FourierLoop q(n_modes);
    q.a0 = dist(rng);
    for (int i = 0; i < n_modes; ++i) {
        q.a[i] = dist(rng);
        q.b[i] = dist(rng);
    }
    return q;
}

void add_scaled(FourierLoop& y, double c, const FourierLoop& x) {
    y.a0 += c * x.a0;
    for (int i = 0; i < y.n_modes; ++i) {
        y.a[i] += c * x.a[i];
        y.b[i] += c * x.b[i];
    }
}

// ---------------------------------------------------------------- 1
void crit_values(Reporter& rep) {
    double worst = 0.0;
    for (int k = 1; k <= 8; ++k) {
        const double want = critical_value(k);
        for (int p = 0; p < 8; ++p) {
            const double phi = kTwoPi * p / 8.0;
            const double got = action(expand({k, phi}, 12));
            worst = std::max(worst, std::fabs(got - want) / want);
        }
    }
    rep.result(1, "critical values on C_1..C_8", worst < 1e-12,
               "max rel err " + fmt(worst) + " vs 1e-12");
}

// ---------------------------------------------------------------- 2
void spectrum_oracle(Reporter& rep) {
    const int N = 16;
    double worst_abs = 0.0, worst_phase_dev = 0.0;
    bool indices_ok = true;
    for (int k = 1; k <= 4; ++k) {
        std::vector<double> closed;
        for (const auto& p : spectrum_closed_form(k, N).eigenpairs)
            for (int m = 0; m < p.multiplicity; ++m) closed.push_back(p.value);
        std::sort(closed.begin(), closed.end());

        std::vector<double> base;
        for (int p = 0; p < 8; ++p) {
            const double phi = kTwoPi * p / 8.0;
            const HessianSpectrumReport r = spectrum_numeric({k, phi}, N);
            std::vector<double> got;
            for (const auto& e : r.eigenpairs)
                for (int m = 0; m < e.multiplicity; ++m) got.push_back(e.value);
            std::sort(got.begin(), got.end());
            if (got.size() != closed.size()) {
                indices_ok = false;
                continue;
            }
            for (size_t i = 0; i < got.size(); ++i)
                worst_abs = std::max(worst_abs, std::fabs(got[i] - closed[i]));
            if (r.morse_index != 2 * k - 1 || r.nullity != 1) indices_ok = false;
            if (p == 0) {
                base = got;
            } else {
                for (size_t i = 0; i < got.size(); ++i)
                    worst_phase_dev =
                        std::max(worst_phase_dev, std::fabs(got[i] - base[i]));
            }
        }
    }
    const bool ok = indices_ok && worst_abs < 1e-6 && worst_phase_dev < 1e-8;
    rep.result(2, "Hessian spectrum: numeric vs closed form, trivial bundle", ok,
               "max |dev| " + fmt(worst_abs) + " vs 1e-6, phase spread " +
                   fmt(worst_phase_dev) + " vs 1e-8");
}

// ---------------------------------------------------------------- 3
void fd_consistency(Reporter& rep, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ph(0.0, kTwoPi);

    double worst1 = 0.0;
    int done = 0;
    while (done < 100) {
        const FourierLoop q = random_loop(rng, 6);
        if (norm_sq(q) <= 0.1) continue;
        ++done;
        const FourierLoop xi = random_loop(rng, 6);
        const double tau = 1e-5;
        FourierLoop qp = q, qm = q;
        add_scaled(qp, tau, xi);
        add_scaled(qm, -tau, xi);
        const double fd = (action(qp) - action(qm)) / (2.0 * tau);
        const double pairing = inner_metric(gradient(q), xi, q);
        worst1 = std::max(worst1, std::fabs(fd - pairing) /
                                      std::max(1.0, std::fabs(pairing)));
    }

    double worst2 = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int k = 1 + static_cast<int>(rng() % 4);
        const CriticalPoint cp{k, ph(rng)};
        const FourierLoop q = expand(cp, 6);
        const FourierLoop xi = random_loop(rng, 6);
        const double tau = 1e-4;
        FourierLoop qp = q, qm = q;
        add_scaled(qp, tau, xi);
        add_scaled(qm, -tau, xi);
        const double fd =
            (action(qp) - 2.0 * action(q) + action(qm)) / (tau * tau);
        const double pairing = inner_metric(hessian_apply(cp, xi), xi, q);
        worst2 = std::max(worst2, std::fabs(fd - pairing) /
                                      std::max(1.0, std::fabs(pairing)));
    }
    const bool ok = worst1 < 1e-6 && worst2 < 1e-4;
    rep.result(3, "gradient and Hessian vs finite differences", ok,
               "first order " + fmt(worst1) + " vs 1e-6, second order " +
                   fmt(worst2) + " vs 1e-4");
}

// ---------------------------------------------------------------- 4 + 5
void flow_invariants_and_tails(Reporter& rep) {
    bool monotone = true, interval = true, amplitude_ok = true, all_converged = true;
    double worst_amp = 0.0;
    double tail_dev[2] = {0.0, 0.0};
    bool tail_ok = true;

    for (int k = 1; k <= 2; ++k) {
        SolverConfig cfg;
        cfg.n_modes = 32;
        for (int i = 0; i < 25; ++i) {
            const double theta = kTwoPi * i / 25.0;
            const FlowTrajectory traj = shoot_unstable(k, theta, cfg);
            if (!traj.converged || traj.limit_circle != k) {
                all_converged = false;
                continue;
            }
            for (size_t j = 0; j + 1 < traj.size(); ++j)
                if (traj.action_values[j + 1] > traj.action_values[j] + 1e-10)
                    monotone = false;
            if (!mode_interval_check(traj, k, k + 1, 1e-300)) interval = false;
            const double amp_err =
                std::fabs(mode_amplitude(traj.states.back(), k) - amplitude(k));
            worst_amp = std::max(worst_amp, amp_err);
            if (amp_err >= 1e-6) amplitude_ok = false;

            if (i == 3) {
                const FourierLoop limit = expand({k, *traj.limit_phase}, 32);
                const double slope = fit_tail_slope(traj, limit, 1e-8, 1e-4);
                const double want = kFourPiSq * (2.0 * k + 1.0);
                tail_dev[k - 1] = std::fabs(-slope - want) / want;
                if (tail_dev[k - 1] >= 0.1) tail_ok = false;
            }
        }
    }
    const bool ok4 = monotone && interval && amplitude_ok && all_converged;
    rep.result(4, "flow invariants on 50 shot trajectories (k=1,2)", ok4,
               std::string("monotone=") + (monotone ? "yes" : "NO") +
                   ", V_k zeros=" + (interval ? "exact" : "BROKEN") +
                   ", max amp err " + fmt(worst_amp) + " vs 1e-6");
    rep.result(5, "exponential tail rate 4pi^2(2k+1)", tail_ok,
               "rel dev k=1: " + fmt(tail_dev[0]) + ", k=2: " + fmt(tail_dev[1]) +
                   " vs 0.1");
}

// ---------------------------------------------------------------- 6
void parity_invariance(Reporter& rep, unsigned jobs) {
    bool all_odd = true;
    std::string detail;
    for (int k = 1; k <= 2; ++k) {
        SolverConfig cfg;
        cfg.n_modes = 32;
        cfg.theta_samples = 720;

        const EvTable base = evaluation_map(k, cfg, jobs);
        const double M = select_M(k, base, 0.0);
        std::vector<Parity> parities;
        std::vector<int> counts;

        const CountResult r0 = count_mod2(base, M, cfg);
        parities.push_back(r0.parity);
        counts.push_back(r0.count);

        {  // doubled resolution
            SolverConfig c2 = cfg;
            c2.theta_samples = 1440;
            const EvTable t = evaluation_map(k, c2, jobs);
            parities.push_back(count_mod2(t, select_M(k, t, 0.0), c2).parity);
        }
        {  // 10x offset
            SolverConfig c2 = cfg;
            c2.eps_unstable = 1e-3;
            const EvTable t = evaluation_map(k, c2, jobs);
            parities.push_back(count_mod2(t, select_M(k, t, 0.0), c2).parity);
        }
        {  // integrator swap
            SolverConfig c2 = cfg;
            c2.scheme = Scheme::Rk4;
            const EvTable t = evaluation_map(k, c2, jobs);
            parities.push_back(count_mod2(t, select_M(k, t, 0.0), c2).parity);
        }
        {  // second regular value on the base table
            double M2 = wrap_2pi(M + 2.0);
            for (double cand = 0.0; !is_regular_target(base, M2, 0.0) && cand < kTwoPi;
                 cand += 0.05)
                M2 = wrap_2pi(M + 2.0 + cand);
            parities.push_back(count_mod2(base, M2, cfg).parity);
        }

        for (Parity p : parities)
            if (p != Parity::Odd) all_odd = false;
        detail += "pair " + std::to_string(k) + ": count " +
                  std::to_string(counts[0]) + ", parities " +
                  std::to_string(parities.size()) + "x odd? " +
                  (std::all_of(parities.begin(), parities.end(),
                               [](Parity p) { return p == Parity::Odd; })
                       ? "yes"
                       : "NO") +
                  (k == 1 ? "; " : "");
    }
    rep.result(6, "connection parity odd and invariant (resolution, offset, scheme, target)",
               all_odd, detail);
}

// ---------------------------------------------------------------- 7
void restricted_homology(Reporter& rep, unsigned jobs) {
    bool ok = true;
    std::string detail;
    for (int k = 1; k <= 2; ++k) {
        SolverConfig cfg;
        cfg.n_modes = 32;
        cfg.theta_samples = 360;
        try {
            const HomologyResult h = restricted_complex_check(k, cfg, jobs);
            const bool good = h.rank(0) == 1 && h.rank(1) == 0 && h.rank(2) == 0 &&
                              h.rank(3) == 1;
            if (!good) ok = false;
            detail += "k=" + std::to_string(k) + ": (" + std::to_string(h.rank(0)) +
                      "," + std::to_string(h.rank(1)) + "," +
                      std::to_string(h.rank(2)) + "," + std::to_string(h.rank(3)) +
                      ")" + (k == 1 ? " " : "");
        } catch (const Error& e) {
            ok = false;
            detail += std::string("k=") + std::to_string(k) + ": " + e.what() + " ";
        }
    }
    rep.result(7, "restricted V_k complex reproduces the 3-sphere", ok,
               detail + "want (1,0,0,1)");
}

// ---------------------------------------------------------------- 8
void truncated_homology(Reporter& rep, unsigned jobs) {
    const int K = 5;
    SolverConfig cfg;
    cfg.n_modes = 32;
    cfg.theta_samples = 720;
    try {
        const CascadeComplex cx = build_complex(K, cfg, jobs);
        const HomologyResult h = homology(cx);
        bool ok = h.rank(1) == 1 && h.rank(2 * K) == 1;
        for (int d = 0; d <= 2 * K; ++d)
            if (d != 1 && d != 2 * K && h.rank(d) != 0) ok = false;

        // the degree-1 class is the bottom minimum: d(m_1) = 0 and no
        // degree-2 boundary reaches it
        const int m1 = cx.generator_index(GeneratorKind::Min, 1);
        const int M1 = cx.generator_index(GeneratorKind::Max, 1);
        for (int i = 0; i < cx.boundary.rows(); ++i)
            if (cx.boundary.get(i, m1)) ok = false;
        if (cx.boundary.get(m1, M1)) ok = false;

        std::string betti = "betti:";
        for (const auto& [d, r] : h.ranks)
            betti += " " + std::to_string(d) + "->" + std::to_string(r);
        rep.result(8, "truncated cascade homology (K=5): Z2 at degree 1 and 2K", ok,
                   betti + "; degree-2K class is the truncation artifact");
    } catch (const Error& e) {
        rep.result(8, "truncated cascade homology (K=5)", false, e.what());
    }
}

// ---------------------------------------------------------------- 9
void linearization_checks(Reporter& rep, uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    auto bump = [](double s, double lo, double hi) {
        if (s <= lo || s >= hi) return 0.0;
        const double x = (s - lo) / (hi - lo);
        return std::exp(-1.0 / (x * (1.0 - x)) + 4.0);
    };
    auto field = [&](const FlowTrajectory& u, const FourierLoop& a,
                     const FourierLoop& b, double lo, double hi) {
        CylinderField f;
        f.s_grid = u.s_grid;
        f.support = {lo, hi};
        for (double s : u.s_grid) {
            FourierLoop v(a.n_modes);
            const double w1 = bump(s, lo, hi);
            const double w2 = w1 * std::sin(7.0 * s);
            v.a0 = w1 * a.a0 + w2 * b.a0;
            for (int i = 0; i < v.n_modes; ++i) {
                v.a[i] = w1 * a.a[i] + w2 * b.a[i];
                v.b[i] = w1 * a.b[i] + w2 * b.b[i];
            }
            f.values.push_back(std::move(v));
        }
        return f;
    };

    // fd_check orders on a genuine rk4 connection
    SolverConfig cfg;
    cfg.n_modes = 8;
    cfg.scheme = Scheme::Rk4;
    const FlowTrajectory u = shoot_unstable(1, 0.8, cfg);
    const double lo = 0.1 * u.s_grid.back(), hi = 0.8 * u.s_grid.back();
    const CylinderField xi = field(u, random_loop(rng, 8), random_loop(rng, 8), lo, hi);
    const CylinderField eta = field(u, random_loop(rng, 8), random_loop(rng, 8), lo, hi);

    const double d3 = fd_check(u, xi, 1e-3);
    const double d4 = fd_check(u, xi, 1e-4);
    const double d5 = fd_check(u, xi, 1e-5);
    const double order_ratio = d3 / std::max(d4, 1e-300);
    const bool fd_ok = d5 < 1e-5 && order_ratio > 30.0 && order_ratio < 300.0;

    // adjoint defect on constant and genuine trajectories, h-refinement
    // (the same field functions sampled on each grid)
    const FlowTrajectory cst = constant_trajectory({1, 0.3}, 8, 0.4, 1e-3);
    const CylinderField cxi =
        field(cst, random_loop(rng, 8), random_loop(rng, 8), 0.05, 0.35);
    const CylinderField ceta =
        field(cst, random_loop(rng, 8), random_loop(rng, 8), 0.05, 0.35);
    const double a_const = adjoint_check(cst, cxi, ceta);

    const FourierLoop xi_a = random_loop(rng, 8), xi_b = random_loop(rng, 8);
    const FourierLoop eta_a = random_loop(rng, 8), eta_b = random_loop(rng, 8);
    const double a_h = adjoint_check(u, field(u, xi_a, xi_b, lo, hi),
                                     field(u, eta_a, eta_b, lo, hi));
    SolverConfig cfg2 = cfg;
    cfg2.step = 5e-4;
    const FlowTrajectory u2 = shoot_unstable(1, 0.8, cfg2);
    const double a_h2 = adjoint_check(u2, field(u2, xi_a, xi_b, lo, hi),
                                      field(u2, eta_a, eta_b, lo, hi));
    const bool adj_ok = a_const < 1e-3 && a_h < 1e-3 && a_h2 <= 0.3 * a_h + 1e-12;

    // mode-interval closure: zeroing the V_1 modes of the field cannot
    // change the output outside V_1
    CylinderField xi_out = xi;
    for (auto& v : xi_out.values) {
        v.cos_coeff(1) = v.sin_coeff(1) = 0.0;
        v.cos_coeff(2) = v.sin_coeff(2) = 0.0;
    }
    const CylinderField full = apply_D(u, xi);
    const CylinderField only = apply_D(u, xi_out);
    double closure = 0.0;
    for (size_t i = 0; i < full.size(); ++i) {
        closure = std::max(closure, std::fabs(full.values[i].a0 - only.values[i].a0));
        for (int n = 3; n <= 8; ++n) {
            closure = std::max(closure, std::fabs(full.values[i].cos_coeff(n) -
                                                  only.values[i].cos_coeff(n)));
            closure = std::max(closure, std::fabs(full.values[i].sin_coeff(n) -
                                                  only.values[i].sin_coeff(n)));
        }
    }
    const bool closure_ok = closure <= 1e-14;

    rep.result(9, "linearization: fd order, adjoint order, mode closure",
               fd_ok && adj_ok && closure_ok,
               "fd " + fmt(d3) + "/" + fmt(d4) + "/" + fmt(d5) + ", adjoint const " +
                   fmt(a_const) + ", genuine " + fmt(a_h) + " -> " + fmt(a_h2) +
                   ", closure " + fmt(closure));
}

// ---------------------------------------------------------------- 10
void index_bookkeeping(Reporter& rep) {
    bool ok = true;
    for (int k = 1; k <= 10; ++k) {
        if (cascade_index(GeneratorKind::Max, k) != 2 * k) ok = false;
        if (cascade_index(GeneratorKind::Min, k) != 2 * k - 1) ok = false;
        const CascadeGenerator from{GeneratorKind::Min, k + 1,
                                    cascade_index(GeneratorKind::Min, k + 1), 0.0};
        const CascadeGenerator to{GeneratorKind::Max, k,
                                  cascade_index(GeneratorKind::Max, k), 0.0};
        // the two routes of the index chain: restricted Morse data and
        // global cascade degrees
        if (fredholm_index(from, to) != 1) ok = false;
        if ((2 + 0) - (0 + 1) != fredholm_index(from, to)) ok = false;
    }
    rep.result(10, "cascade and Fredholm index chain (k=1..10)", ok,
               "index(m_{k+1}) - index(M_k) = 1");
}

} // namespace

bool run_acceptance(const AcceptanceOptions& opts, std::ostream& out) {
    const auto t0 = std::chrono::steady_clock::now();
    Reporter rep{out};

    crit_values(rep);
    spectrum_oracle(rep);
    fd_consistency(rep, opts.seed);
    flow_invariants_and_tails(rep);
    parity_invariance(rep, opts.jobs);
    restricted_homology(rep, opts.jobs);
    truncated_homology(rep, opts.jobs);
    linearization_checks(rep, opts.seed);
    index_bookkeeping(rep);

    const auto dt = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    out << (rep.failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES PRESENT")
        << " (" << rep.failures << " failed, " << dt / 1000.0 << " s)\n";
    return rep.failures == 0;
}

} // namespace freefall
