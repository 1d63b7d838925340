#include "freefall/heatflow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "freefall/errors.hpp"

namespace freefall {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kDivergenceNormSq = 1e6;
constexpr double kActionSlack = 1e-10;
// exp() overflows near 709; alpha of this size means the state is pressed
// against the puncture and no step is meaningful.
constexpr double kMaxExponent = 500.0;

FourierLoop step_exponential(const FourierLoop& q, double h) {
    const double al = alpha(q);
    FourierLoop out(q.n_modes);
    if (std::fabs(al) * h > kMaxExponent)
        throw DomainError("step: alpha blowup near the zero loop");
    out.a0 = (q.a0 == 0.0) ? 0.0 : q.a0 * std::exp(-al * h);
    for (int i = 0; i < q.n_modes; ++i) {
        if (q.a[i] == 0.0 && q.b[i] == 0.0) continue;
        const double w = kTwoPi * (i + 1);
        const double f = std::exp(-(w * w + al) * h);
        out.a[i] = q.a[i] * f;
        out.b[i] = q.b[i] * f;
    }
    return out;
}

// Stiffness of the alpha feedback: the rank-one part of the flow Jacobian
// x (grad alpha) has the single nonzero eigenvalue 3/P^3 (alpha is homogeneous
// of degree -6 in the loop through 1/||q||^6 and degree 0 through the norm
// ratio). At a circle C_k this equals the radial Hessian eigenvalue
// 12 (2 pi k)^2, which grows like k^2 and exceeds the stability range of a
// frozen-alpha (or explicit) step of size 1e-3 from k = 3 on.
double alpha_feedback_rate(const FourierLoop& q) {
    const double p = norm_sq(q);
    return 3.0 / (p * p * p);
}

// Largest diagonal rate among modes actually present (rk4 must resolve these;
// the exponential scheme handles them exactly).
double occupied_mode_rate(const FourierLoop& q, double al) {
    double r = (q.a0 != 0.0) ? std::fabs(al) : 0.0;
    for (int i = 0; i < q.n_modes; ++i) {
        if (q.a[i] == 0.0 && q.b[i] == 0.0) continue;
        const double w = kTwoPi * (i + 1);
        r = std::max(r, std::fabs(w * w + al));
    }
    return r;
}

// Number of equal sub-steps needed to keep the basic scheme inside its
// stability region for this state.
int substep_count(const FourierLoop& q, double h, Scheme scheme) {
    double kappa = alpha_feedback_rate(q);
    double margin = 0.45;
    if (scheme == Scheme::Rk4) {
        kappa += occupied_mode_rate(q, alpha(q));
        margin = 1.5;
    }
    const double m = std::ceil(h * kappa / margin);
    if (!(m < 1e5))
        throw DomainError("step: stiffness blowup near the punctured origin");
    return std::max(1, static_cast<int>(m));
}

void axpy(FourierLoop& y, double c, const FourierLoop& x) {
    y.a0 += c * x.a0;
    const int n = std::min(y.n_modes, x.n_modes);
    for (int i = 0; i < n; ++i) {
        y.a[i] += c * x.a[i];
        y.b[i] += c * x.b[i];
    }
}

FourierLoop step_rk4(const FourierLoop& q, double h) {
    const FourierLoop k1 = flow_rhs(q);
    FourierLoop y2 = q;
    axpy(y2, 0.5 * h, k1);
    const FourierLoop k2 = flow_rhs(y2);
    FourierLoop y3 = q;
    axpy(y3, 0.5 * h, k2);
    const FourierLoop k3 = flow_rhs(y3);
    FourierLoop y4 = q;
    axpy(y4, h, k3);
    const FourierLoop k4 = flow_rhs(y4);

    FourierLoop out = q;
    axpy(out, h / 6.0, k1);
    axpy(out, h / 3.0, k2);
    axpy(out, h / 3.0, k3);
    axpy(out, h / 6.0, k4);
    return out;
}

} // namespace

FourierLoop flow_rhs(const FourierLoop& q) {
    FourierLoop g = gradient(q);
    g.a0 = -g.a0;
    for (int i = 0; i < g.n_modes; ++i) {
        g.a[i] = -g.a[i];
        g.b[i] = -g.b[i];
    }
    return g;
}

FourierLoop step(const FourierLoop& q, const SolverConfig& cfg) {
    require_punctured(q);
    const int m = substep_count(q, cfg.step, cfg.scheme);
    const double dt = cfg.step / m;
    FourierLoop out = q;
    for (int i = 0; i < m; ++i) {
        out = cfg.scheme == Scheme::SemiImplicitExponential
                  ? step_exponential(out, dt)
                  : step_rk4(out, dt);
        out.check_finite();
        if (norm_sq(out) < kZeroNormTol)
            throw DomainError("step: flow collapsed onto the zero loop");
    }
    return out;
}

FlowTrajectory integrate(const FourierLoop& q0, const SolverConfig& cfg) {
    cfg.validate();
    require_punctured(q0);

    FlowTrajectory traj;
    traj.scheme = cfg.scheme;
    traj.step_h = cfg.step;

    FourierLoop q = q0;
    double s = 0.0;
    double act = action(q);
    traj.s_grid.push_back(s);
    traj.states.push_back(q);
    traj.action_values.push_back(act);

    const auto diverged = [&](const FourierLoop& state) {
        return norm_sq(state) > kDivergenceNormSq;
    };
    if (diverged(q)) throw Divergence("integrate: initial norm beyond escape guard");

    while (true) {
        if (sup_coeff(gradient(q)) < cfg.grad_tol) {
            traj.converged = true;
            break;
        }
        if (s >= cfg.max_s) break;

        q = step(q, cfg);
        s += cfg.step;
        const double a_new = action(q);
        if (a_new > act + kActionSlack)
            throw MonotonicityError("integrate: action increased beyond slack");
        act = a_new;
        traj.s_grid.push_back(s);
        traj.states.push_back(q);
        traj.action_values.push_back(act);
        if (diverged(q)) throw Divergence("integrate: norm escape beyond 1e6");
    }

    if (traj.converged) {
        const FourierLoop& last = traj.states.back();
        int dominant = 1;
        for (int n = 2; n <= last.n_modes; ++n)
            if (mode_amplitude(last, n) > mode_amplitude(last, dominant)) dominant = n;
        traj.limit_circle = dominant;
        traj.limit_phase = project_to_circle(last, dominant);
    }
    return traj;
}

FlowTrajectory shoot_unstable(int k, double theta, const SolverConfig& cfg,
                              double base_phase) {
    if (k < 1) throw std::invalid_argument("shoot_unstable: k must be >= 1");
    if (cfg.n_modes < k + 1)
        throw std::invalid_argument("shoot_unstable: need n_modes >= k+1");
    FourierLoop q0 = expand({k + 1, base_phase}, cfg.n_modes);
    q0.cos_coeff(k) = cfg.eps_unstable * std::cos(theta);
    q0.sin_coeff(k) = cfg.eps_unstable * std::sin(theta);
    return integrate(q0, cfg);
}

double project_to_circle(const FourierLoop& q, int k) {
    if (k < 1 || k > q.n_modes)
        throw std::invalid_argument("project_to_circle: mode out of range");
    const double c = amplitude(k);
    const double amp = mode_amplitude(q, k);
    if (std::fabs(amp - c) > 0.01 * c)
        throw NotOnCircle("project_to_circle: mode-k amplitude off the circle");
    if (std::fabs(q.a0) >= 1e-4)
        throw NotOnCircle("project_to_circle: constant-mode leakage");
    for (int n = 1; n <= q.n_modes; ++n) {
        if (n == k) continue;
        if (mode_amplitude(q, n) >= 1e-4)
            throw NotOnCircle("project_to_circle: leakage in mode " + std::to_string(n));
    }
    double phi = std::atan2(-q.sin_coeff(k), q.cos_coeff(k));
    if (phi < 0.0) phi += kTwoPi;
    return phi + 0.0;  // normalizes -0
}

bool mode_interval_check(const FlowTrajectory& traj, int k_plus, int k_minus,
                         double tol) {
    if (traj.states.empty())
        throw std::invalid_argument("mode_interval_check: empty trajectory");
    for (const FourierLoop& q : traj.states) {
        if (k_plus >= 1 && std::fabs(q.a0) >= tol) return false;
        for (int n = 1; n <= q.n_modes; ++n) {
            if (n >= k_plus && n <= k_minus) continue;
            if (std::fabs(q.cos_coeff(n)) >= tol) return false;
            if (std::fabs(q.sin_coeff(n)) >= tol) return false;
        }
    }
    return true;
}

double heat_residual(const FlowTrajectory& traj) {
    if (traj.size() < 2) return 0.0;
    SolverConfig cfg;
    cfg.scheme = traj.scheme;
    cfg.step = traj.step_h;
    cfg.n_modes = traj.states.front().n_modes;
    double worst = 0.0;
    for (size_t i = 0; i + 1 < traj.size(); ++i) {
        const FourierLoop next = step(traj.states[i], cfg);
        FourierLoop diff = traj.states[i + 1];
        axpy(diff, -1.0, next);
        worst = std::max(worst, sup_coeff(diff));
    }
    return worst;
}

double fit_tail_slope(const FlowTrajectory& traj, const FourierLoop& limit,
                      double d_lo, double d_hi) {
    std::vector<double> ss, ld;
    for (size_t i = 0; i < traj.size(); ++i) {
        FourierLoop diff = traj.states[i];
        axpy(diff, -1.0, limit);
        const double d = std::sqrt(norm_sq(diff));
        if (d > d_lo && d < d_hi) {
            ss.push_back(traj.s_grid[i]);
            ld.push_back(std::log(d));
        }
    }
    if (ss.size() < 8)
        throw NonConvergence("fit_tail_slope: too few samples in the distance window");
    const size_t n = ss.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += ss[i];
        sy += ld[i];
        sxx += ss[i] * ss[i];
        sxy += ss[i] * ld[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

FlowTrajectory constant_trajectory(const CriticalPoint& cp, int n_modes,
                                   double s_len, double h) {
    if (s_len <= 0 || h <= 0)
        throw std::invalid_argument("constant_trajectory: bad window");
    FlowTrajectory traj;
    traj.scheme = Scheme::SemiImplicitExponential;
    traj.step_h = h;
    const FourierLoop q = expand(cp, n_modes);
    const int n = static_cast<int>(std::llround(s_len / h));
    const double act = action(q);
    for (int i = 0; i <= n; ++i) {
        traj.s_grid.push_back(i * h);
        traj.states.push_back(q);
        traj.action_values.push_back(act);
    }
    traj.converged = true;
    traj.limit_circle = cp.k;
    traj.limit_phase = cp.phase;
    return traj;
}

} // namespace freefall
