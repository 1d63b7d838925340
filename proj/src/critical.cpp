#include "freefall/critical.hpp"

#include <cmath>
#include <stdexcept>

#include "freefall/errors.hpp"
#include "freefall/la.hpp"

namespace freefall {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kTwoPi = 2.0 * kPi;

// Iterates whose norm_sq leaves [kCollapseNormSq, kEscapeNormSq] are given up
// on: below is the puncture, above the gradient flattens toward the escape at
// infinite norm and a root-finder follows it until the flat gradient passes
// for convergence. Every critical circle has norm_sq < 0.2, so the upper
// guard trips long before the gradient sup-norm can decay below tolerance
// (at norm_sq = 1e2 the flat-direction gradient is still ~5e-6).
constexpr double kCollapseNormSq = 1e-10;
constexpr double kEscapeNormSq = 1e2;

std::vector<double> flatten(const FourierLoop& q) {
    std::vector<double> x;
    x.reserve(static_cast<size_t>(2 * q.n_modes + 1));
    x.push_back(q.a0);
    for (int i = 0; i < q.n_modes; ++i) x.push_back(q.a[i]);
    for (int i = 0; i < q.n_modes; ++i) x.push_back(q.b[i]);
    return x;
}

FourierLoop unflatten(const std::vector<double>& x, int n) {
    FourierLoop q(n);
    q.a0 = x[0];
    for (int i = 0; i < n; ++i) q.a[i] = x[1 + i];
    for (int i = 0; i < n; ++i) q.b[i] = x[1 + n + i];
    return q;
}

// Jacobian of the coefficient gradient map: diagonal rates plus the rank-one
// coupling through alpha.
Matrix gradient_jacobian(const FourierLoop& q) {
    const int n = q.n_modes;
    const int dim = 2 * n + 1;
    const double p = norm_sq(q);
    const double d = deriv_norm_sq(q);
    const double al = d / p - 0.5 / (p * p * p);

    // dP/dx and dD/dx in the flattened order (a0, a_1.., b_1..)
    std::vector<double> dp(static_cast<size_t>(dim)), dd(static_cast<size_t>(dim));
    dp[0] = 2.0 * q.a0;
    dd[0] = 0.0;
    for (int i = 0; i < n; ++i) {
        const double w = kTwoPi * (i + 1);
        dp[1 + i] = q.a[i];
        dp[1 + n + i] = q.b[i];
        dd[1 + i] = w * w * q.a[i];
        dd[1 + n + i] = w * w * q.b[i];
    }
    std::vector<double> dalpha(static_cast<size_t>(dim));
    for (int j = 0; j < dim; ++j)
        dalpha[j] = (dd[j] * p - d * dp[j]) / (p * p) + 1.5 * dp[j] / (p * p * p * p);

    const std::vector<double> x = flatten(q);
    Matrix jac(dim, dim);
    jac(0, 0) = al;
    for (int i = 0; i < n; ++i) {
        const double w = kTwoPi * (i + 1);
        jac(1 + i, 1 + i) = w * w + al;
        jac(1 + n + i, 1 + n + i) = w * w + al;
    }
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) jac(r, c) += x[r] * dalpha[c];
    return jac;
}

} // namespace

double amplitude(int k) {
    if (k < 1) throw std::invalid_argument("amplitude: k must be >= 1");
    return std::pow(2.0, -1.0 / 6.0) * std::pow(kPi * k, -1.0 / 3.0);
}

double critical_value(int k) {
    if (k < 1) throw std::invalid_argument("critical_value: k must be >= 1");
    return std::cbrt(2.0) * 3.0 * std::pow(kPi * k, 2.0 / 3.0);
}

int morse_index_formula(int k) {
    if (k < 1) throw std::invalid_argument("morse_index_formula: k must be >= 1");
    return 2 * k - 1;
}

FourierLoop expand(const CriticalPoint& cp, int n_modes) {
    if (cp.k < 1) throw std::invalid_argument("expand: k must be >= 1");
    if (n_modes < cp.k)
        throw std::invalid_argument("expand: truncation below circle mode");
    const double c = amplitude(cp.k);
    FourierLoop q(n_modes);
    q.cos_coeff(cp.k) = c * std::cos(cp.phase);
    q.sin_coeff(cp.k) = -c * std::sin(cp.phase);
    return q;
}

FourierLoop find_critical(const FourierLoop& seed, const SolverConfig& cfg) {
    require_punctured(seed);
    const int n = seed.n_modes;
    const int dim = 2 * n + 1;

    FourierLoop q = seed;
    FourierLoop g = gradient(q);
    double gnorm = sup_coeff(g);

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        if (gnorm < cfg.grad_tol) return q;

        const double p = norm_sq(q);
        if (p < kCollapseNormSq)
            throw DomainError("find_critical: iterates collapse toward the zero loop");
        if (p > kEscapeNormSq)
            throw NonConvergence("find_critical: iterates escape toward infinite norm");

        std::vector<double> x = flatten(q);
        std::vector<double> rhs = flatten(g);
        for (double& v : rhs) v = -v;

        bool moved = false;
        std::vector<double> delta;
        if (lu_solve(gradient_jacobian(q), rhs, delta)) {
            double t = 1.0;
            for (int halve = 0; halve < 30; ++halve, t *= 0.5) {
                std::vector<double> xt(x);
                for (int j = 0; j < dim; ++j) xt[j] += t * delta[j];
                FourierLoop qt = unflatten(xt, n);
                if (norm_sq(qt) < kCollapseNormSq) continue;
                FourierLoop gt = gradient(qt);
                const double gn = sup_coeff(gt);
                if (gn < gnorm) {
                    q = std::move(qt);
                    g = std::move(gt);
                    gnorm = gn;
                    moved = true;
                    break;
                }
            }
        }

        if (!moved) {
            // Fallback: descend along -gradient with backtracking on the
            // gradient sup-norm.
            double sigma = 1e-3;
            for (int halve = 0; halve < 40; ++halve, sigma *= 0.5) {
                std::vector<double> xt(x);
                const std::vector<double> gv = flatten(g);
                for (int j = 0; j < dim; ++j) xt[j] -= sigma * gv[j];
                FourierLoop qt = unflatten(xt, n);
                if (norm_sq(qt) < kCollapseNormSq) continue;
                FourierLoop gt = gradient(qt);
                const double gn = sup_coeff(gt);
                if (gn < gnorm) {
                    q = std::move(qt);
                    g = std::move(gt);
                    gnorm = gn;
                    moved = true;
                    break;
                }
            }
        }
        if (!moved)
            throw NonConvergence("find_critical: no descent step found");
    }
    if (gnorm < cfg.grad_tol) return q;
    throw NonConvergence("find_critical: iteration budget exhausted");
}

} // namespace freefall
