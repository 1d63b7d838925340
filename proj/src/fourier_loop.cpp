#include "freefall/fourier_loop.hpp"

#include <cmath>
#include <stdexcept>

#include "freefall/errors.hpp"

namespace freefall {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

FourierLoop::FourierLoop(int n) : n_modes(n) {
    if (n < 1) throw std::invalid_argument("FourierLoop: truncation must be >= 1");
    a.assign(static_cast<size_t>(n), 0.0);
    b.assign(static_cast<size_t>(n), 0.0);
}

FourierLoop::FourierLoop(double a0_, std::vector<double> a_, std::vector<double> b_)
    : n_modes(static_cast<int>(a_.size())), a0(a0_), a(std::move(a_)), b(std::move(b_)) {
    if (a.size() != b.size())
        throw std::invalid_argument("FourierLoop: cos/sin arrays differ in length");
    if (n_modes < 1) throw std::invalid_argument("FourierLoop: truncation must be >= 1");
    check_finite();
}

void FourierLoop::check_finite() const {
    bool ok = std::isfinite(a0);
    for (double x : a) ok = ok && std::isfinite(x);
    for (double x : b) ok = ok && std::isfinite(x);
    if (!ok) throw DomainError("FourierLoop: non-finite coefficient");
}

double norm_sq(const FourierLoop& q) {
    double s = 0.0;
    for (int i = 0; i < q.n_modes; ++i) s += q.a[i] * q.a[i] + q.b[i] * q.b[i];
    return q.a0 * q.a0 + 0.5 * s;
}

double deriv_norm_sq(const FourierLoop& q) {
    double s = 0.0;
    for (int i = 0; i < q.n_modes; ++i) {
        const double w = kTwoPi * (i + 1);
        s += w * w * (q.a[i] * q.a[i] + q.b[i] * q.b[i]);
    }
    return 0.5 * s;
}

double inner(const FourierLoop& q1, const FourierLoop& q2) {
    const int n = std::min(q1.n_modes, q2.n_modes);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += q1.a[i] * q2.a[i] + q1.b[i] * q2.b[i];
    return q1.a0 * q2.a0 + 0.5 * s;
}

void require_punctured(const FourierLoop& q) {
    if (norm_sq(q) < kZeroNormTol)
        throw DomainError("loop is numerically the zero loop (punctured domain)");
}

double inner_metric(const FourierLoop& xi1, const FourierLoop& xi2,
                    const FourierLoop& q) {
    require_punctured(q);
    return 4.0 * norm_sq(q) * inner(xi1, xi2);
}

double alpha(const FourierLoop& q) {
    require_punctured(q);
    const double p = norm_sq(q);
    return deriv_norm_sq(q) / p - 0.5 / (p * p * p);
}

double action(const FourierLoop& q) {
    require_punctured(q);
    const double p = norm_sq(q);
    return 2.0 * p * deriv_norm_sq(q) + 1.0 / p;
}

FourierLoop gradient(const FourierLoop& q) {
    const double al = alpha(q);
    FourierLoop g(q.n_modes);
    g.a0 = al * q.a0;
    for (int i = 0; i < q.n_modes; ++i) {
        const double w = kTwoPi * (i + 1);
        const double rate = w * w + al;
        g.a[i] = rate * q.a[i];
        g.b[i] = rate * q.b[i];
    }
    return g;
}

double synthesize(const FourierLoop& q, double t) {
    double v = q.a0;
    for (int i = 0; i < q.n_modes; ++i) {
        const double ph = kTwoPi * (i + 1) * t;
        v += q.a[i] * std::cos(ph) + q.b[i] * std::sin(ph);
    }
    return v;
}

FourierLoop time_shift(const FourierLoop& q, double sigma) {
    FourierLoop r(q.n_modes);
    r.a0 = q.a0;
    for (int i = 0; i < q.n_modes; ++i) {
        const double ph = kTwoPi * (i + 1) * sigma;
        const double c = std::cos(ph), s = std::sin(ph);
        r.a[i] = q.a[i] * c + q.b[i] * s;
        r.b[i] = -q.a[i] * s + q.b[i] * c;
    }
    return r;
}

double sup_coeff(const FourierLoop& q) {
    double m = std::fabs(q.a0);
    for (int i = 0; i < q.n_modes; ++i) {
        m = std::max(m, std::fabs(q.a[i]));
        m = std::max(m, std::fabs(q.b[i]));
    }
    return m;
}

double mode_amplitude(const FourierLoop& q, int n) {
    if (n < 1 || n > q.n_modes)
        throw std::invalid_argument("mode_amplitude: mode out of range");
    return std::hypot(q.a[n - 1], q.b[n - 1]);
}

} // namespace freefall
