#ifndef FREEFALL_TEST_SUPPORT_HPP
#define FREEFALL_TEST_SUPPORT_HPP

#include <cmath>
#include <random>

#include "freefall/fourier_loop.hpp"

namespace freefall::test {

// Composite trapezoid quadrature of f over one period. For periodic
// integrands this is spectrally accurate; for band-limited ones it is exact
// up to rounding once nodes > 2 * bandwidth.
template <typename F>
double trapezoid_period(F f, int nodes = 4096) {
    double s = 0.0;
    for (int i = 0; i < nodes; ++i) s += f(static_cast<double>(i) / nodes);
    return s / nodes;
}

// Loop whose synthesis is dq/dt.
inline FourierLoop derivative_loop(const FourierLoop& q) {
    constexpr double two_pi = 6.283185307179586476925286766559;
    FourierLoop d(q.n_modes);
    for (int n = 1; n <= q.n_modes; ++n) {
        d.cos_coeff(n) = two_pi * n * q.sin_coeff(n);
        d.sin_coeff(n) = -two_pi * n * q.cos_coeff(n);
    }
    return d;
}

inline FourierLoop random_loop(std::mt19937& rng, int n_modes,
                               double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    FourierLoop q(n_modes);
    q.a0 = dist(rng);
    for (int i = 0; i < n_modes; ++i) {
        q.a[i] = dist(rng);
        q.b[i] = dist(rng);
    }
    return q;
}

inline double rel_err(double got, double want) {
    return std::fabs(got - want) / std::fabs(want);
}

} // namespace freefall::test

#endif
