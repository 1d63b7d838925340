#ifndef FREEFALL_CRITICAL_HPP
#define FREEFALL_CRITICAL_HPP

#include "freefall/config.hpp"
#include "freefall/fourier_loop.hpp"

namespace freefall {

// A point on the critical circle C_k: the loop c_k cos 2(pi)k(t + sigma),
// parametrized by the coefficient-plane angle phase = 2(pi)k(sigma), which
// runs around C_k exactly once.
struct CriticalPoint {
    int k = 1;           // circle label (mode index), k >= 1
    double phase = 0.0;  // angle in the (a_k, b_k) plane, [0, 2pi)
};

// Amplitude c_k = 2^{-1/6} (pi k)^{-1/3} of the circle C_k. Strictly
// decreasing in k, contained in (0,1). Throws std::invalid_argument on k < 1.
double amplitude(int k);

// Critical value of the action on C_k: 2^{1/3} * 3 * (pi k)^{2/3}.
double critical_value(int k);

// Morse index of C_k: 2k - 1.
int morse_index_formula(int k);

// Coefficient expansion of a critical point into a loop of truncation N:
// a_k = c_k cos(phase), b_k = -c_k sin(phase), everything else zero.
// Requires N >= k.
FourierLoop expand(const CriticalPoint& cp, int n_modes);

// Damped Newton on the truncated gradient map, with a gradient-descent
// fallback when the Newton step is unusable. Returns a loop whose gradient
// sup-norm is below cfg.grad_tol.
//
// Throws NonConvergence after cfg.max_iters (or when iterates escape toward
// infinite norm, where the gradient flattens without a critical point) and
// DomainError when iterates approach the zero loop.
FourierLoop find_critical(const FourierLoop& seed, const SolverConfig& cfg);

} // namespace freefall

#endif
