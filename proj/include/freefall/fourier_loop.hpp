#ifndef FREEFALL_FOURIER_LOOP_HPP
#define FREEFALL_FOURIER_LOOP_HPP

#include <vector>

namespace freefall {

// A real-valued loop on the circle, stored as a truncated Fourier series
//
//   q(t) = a0 + sum_{n=1..N} ( a_n cos 2(pi)nt + b_n sin 2(pi)nt ),  t in [0,1).
//
// The coefficient representation is primary; pointwise synthesis exists for
// quadrature cross-checks and export only. All operations on loops are pure;
// a constructed loop is treated as immutable.
struct FourierLoop {
    int n_modes = 0;        // truncation N >= 1
    double a0 = 0.0;        // constant mode
    std::vector<double> a;  // a[i] = cosine coefficient of mode i+1
    std::vector<double> b;  // b[i] = sine coefficient of mode i+1

    FourierLoop() = default;
    explicit FourierLoop(int n);  // zero loop with truncation n
    FourierLoop(double a0_, std::vector<double> a_, std::vector<double> b_);

    double cos_coeff(int n) const { return a[static_cast<size_t>(n) - 1]; }
    double sin_coeff(int n) const { return b[static_cast<size_t>(n) - 1]; }
    double& cos_coeff(int n) { return a[static_cast<size_t>(n) - 1]; }
    double& sin_coeff(int n) { return b[static_cast<size_t>(n) - 1]; }

    // Throws DomainError if any coefficient is non-finite.
    void check_finite() const;
};

// Loops with norm_sq below this are treated as the (excluded) zero loop.
inline constexpr double kZeroNormTol = 1e-14;

// L^2 norm squared: a0^2 + (1/2) sum (a_n^2 + b_n^2). Equals the integral of
// q(t)^2 over one period.
double norm_sq(const FourierLoop& q);

// L^2 norm squared of dq/dt: (1/2) sum (2(pi)n)^2 (a_n^2 + b_n^2).
double deriv_norm_sq(const FourierLoop& q);

// Standard L^2 inner product. Truncations may differ; the shorter loop is
// implicitly zero-padded.
double inner(const FourierLoop& q1, const FourierLoop& q2);

// Loop-dependent metric at q: 4 ||q||^2 <xi1, xi2>. Throws DomainError on a
// zero base loop.
double inner_metric(const FourierLoop& xi1, const FourierLoop& xi2,
                    const FourierLoop& q);

// The non-local coefficient alpha_q = ||q'||^2 / ||q||^2 - 1 / (2 ||q||^6).
double alpha(const FourierLoop& q);

// The action 2 ||q||^2 ||q'||^2 + 1 / ||q||^2.
double action(const FourierLoop& q);

// Gradient of the action in the q-weighted metric: -q'' + alpha_q q.
// Mode n of the output is ((2(pi)n)^2 + alpha) times mode n of q; the
// constant mode maps to alpha * a0. Vanishes exactly on critical loops.
FourierLoop gradient(const FourierLoop& q);

// Pointwise evaluation of the series at t.
double synthesize(const FourierLoop& q, double t);

// The loop t -> q(t + sigma). Rotates each mode plane by 2(pi)n(sigma);
// all norms, alpha and the action are invariant.
FourierLoop time_shift(const FourierLoop& q, double sigma);

// Largest absolute coefficient (including a0).
double sup_coeff(const FourierLoop& q);

// Amplitude sqrt(a_n^2 + b_n^2) of mode n (n >= 1).
double mode_amplitude(const FourierLoop& q, int n);

// Throws DomainError unless norm_sq(q) clears the puncture guard.
void require_punctured(const FourierLoop& q);

} // namespace freefall

#endif
