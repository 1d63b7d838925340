#ifndef FREEFALL_HEATFLOW_HPP
#define FREEFALL_HEATFLOW_HPP

#include <optional>
#include <vector>

#include "freefall/config.hpp"
#include "freefall/critical.hpp"
#include "freefall/fourier_loop.hpp"

namespace freefall {

// One integrated flow line, sampled at every step. Immutable once returned.
struct FlowTrajectory {
    std::vector<double> s_grid;        // flow times, increasing
    std::vector<FourierLoop> states;   // same length as s_grid
    std::vector<double> action_values; // non-increasing along s
    bool converged = false;
    std::optional<int> limit_circle;   // k of the limiting circle C_k
    std::optional<double> limit_phase; // phase of the limit on C_k

    // Discretization that produced the samples; lets consumers verify the
    // samples really are a discrete flow line (see heat_residual).
    Scheme scheme = Scheme::SemiImplicitExponential;
    double step_h = 0.0;

    size_t size() const { return states.size(); }
};

// Negative gradient: mode n maps to -((2 pi n)^2 + alpha_q) times itself,
// the constant mode to -alpha_q a0. The only inter-mode coupling is the
// scalar alpha, so a mode that is exactly zero has exactly zero velocity.
FourierLoop flow_rhs(const FourierLoop& q);

// One step of the configured scheme.
//
// semi_implicit_exponential freezes alpha at the current state and advances
// every mode by its exact exponential factor; this is unconditionally stable
// in the stiff (2 pi n)^2 part. rk4 is the classical fourth-order step on
// flow_rhs. Both multiply each mode pair by a common scalar, so coefficients
// that are exactly zero stay exactly zero.
FourierLoop step(const FourierLoop& q, const SolverConfig& cfg);

// Integrates until the gradient sup-norm drops below cfg.grad_tol (converged,
// limit circle and phase identified) or the flow-time budget cfg.max_s runs
// out. Throws DomainError on collapse toward the zero loop, Divergence when
// norm_sq exceeds 1e6, MonotonicityError if a step raises the action by more
// than 1e-10.
FlowTrajectory integrate(const FourierLoop& q0, const SolverConfig& cfg);

// Shoots from the saddle m_{k+1} = (circle k+1, base_phase) off by
// cfg.eps_unstable along the direction (cos theta, sin theta) in the mode-k
// coefficient plane - the unstable plane of the restriction to
// span{modes k, k+1}. Every mode outside {k, k+1} starts exactly zero and
// stays exactly zero.
FlowTrajectory shoot_unstable(int k, double theta, const SolverConfig& cfg,
                              double base_phase = 0.0);

// Phase of a loop lying on (or very near) the circle C_k: atan2(-b_k, a_k)
// in [0, 2pi). Requires mode-k amplitude within 1% of c_k and every other
// coefficient below 1e-4; throws NotOnCircle otherwise.
double project_to_circle(const FourierLoop& q, int k);

// True iff every state of the trajectory has every coefficient with mode
// index outside [k_plus, k_minus] (including a0 when k_plus >= 1) below tol
// in absolute value.
bool mode_interval_check(const FlowTrajectory& traj, int k_plus, int k_minus,
                         double tol);

// Largest sup-norm defect of the trajectory against its own scheme:
// max_i sup | states[i+1] - step(states[i]) |. Zero (up to rounding) for
// integrator output and for constant critical trajectories.
double heat_residual(const FlowTrajectory& traj);

// Synthetic trajectory sitting at the critical point cp for all s in
// [0, s_len] with spacing h. Used to exercise the linearization at a known
// exact solution.
FlowTrajectory constant_trajectory(const CriticalPoint& cp, int n_modes,
                                   double s_len, double h);

// Least-squares slope of log ||u_s - limit||_{L^2} over the samples whose
// distance lies in [d_lo, d_hi]. For a converged trajectory this is minus
// the decay rate of the slowest transverse eigenvalue at the limit circle.
// Throws NonConvergence if fewer than 8 samples fall into the window.
double fit_tail_slope(const FlowTrajectory& traj, const FourierLoop& limit,
                      double d_lo, double d_hi);

} // namespace freefall

#endif
