#ifndef FREEFALL_CONFIG_HPP
#define FREEFALL_CONFIG_HPP

#include <string>

namespace freefall {

enum class Scheme {
    SemiImplicitExponential,  // freeze alpha over the step, advance modes exactly
    Rk4,                      // classical fourth order on the full right-hand side
};

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

// Knobs shared by the flow integrator, the shooting driver and the Newton
// critical-point solver.
struct SolverConfig {
    int n_modes = 32;          // truncation of all loops produced by the flow
    double step = 1e-3;        // flow-time step h
    Scheme scheme = Scheme::SemiImplicitExponential;
    double eps_unstable = 1e-4; // initial offset along unstable directions
    double grad_tol = 1e-9;    // gradient sup-norm declaring convergence
    double max_s = 50.0;       // flow-time budget
    int theta_samples = 720;   // sweep resolution on the unstable circle
    double mode_leak_tol = 1e-10;
    int max_iters = 200;       // Newton iteration budget

    void validate() const;     // throws ConfigError on a bad field
};

// Defaults used by the Newton critical-point solver (tighter gradient
// tolerance than the flow).
SolverConfig newton_defaults();

} // namespace freefall

#endif
