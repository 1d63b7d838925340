#include "freefall/config.hpp"

#include "freefall/errors.hpp"

namespace freefall {

std::string to_string(Scheme s) {
    return s == Scheme::SemiImplicitExponential ? "semi_implicit_exponential" : "rk4";
}

Scheme scheme_from_string(const std::string& s) {
    if (s == "semi_implicit_exponential") return Scheme::SemiImplicitExponential;
    if (s == "rk4") return Scheme::Rk4;
    throw ConfigError("unknown scheme: " + s);
}

void SolverConfig::validate() const {
    if (n_modes < 1) throw ConfigError("n_modes must be positive");
    if (step <= 0) throw ConfigError("step must be positive");
    if (eps_unstable <= 0) throw ConfigError("eps_unstable must be positive");
    if (grad_tol <= 0) throw ConfigError("grad_tol must be positive");
    if (max_s <= 0) throw ConfigError("max_s must be positive");
    if (theta_samples < 8) throw ConfigError("theta_samples must be >= 8");
    if (mode_leak_tol <= 0) throw ConfigError("mode_leak_tol must be positive");
    if (max_iters < 1) throw ConfigError("max_iters must be positive");
}

SolverConfig newton_defaults() {
    SolverConfig cfg;
    cfg.grad_tol = 1e-10;
    cfg.max_iters = 200;
    return cfg;
}

} // namespace freefall
