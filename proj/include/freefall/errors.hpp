#ifndef FREEFALL_ERRORS_HPP
#define FREEFALL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace freefall {

// Base class for all computational failures raised by the library.
// Argument/usage mistakes (bad k, bad truncation, malformed config) throw
// std::invalid_argument instead, so callers can map them to a distinct
// exit code.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The loop space is punctured: the zero loop (and anything numerically
// indistinguishable from it) is outside the domain of the functional.
struct DomainError : Error {
    using Error::Error;
};

// Iterative solver exhausted its budget without meeting its tolerance.
struct NonConvergence : Error {
    using Error::Error;
};

// Flow norm exceeded the escape guard (the functional has no minimum;
// trajectories can run off toward infinite norm).
struct Divergence : Error {
    using Error::Error;
};

// Loop handed to the circle projection is not close enough to a critical
// circle to have a well-defined phase.
struct NotOnCircle : Error {
    using Error::Error;
};

// Cylinder field and trajectory disagree on the s-sampling.
struct GridMismatch : Error {
    using Error::Error;
};

// Dense symmetric eigensolver failed to converge.
struct EigenFailure : Error {
    using Error::Error;
};

// Too many shooting runs in a sweep failed to converge.
struct SweepFailure : Error {
    using Error::Error;
};

// Evaluation-map table admits no regular target value.
struct NoRegularValue : Error {
    using Error::Error;
};

// A crossing bracket could not be refined to a transversal crossing.
struct AmbiguousCrossing : Error {
    using Error::Error;
};

// Boundary operator does not square to zero.
struct NotAComplex : Error {
    using Error::Error;
};

// Computed homology contradicts a structural constraint.
struct ConsistencyFailure : Error {
    using Error::Error;
};

// Discrete flow produced an upward action step beyond the allowed slack.
struct MonotonicityError : Error {
    using Error::Error;
};

// Malformed configuration file or option value.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace freefall

#endif
