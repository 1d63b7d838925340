#ifndef FREEFALL_ACCEPTANCE_HPP
#define FREEFALL_ACCEPTANCE_HPP

#include <cstdint>
#include <ostream>

namespace freefall {

struct AcceptanceOptions {
    unsigned jobs = 0;      // worker threads for sweeps; 0 = hardware
    uint64_t seed = 12345;  // RNG seed for the randomized checks
};

// Runs the full verification battery (critical values, spectrum oracle,
// finite-difference consistency, flow invariants, exponential tails,
// connection parities and their invariance, restricted and truncated
// homology, linearization checks, index bookkeeping), printing one
// pass/fail line per criterion. Returns true iff everything passed.
bool run_acceptance(const AcceptanceOptions& opts, std::ostream& out);

} // namespace freefall

#endif
