#ifndef FREEFALL_CASCADE_HPP
#define FREEFALL_CASCADE_HPP

#include <map>
#include <vector>

#include "freefall/config.hpp"
#include "freefall/generators.hpp"
#include "freefall/gf2.hpp"

namespace freefall {

// Sampled evaluation map for the connection C_{k+1} -> C_k: a theta-grid on
// the unstable circle of m_{k+1} and the asymptotic phase on C_k of each shot.
struct EvTable {
    int k = 0;
    double base_phase = 0.0;          // phase of the saddle m_{k+1}
    std::vector<double> thetas;       // uniform on [0, 2pi)
    std::vector<double> ev_phases;    // NaN where not converged
    std::vector<uint8_t> converged;

    size_t size() const { return thetas.size(); }
};

enum class Parity { Even, Odd };

// Phase wrapped into [0, 2pi).
double wrap_2pi(double x);

// Signed circular difference a - b, wrapped into (-pi, pi].
double circ_diff(double a, double b);

// Circular distance |circ_diff|.
double circ_dist(double a, double b);

struct CountResult {
    int count = 0;
    Parity parity = Parity::Even;
};

struct CascadeComplex {
    int K = 0;                                // circles 1..K
    std::vector<CascadeGenerator> generators; // 2K of them, ascending degree
    Gf2Matrix boundary;                       // boundary(i,j): gen i in d(gen j)
    std::map<int, int> counts;                // raw crossing count per pair k
    std::map<int, Parity> parities;

    int generator_index(GeneratorKind kind, int k) const;
};

struct HomologyResult {
    std::map<int, int> ranks;  // degree -> Z2 Betti number (nonzero only)
    int truncation = 0;

    int rank(int degree) const {
        auto it = ranks.find(degree);
        return it == ranks.end() ? 0 : it->second;
    }
};

// Shoots cfg.theta_samples trajectories from m_{k+1} (at base_phase) and
// records the limit phase of each. Runs are distributed over `jobs` worker
// threads (0 = hardware concurrency); results are gathered by index, so the
// table is deterministic. Throws SweepFailure below 99% convergence.
EvTable evaluation_map(int k, const SolverConfig& cfg, unsigned jobs = 1,
                       double base_phase = 0.0);

// True iff M is an admissible regular target: at least 0.1 rad from m_phase,
// crossed only transversally (discrete slope above slope_tol), and clear of
// the ev-image of +-2 grid cells around every local extremum.
bool is_regular_target(const EvTable& table, double M, double m_phase,
                       double slope_tol = 1e-3);

// Deterministically selects a regular target value on C_k: an admissible
// phase (see is_regular_target) farthest from the critical values of ev
// (farthest from m_phase when ev has no extrema). Throws NoRegularValue for
// a constant table.
double select_M(int k, const EvTable& table, double m_phase,
                double slope_tol = 1e-3);

// Counts the transversal crossings of ev through M. Each grid bracket with a
// sign change is refined by bisection (re-shooting) to 1e-6 rad and must keep
// its sign change; its slope must stay above slope_tol or AmbiguousCrossing
// is thrown. The parity of the count is the boundary coefficient.
CountResult count_mod2(const EvTable& table, double M, const SolverConfig& cfg,
                       double slope_tol = 1e-3);

// Assembles the cascade complex on circles 1..K with minima at phase 0:
// d(M_k) = 0 by the two cancelling arcs on C_k, d(m_1) = 0, and
// d(m_{k+1}) = parity(k) . M_k computed from the sweeps. Verifies dd = 0.
CascadeComplex build_complex(int K, const SolverConfig& cfg, unsigned jobs = 1);

// Z2 Betti numbers of the complex by GF(2) rank computation. Throws
// NotAComplex if the boundary does not square to zero.
HomologyResult homology(const CascadeComplex& cx);

// The four-generator complex of the restriction to span{modes k, k+1},
// graded 0..3. Computes the connection parity, builds the complex, and
// checks the homology against the 3-sphere: Z2 in degrees 0 and 3, zero in
// degrees 1 and 2. Throws ConsistencyFailure otherwise (an even parity).
HomologyResult restricted_complex_check(int k, const SolverConfig& cfg,
                                        unsigned jobs = 1);

// Same complex from an externally supplied parity (exposed so tests can feed
// an artificial even count).
HomologyResult restricted_complex_from_parity(Parity parity);

} // namespace freefall

#endif
