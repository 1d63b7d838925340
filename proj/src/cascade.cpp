#include "freefall/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "freefall/errors.hpp"
#include "freefall/heatflow.hpp"
#include "freefall/linearization.hpp"

namespace freefall {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kMinConvergenceRate = 0.99;
constexpr double kRefineWidth = 1e-6;   // rad, bisection target
constexpr double kMDistance = 0.1;      // rad, keep M away from m
}

double wrap_2pi(double x) {
    double y = std::fmod(x, kTwoPi);
    if (y < 0.0) y += kTwoPi;
    return y + 0.0;  // normalizes -0
}

double circ_diff(double a, double b) {
    double d = std::fmod(a - b, kTwoPi);
    if (d > kPi) d -= kTwoPi;
    if (d <= -kPi) d += kTwoPi;
    return d;
}

double circ_dist(double a, double b) { return std::fabs(circ_diff(a, b)); }

int CascadeComplex::generator_index(GeneratorKind kind, int k) const {
    for (size_t i = 0; i < generators.size(); ++i)
        if (generators[i].kind == kind && generators[i].k == k)
            return static_cast<int>(i);
    throw std::invalid_argument("generator_index: no such generator");
}

namespace {

// One shot of the sweep; flow failures count as non-convergence of that shot.
// A trajectory leaking outside span{mode k, mode k+1} is not a valid
// connection and is rejected too.
bool shoot_phase(int k, double theta, const SolverConfig& cfg, double base_phase,
                 double& phase_out) {
    try {
        const FlowTrajectory traj = shoot_unstable(k, theta, cfg, base_phase);
        if (!traj.converged || traj.limit_circle != k) return false;
        if (!mode_interval_check(traj, k, k + 1, cfg.mode_leak_tol)) return false;
        phase_out = *traj.limit_phase;
        return true;
    } catch (const Error&) {
        return false;
    }
}

} // namespace

EvTable evaluation_map(int k, const SolverConfig& cfg, unsigned jobs,
                       double base_phase) {
    cfg.validate();
    if (k < 1) throw std::invalid_argument("evaluation_map: k must be >= 1");
    if (cfg.n_modes < k + 1)
        throw std::invalid_argument("evaluation_map: need n_modes >= k+1");

    const int n = cfg.theta_samples;
    EvTable table;
    table.k = k;
    table.base_phase = base_phase;
    table.thetas.resize(n);
    table.ev_phases.assign(n, std::numeric_limits<double>::quiet_NaN());
    table.converged.assign(n, 0);
    for (int i = 0; i < n; ++i) table.thetas[i] = kTwoPi * i / n;

    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(n));

    std::exception_ptr first_error;
    std::mutex err_mutex;
    auto run_range = [&](int begin, int stride) {
        try {
            for (int i = begin; i < n; i += stride) {
                double phase = 0.0;
                if (shoot_phase(k, table.thetas[i], cfg, base_phase, phase)) {
                    table.ev_phases[i] = phase;
                    table.converged[i] = 1;
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(err_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };

    if (jobs <= 1) {
        run_range(0, 1);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (unsigned t = 0; t < jobs; ++t)
            pool.emplace_back(run_range, static_cast<int>(t), static_cast<int>(jobs));
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    int ok = 0;
    for (uint8_t c : table.converged) ok += c;
    if (ok < kMinConvergenceRate * n)
        throw SweepFailure("evaluation_map: convergence rate below 99%");
    return table;
}

namespace {

struct ExtremumZone {
    double center;  // critical value ev(theta_j)
    double radius;  // spread of ev over theta_j +- 2 cells
};

// Local extrema of the sampled circle map, detected as sign changes of the
// circular increment.
std::vector<ExtremumZone> extremum_zones(const EvTable& t) {
    const int n = static_cast<int>(t.size());
    std::vector<ExtremumZone> zones;
    for (int j = 0; j < n; ++j) {
        const int prev = (j + n - 1) % n, next = (j + 1) % n;
        if (!t.converged[prev] || !t.converged[j] || !t.converged[next]) continue;
        const double din = circ_diff(t.ev_phases[j], t.ev_phases[prev]);
        const double dout = circ_diff(t.ev_phases[next], t.ev_phases[j]);
        if (din * dout > 0.0) continue;
        double radius = 0.0;
        for (int off = -2; off <= 2; ++off) {
            const int i = (j + off + n) % n;
            if (!t.converged[i]) continue;
            radius = std::max(radius, circ_dist(t.ev_phases[i], t.ev_phases[j]));
        }
        zones.push_back({t.ev_phases[j], radius});
    }
    return zones;
}

// Grid brackets [i, i+1] in which the lifted ev passes through M.
std::vector<int> crossing_segments(const EvTable& t, double M) {
    const int n = static_cast<int>(t.size());
    std::vector<int> segs;
    for (int i = 0; i < n; ++i) {
        const int next = (i + 1) % n;
        if (!t.converged[i] || !t.converged[next]) continue;
        const double delta = circ_diff(t.ev_phases[next], t.ev_phases[i]);
        const double g = circ_diff(M, t.ev_phases[i]);
        const bool hit = (delta > 0.0 && g > 0.0 && g <= delta) ||
                         (delta < 0.0 && g < 0.0 && g >= delta);
        if (hit) segs.push_back(i);
    }
    return segs;
}

bool segment_slopes_ok(const EvTable& t, const std::vector<int>& segs,
                       double slope_tol) {
    const int n = static_cast<int>(t.size());
    const double dtheta = kTwoPi / n;
    for (int i : segs) {
        const int next = (i + 1) % n;
        const double slope =
            circ_dist(t.ev_phases[next], t.ev_phases[i]) / dtheta;
        if (slope <= slope_tol) return false;
    }
    return true;
}

} // namespace

bool is_regular_target(const EvTable& table, double M, double m_phase,
                       double slope_tol) {
    if (circ_dist(M, m_phase) <= kMDistance) return false;
    for (const auto& z : extremum_zones(table))
        if (circ_dist(M, z.center) <= z.radius) return false;
    return segment_slopes_ok(table, crossing_segments(table, M), slope_tol);
}

double select_M(int k, const EvTable& table, double m_phase, double slope_tol) {
    if (k != table.k)
        throw std::invalid_argument("select_M: table belongs to another circle pair");
    if (static_cast<int>(table.size()) < 8)
        throw std::invalid_argument("select_M: table too small");

    // Constant table: no admissible regular value.
    double spread = 0.0;
    double ref = std::numeric_limits<double>::quiet_NaN();
    for (size_t i = 0; i < table.size(); ++i) {
        if (!table.converged[i]) continue;
        if (std::isnan(ref)) ref = table.ev_phases[i];
        spread = std::max(spread, circ_dist(table.ev_phases[i], ref));
    }
    if (std::isnan(ref) || spread < 1e-6)
        throw NoRegularValue("select_M: evaluation map is constant to tolerance");

    const std::vector<ExtremumZone> zones = extremum_zones(table);

    const int candidates = 4 * static_cast<int>(table.size());
    double best = std::numeric_limits<double>::quiet_NaN();
    double best_score = -1.0;
    for (int c = 0; c < candidates; ++c) {
        const double M = kTwoPi * c / candidates;
        if (!is_regular_target(table, M, m_phase, slope_tol)) continue;

        double score;
        if (zones.empty()) {
            score = circ_dist(M, m_phase);
        } else {
            score = std::numeric_limits<double>::infinity();
            for (const auto& z : zones)
                score = std::min(score, circ_dist(M, z.center));
        }
        if (score > best_score + 1e-15) {
            best_score = score;
            best = M;
        }
    }
    if (std::isnan(best))
        throw NoRegularValue("select_M: no admissible phase found");
    return best;
}

CountResult count_mod2(const EvTable& table, double M, const SolverConfig& cfg,
                       double slope_tol) {
    cfg.validate();
    const int n = static_cast<int>(table.size());
    if (n < 8) throw std::invalid_argument("count_mod2: table too small");
    const std::vector<int> segs = crossing_segments(table, M);

    int count = 0;
    for (int i : segs) {
        const int next = (i + 1) % n;
        double lo = table.thetas[i];
        double hi = table.thetas[i] + kTwoPi / n;  // unwrapped upper end
        double flo = circ_diff(table.ev_phases[i], M);
        double fhi = circ_diff(table.ev_phases[next], M);

        if (flo == 0.0) { ++count; continue; }
        if (flo * fhi > 0.0)
            throw AmbiguousCrossing("count_mod2: bracket lost its sign change");

        while (hi - lo > kRefineWidth) {
            const double mid = 0.5 * (lo + hi);
            double phase = 0.0;
            if (!shoot_phase(table.k, wrap_2pi(mid), cfg, table.base_phase, phase))
                throw AmbiguousCrossing("count_mod2: refinement shot failed");
            const double fm = circ_diff(phase, M);
            if (fm == 0.0) { flo = 0.0; lo = hi = mid; break; }
            if (flo * fm < 0.0) {
                hi = mid;
                fhi = fm;
            } else {
                lo = mid;
                flo = fm;
            }
        }
        if (hi > lo) {
            const double slope = std::fabs(fhi - flo) / (hi - lo);
            if (slope <= slope_tol)
                throw AmbiguousCrossing("count_mod2: crossing slope below threshold");
            if (flo * fhi > 0.0)
                throw AmbiguousCrossing("count_mod2: refined bracket lost sign change");
        }
        ++count;
    }
    return {count, count % 2 == 1 ? Parity::Odd : Parity::Even};
}

CascadeComplex build_complex(int K, const SolverConfig& cfg, unsigned jobs) {
    if (K < 1) throw std::invalid_argument("build_complex: K must be >= 1");
    cfg.validate();

    CascadeComplex cx;
    cx.K = K;
    cx.generators.reserve(static_cast<size_t>(2 * K));

    std::vector<double> max_phase(static_cast<size_t>(K + 1), kPi);
    std::vector<Parity> parity(static_cast<size_t>(K), Parity::Even);

    for (int k = 1; k + 1 <= K; ++k) {
        const EvTable table = evaluation_map(k, cfg, jobs);
        const double M = select_M(k, table, /*m_phase=*/0.0);
        const CountResult res = count_mod2(table, M, cfg);
        max_phase[k] = M;
        parity[k] = res.parity;
        cx.counts[k] = res.count;
        cx.parities[k] = res.parity;
    }

    for (int k = 1; k <= K; ++k) {
        cx.generators.push_back(
            {GeneratorKind::Min, k, cascade_index(GeneratorKind::Min, k), 0.0});
        cx.generators.push_back(
            {GeneratorKind::Max, k, cascade_index(GeneratorKind::Max, k), max_phase[k]});
    }

    const int dim = 2 * K;
    cx.boundary = Gf2Matrix(dim, dim);
    for (int k = 1; k + 1 <= K; ++k) {
        if (parity[k] == Parity::Odd) {
            const int col = cx.generator_index(GeneratorKind::Min, k + 1);
            const int row = cx.generator_index(GeneratorKind::Max, k);
            cx.boundary.set(row, col, true);
        }
    }

    if (!cx.boundary.multiply(cx.boundary).is_zero())
        throw NotAComplex("build_complex: boundary does not square to zero");
    return cx;
}

HomologyResult homology(const CascadeComplex& cx) {
    if (!cx.boundary.multiply(cx.boundary).is_zero())
        throw NotAComplex("homology: boundary does not square to zero");

    const int n = static_cast<int>(cx.generators.size());
    int max_deg = 0;
    for (const auto& g : cx.generators) max_deg = std::max(max_deg, g.degree);

    // rank of the boundary restricted to the degree-d chain group
    auto rank_at = [&](int d) {
        std::vector<int> cols;
        for (int j = 0; j < n; ++j)
            if (cx.generators[j].degree == d) cols.push_back(j);
        if (cols.empty()) return 0;
        Gf2Matrix sub(n, static_cast<int>(cols.size()));
        for (size_t c = 0; c < cols.size(); ++c)
            for (int i = 0; i < n; ++i)
                sub.set(i, static_cast<int>(c), cx.boundary.get(i, cols[c]));
        return sub.rank();
    };

    HomologyResult out;
    out.truncation = cx.K;
    for (int d = 0; d <= max_deg; ++d) {
        int dim_d = 0;
        for (const auto& g : cx.generators)
            if (g.degree == d) ++dim_d;
        if (dim_d == 0) continue;
        const int betti = dim_d - rank_at(d) - rank_at(d + 1);
        if (betti > 0) out.ranks[d] = betti;
    }
    return out;
}

HomologyResult restricted_complex_from_parity(Parity parity) {
    CascadeComplex cx;
    cx.K = 2;
    cx.generators = {
        {GeneratorKind::Min, 1, 0, 0.0},  // m_k, shifted degree 0
        {GeneratorKind::Max, 1, 1, kPi},  // M_k, degree 1
        {GeneratorKind::Min, 2, 2, 0.0},  // m_{k+1}, degree 2
        {GeneratorKind::Max, 2, 3, kPi},  // M_{k+1}, degree 3
    };
    cx.boundary = Gf2Matrix(4, 4);
    if (parity == Parity::Odd) cx.boundary.set(1, 2, true);  // d m_{k+1} = M_k
    return homology(cx);
}

HomologyResult restricted_complex_check(int k, const SolverConfig& cfg,
                                        unsigned jobs) {
    const EvTable table = evaluation_map(k, cfg, jobs);
    const double M = select_M(k, table, /*m_phase=*/0.0);
    const CountResult res = count_mod2(table, M, cfg);
    const HomologyResult h = restricted_complex_from_parity(res.parity);
    if (h.rank(1) != 0 || h.rank(2) != 0)
        throw ConsistencyFailure(
            "restricted_complex_check: homology in degree 1 or 2 (even parity "
            "contradicts the 3-sphere)");
    return h;
}

} // namespace freefall
