// Command-line front end: closed-form critical data, Hessian spectra, heat
// flow lines, evaluation-map sweeps, cascade homology, linearization checks
// and the aggregated verification battery.
//
// Exit codes: 0 success, 1 computational failure (error name on stderr),
// 2 usage or configuration error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "freefall/acceptance.hpp"
#include "freefall/cascade.hpp"
#include "freefall/errors.hpp"
#include "freefall/heatflow.hpp"
#include "freefall/hessian.hpp"
#include "freefall/io.hpp"
#include "freefall/linearization.hpp"

namespace {

using freefall::json;

constexpr double kPi = 3.1415926535897932384626433832795;

struct GlobalOpts {
    std::string config_path;
    std::string out_dir = ".";
    unsigned jobs = 0;
    std::string format = "json";
    uint64_t seed = 12345;
    std::string log_level = "info";

    freefall::RunConfig rc;

    // Config file first, explicit flags override.
    void finalize(bool jobs_given, bool out_given, bool format_given,
                  bool seed_given, bool log_given) {
        if (!config_path.empty()) rc = freefall::load_config_file(config_path);
        if (jobs_given) rc.jobs = jobs;
        if (out_given) rc.output_dir = out_dir;
        if (format_given) rc.format = format;
        if (seed_given) rc.seed = seed;
        if (log_given) rc.log_level = log_level;
        rc.validate();
    }

    bool quiet() const { return rc.log_level == "quiet"; }
    bool debug() const { return rc.log_level == "debug"; }
};

std::ofstream open_out(const GlobalOpts& g, const std::string& name) {
    std::filesystem::create_directories(g.rc.output_dir);
    const std::string path = g.rc.output_dir + "/" + name;
    std::ofstream f(path);
    if (!f) throw freefall::ConfigError("cannot write " + path);
    return f;
}

int cmd_crit(const GlobalOpts& g, int k, double phase) {
    const freefall::CriticalPoint cp{k, phase};
    const freefall::FourierLoop q = freefall::expand(cp, g.rc.solver.n_modes);
    const double residual = freefall::sup_coeff(freefall::gradient(q));
    json out{{"k", k},
             {"phase", phase},
             {"action", freefall::action(q)},
             {"critical_value", freefall::critical_value(k)},
             {"morse_index", freefall::morse_index_formula(k)},
             {"amplitude", freefall::amplitude(k)},
             {"gradient_residual", residual},
             {"loop", freefall::to_json(q)}};
    std::cout << out.dump(2) << "\n";
    return residual < 1e-10 ? 0 : 1;
}

int cmd_spectrum(const GlobalOpts& g, int k, int modes, double phase, bool csv) {
    const freefall::HessianSpectrumReport numeric =
        freefall::spectrum_numeric({k, phase}, modes);
    const freefall::HessianSpectrumReport closed =
        freefall::spectrum_closed_form(k, modes);

    // eigenvalue-by-eigenvalue agreement with multiplicity
    std::vector<double> a, b;
    for (const auto& p : numeric.eigenpairs)
        for (int m = 0; m < p.multiplicity; ++m) a.push_back(p.value);
    for (const auto& p : closed.eigenpairs)
        for (int m = 0; m < p.multiplicity; ++m) b.push_back(p.value);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double dev = a.size() == b.size() ? 0.0 : 1e300;
    if (a.size() == b.size())
        for (size_t i = 0; i < a.size(); ++i)
            dev = std::max(dev, std::fabs(a[i] - b[i]));
    const bool match = dev < 1e-6 && numeric.morse_index == closed.morse_index &&
                       numeric.nullity == closed.nullity;

    if (csv || g.rc.format == "csv") {
        std::cout << "eigenvalue,multiplicity,label\n";
        for (const auto& p : closed.eigenpairs)
            std::cout << p.value << "," << p.multiplicity << "," << p.mode_label
                      << "\n";
    } else {
        json out = freefall::to_json(numeric);
        out["closed_form"] = freefall::to_json(closed);
        out["max_eigenvalue_deviation"] = dev;
        out["oracle_match"] = match;
        std::cout << out.dump(2) << "\n";
    }
    return match ? 0 : 1;
}

int cmd_flow(const GlobalOpts& g, int k, double theta) {
    if (g.debug()) std::cerr << "flow: shooting k=" << k << " theta=" << theta << "\n";
    const freefall::FlowTrajectory traj =
        freefall::shoot_unstable(k, theta, g.rc.solver);

    const size_t max_samples = 2000;
    const size_t stride = std::max<size_t>(1, traj.size() / max_samples);

    auto jsonl = open_out(g, "flow_k" + std::to_string(k) + ".jsonl");
    for (size_t i = 0; i < traj.size(); i += stride) {
        json line{{"s", traj.s_grid[i]},
                  {"action", traj.action_values[i]},
                  {"loop", freefall::to_json(traj.states[i])}};
        jsonl << line.dump() << "\n";
    }

    auto csv = open_out(g, "flow_k" + std::to_string(k) + ".csv");
    csv << "s,action";
    for (int n = 1; n <= traj.states.front().n_modes; ++n) csv << ",amp" << n;
    csv << "\n";
    csv.precision(17);
    for (size_t i = 0; i < traj.size(); i += stride) {
        csv << traj.s_grid[i] << "," << traj.action_values[i];
        for (int n = 1; n <= traj.states[i].n_modes; ++n)
            csv << "," << freefall::mode_amplitude(traj.states[i], n);
        csv << "\n";
    }

    json out{{"k", k},
             {"theta", theta},
             {"converged", traj.converged},
             {"samples", traj.size()},
             {"s_end", traj.s_grid.back()},
             {"final_action", traj.action_values.back()}};
    if (traj.limit_circle) out["limit_circle"] = *traj.limit_circle;
    if (traj.limit_phase) out["limit_phase"] = *traj.limit_phase;
    if (!g.quiet()) std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_ev(const GlobalOpts& g, int k) {
    if (g.debug())
        std::cerr << "ev: sweeping " << g.rc.solver.theta_samples << " directions\n";
    const freefall::EvTable table =
        freefall::evaluation_map(k, g.rc.solver, g.rc.jobs);
    auto csv = open_out(g, "ev_k" + std::to_string(k) + ".csv");
    csv << "theta,ev_phase,converged\n";
    csv.precision(17);
    for (size_t i = 0; i < table.size(); ++i)
        csv << table.thetas[i] << "," << table.ev_phases[i] << ","
            << int(table.converged[i]) << "\n";

    json out{{"k", k},
             {"samples", table.size()},
             {"files", json::array({g.rc.output_dir + "/ev_k" + std::to_string(k) + ".csv"})}};
    if (g.rc.format == "json") {
        // machine-readable copy of the whole table alongside the CSV
        auto jf = open_out(g, "ev_k" + std::to_string(k) + ".json");
        jf << freefall::to_json(table).dump(2) << "\n";
        out["files"].push_back(g.rc.output_dir + "/ev_k" + std::to_string(k) + ".json");
    }
    int ok = 0;
    for (auto c : table.converged) ok += c;
    out["converged"] = ok;
    if (!g.quiet()) std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_lincheck(const GlobalOpts& g, int k, double theta) {
    freefall::SolverConfig cfg = g.rc.solver;
    cfg.scheme = freefall::Scheme::Rk4;
    const freefall::FlowTrajectory u = freefall::shoot_unstable(k, theta, cfg);

    const double lo = 0.1 * u.s_grid.back(), hi = 0.8 * u.s_grid.back();
    std::mt19937_64 rng(g.rc.seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    auto bump = [&](double s) {
        if (s <= lo || s >= hi) return 0.0;
        const double x = (s - lo) / (hi - lo);
        return std::exp(-1.0 / (x * (1.0 - x)) + 4.0);
    };
    auto make_field = [&]() {
        freefall::FourierLoop base(cfg.n_modes);
        base.a0 = dist(rng);
        for (int i = 0; i < cfg.n_modes; ++i) {
            base.a[i] = dist(rng);
            base.b[i] = dist(rng);
        }
        freefall::CylinderField f;
        f.s_grid = u.s_grid;
        f.support = {lo, hi};
        for (double s : u.s_grid) {
            freefall::FourierLoop v(cfg.n_modes);
            const double w = bump(s);
            v.a0 = w * base.a0;
            for (int i = 0; i < cfg.n_modes; ++i) {
                v.a[i] = w * base.a[i];
                v.b[i] = w * base.b[i];
            }
            f.values.push_back(std::move(v));
        }
        return f;
    };
    const freefall::CylinderField xi = make_field();
    const freefall::CylinderField eta = make_field();

    const double d3 = freefall::fd_check(u, xi, 1e-3);
    const double d4 = freefall::fd_check(u, xi, 1e-4);
    const double adj = freefall::adjoint_check(u, xi, eta);

    freefall::SolverConfig half = cfg;
    half.step = cfg.step / 2.0;
    const freefall::FlowTrajectory u2 = freefall::shoot_unstable(k, theta, half);
    std::mt19937_64 rng2(g.rc.seed);  // same loops on the finer grid
    rng = rng2;
    auto remake = [&](const freefall::FlowTrajectory& traj) {
        freefall::FourierLoop base(cfg.n_modes);
        base.a0 = dist(rng);
        for (int i = 0; i < cfg.n_modes; ++i) {
            base.a[i] = dist(rng);
            base.b[i] = dist(rng);
        }
        freefall::CylinderField f;
        f.s_grid = traj.s_grid;
        f.support = {lo, hi};
        for (double s : traj.s_grid) {
            freefall::FourierLoop v(cfg.n_modes);
            const double w = bump(s);
            v.a0 = w * base.a0;
            for (int i = 0; i < cfg.n_modes; ++i) {
                v.a[i] = w * base.a[i];
                v.b[i] = w * base.b[i];
            }
            f.values.push_back(std::move(v));
        }
        return f;
    };
    const freefall::CylinderField xi2 = remake(u2);
    const freefall::CylinderField eta2 = remake(u2);
    const double adj_half = freefall::adjoint_check(u2, xi2, eta2);

    const double fd_order = std::log10(d3 / std::max(d4, 1e-300));
    const double adj_factor = adj_half / std::max(adj, 1e-300);
    const bool pass = d4 < 1e-4 && fd_order > 1.5 && adj < 1e-3 &&
                      adj_factor < 0.35;
    json out{{"k", k},
             {"theta", theta},
             {"fd_deviation_tau_1e3", d3},
             {"fd_deviation_tau_1e4", d4},
             {"fd_order_decade", fd_order},
             {"adjoint_defect_h", adj},
             {"adjoint_defect_h_half", adj_half},
             {"adjoint_refinement_factor", adj_factor},
             {"pass", pass}};
    std::cout << out.dump(2) << "\n";
    return pass ? 0 : 1;
}

int cmd_homology(const GlobalOpts& g, int k_max) {
    const freefall::CascadeComplex cx =
        freefall::build_complex(k_max, g.rc.solver, g.rc.jobs);
    const freefall::HomologyResult h = freefall::homology(cx);
    json out = freefall::to_json(cx);
    out["homology"] = freefall::to_json(h);
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_verify(const GlobalOpts& g) {
    freefall::AcceptanceOptions opts;
    opts.jobs = g.rc.jobs;
    opts.seed = g.rc.seed;
    return freefall::run_acceptance(opts, std::cout) ? 0 : 1;
}

const char* error_name(const freefall::Error& e) {
    if (dynamic_cast<const freefall::DomainError*>(&e)) return "DomainError";
    if (dynamic_cast<const freefall::NonConvergence*>(&e)) return "NonConvergence";
    if (dynamic_cast<const freefall::Divergence*>(&e)) return "Divergence";
    if (dynamic_cast<const freefall::NotOnCircle*>(&e)) return "NotOnCircle";
    if (dynamic_cast<const freefall::GridMismatch*>(&e)) return "GridMismatch";
    if (dynamic_cast<const freefall::EigenFailure*>(&e)) return "EigenFailure";
    if (dynamic_cast<const freefall::SweepFailure*>(&e)) return "SweepFailure";
    if (dynamic_cast<const freefall::NoRegularValue*>(&e)) return "NoRegularValue";
    if (dynamic_cast<const freefall::AmbiguousCrossing*>(&e)) return "AmbiguousCrossing";
    if (dynamic_cast<const freefall::NotAComplex*>(&e)) return "NotAComplex";
    if (dynamic_cast<const freefall::ConsistencyFailure*>(&e)) return "ConsistencyFailure";
    if (dynamic_cast<const freefall::MonotonicityError*>(&e)) return "MonotonicityError";
    return "Error";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heat-flow Morse homology of the regularized free fall"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "flat key=value config file");
    auto* out_opt = app.add_option("--out", g.out_dir, "output directory for data files");
    auto* jobs_opt =
        app.add_option("--jobs", g.jobs, "worker threads for sweeps (0 = all cores)");
    auto* format_opt = app.add_option("--format", g.format, "output format: json or csv")
                           ->check(CLI::IsMember({"json", "csv"}));
    auto* seed_opt = app.add_option("--seed", g.seed, "seed for randomized checks");
    auto* log_opt = app.add_option("--log-level", g.log_level, "quiet, info or debug")
                        ->check(CLI::IsMember({"quiet", "info", "debug"}));

    int k = 1, modes = 16, k_max = 5;
    double phase = 0.0, theta = 0.0;
    bool csv = false;

    auto* crit = app.add_subcommand("crit", "critical point data on C_k");
    crit->add_option("--k", k, "circle label")->required();
    crit->add_option("--phase", phase, "phase on the circle");

    auto* spectrum = app.add_subcommand("spectrum", "Hessian spectrum at a critical point");
    spectrum->add_option("--k", k, "circle label")->required();
    spectrum->add_option("--modes", modes, "Fourier truncation N")->required();
    spectrum->add_option("--phase", phase, "phase on the circle");
    spectrum->add_flag("--csv", csv, "emit (eigenvalue, multiplicity, label) rows");

    auto* flow = app.add_subcommand("flow", "shoot one heat-flow line from the saddle");
    flow->add_option("--k", k, "connection pair (C_{k+1} -> C_k)")->required();
    flow->add_option("--theta", theta, "unstable direction angle")->required();

    auto* ev = app.add_subcommand("ev", "sweep the evaluation map on C_k");
    ev->add_option("--k", k, "connection pair")->required();

    auto* lin = app.add_subcommand("lincheck", "linearization consistency on a flow line");
    lin->add_option("--k", k, "connection pair")->required();
    lin->add_option("--theta", theta, "unstable direction angle")->required();

    auto* hom = app.add_subcommand("homology", "build the cascade complex and its homology");
    hom->add_option("--K", k_max, "number of circles")->required();

    app.add_subcommand("verify", "run the full verification battery");

    // let global flags (--jobs, --out, ...) appear after the subcommand too
    for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        g.finalize(jobs_opt->count() > 0, out_opt->count() > 0,
                   format_opt->count() > 0, seed_opt->count() > 0,
                   log_opt->count() > 0);
        if (app.got_subcommand("crit")) return cmd_crit(g, k, phase);
        if (app.got_subcommand("spectrum")) return cmd_spectrum(g, k, modes, phase, csv);
        if (app.got_subcommand("flow")) return cmd_flow(g, k, theta);
        if (app.got_subcommand("ev")) return cmd_ev(g, k);
        if (app.got_subcommand("lincheck")) return cmd_lincheck(g, k, theta);
        if (app.got_subcommand("homology")) return cmd_homology(g, k_max);
        if (app.got_subcommand("verify")) return cmd_verify(g);
        return 2;
    } catch (const freefall::Error& e) {
        std::cerr << error_name(e) << ": " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }
}
