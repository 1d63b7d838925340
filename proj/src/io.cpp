#include "freefall/io.hpp"

#include <fstream>
#include <sstream>

#include "freefall/errors.hpp"

namespace freefall {

json to_json(const FourierLoop& q) {
    return json{{"n_modes", q.n_modes}, {"a0", q.a0}, {"a", q.a}, {"b", q.b}};
}

FourierLoop loop_from_json(const json& j) {
    FourierLoop q(j.at("n_modes").get<int>());
    q.a0 = j.at("a0").get<double>();
    const auto a = j.at("a").get<std::vector<double>>();
    const auto b = j.at("b").get<std::vector<double>>();
    if (static_cast<int>(a.size()) != q.n_modes ||
        static_cast<int>(b.size()) != q.n_modes)
        throw ConfigError("loop_from_json: coefficient arrays disagree with n_modes");
    q.a = a;
    q.b = b;
    q.check_finite();
    return q;
}

json to_json(const CriticalPoint& cp) {
    return json{{"k", cp.k}, {"phase", cp.phase}};
}

CriticalPoint critical_point_from_json(const json& j) {
    return {j.at("k").get<int>(), j.at("phase").get<double>()};
}

json to_json(const HessianSpectrumReport& rep) {
    json pairs = json::array();
    for (const auto& p : rep.eigenpairs)
        pairs.push_back({{"value", p.value},
                         {"multiplicity", p.multiplicity},
                         {"label", p.mode_label}});
    return json{{"k", rep.k},
                {"truncation", rep.truncation},
                {"morse_index", rep.morse_index},
                {"nullity", rep.nullity},
                {"spectral_gap", rep.spectral_gap},
                {"eigenpairs", pairs}};
}

json to_json(const EvTable& table) {
    json conv = json::array();
    json phases = json::array();
    for (size_t i = 0; i < table.size(); ++i) {
        conv.push_back(static_cast<bool>(table.converged[i]));
        if (table.converged[i]) phases.push_back(table.ev_phases[i]);
        else phases.push_back(nullptr);
    }
    return json{{"k", table.k},
                {"base_phase", table.base_phase},
                {"thetas", table.thetas},
                {"ev_phases", phases},
                {"converged", conv}};
}

json to_json(const CascadeComplex& cx) {
    json gens = json::array();
    for (const auto& g : cx.generators)
        gens.push_back({{"kind", g.kind == GeneratorKind::Min ? "min" : "max"},
                        {"k", g.k},
                        {"degree", g.degree},
                        {"phase", g.phase}});
    json rows = json::array();
    for (int i = 0; i < cx.boundary.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < cx.boundary.cols(); ++j)
            row.push_back(cx.boundary.get(i, j) ? 1 : 0);
        rows.push_back(row);
    }
    json counts = json::object();
    json parities = json::object();
    for (const auto& [k, c] : cx.counts) counts[std::to_string(k)] = c;
    for (const auto& [k, p] : cx.parities)
        parities[std::to_string(k)] = (p == Parity::Odd ? "odd" : "even");
    return json{{"K", cx.K},
                {"generators", gens},
                {"boundary", rows},
                {"counts", counts},
                {"parities", parities}};
}

json to_json(const HomologyResult& h) {
    json ranks = json::object();
    for (const auto& [deg, r] : h.ranks) ranks[std::to_string(deg)] = r;
    return json{{"truncation", h.truncation}, {"betti", ranks}};
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for " + key + ": " + v);
    }
}

int parse_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer value for " + key + ": " + v);
    }
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig rc;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));
        if (key == "n_modes") rc.solver.n_modes = parse_int(key, val);
        else if (key == "step") rc.solver.step = parse_double(key, val);
        else if (key == "scheme") rc.solver.scheme = scheme_from_string(val);
        else if (key == "eps_unstable") rc.solver.eps_unstable = parse_double(key, val);
        else if (key == "grad_tol") rc.solver.grad_tol = parse_double(key, val);
        else if (key == "max_s") rc.solver.max_s = parse_double(key, val);
        else if (key == "theta_samples") rc.solver.theta_samples = parse_int(key, val);
        else if (key == "mode_leak_tol") rc.solver.mode_leak_tol = parse_double(key, val);
        else if (key == "max_iters") rc.solver.max_iters = parse_int(key, val);
        else if (key == "jobs") rc.jobs = static_cast<unsigned>(parse_int(key, val));
        else if (key == "seed") rc.seed = static_cast<uint64_t>(parse_int(key, val));
        else if (key == "log_level") rc.log_level = val;
        else if (key == "output_dir") rc.output_dir = val;
        else if (key == "format") rc.format = val;
        else throw ConfigError("config: unknown key: " + key);
    }
    rc.validate();
    return rc;
}

void RunConfig::validate() const {
    solver.validate();
    if (log_level != "quiet" && log_level != "info" && log_level != "debug")
        throw ConfigError("config: log_level must be quiet, info or debug");
    if (format != "json" && format != "csv")
        throw ConfigError("config: format must be json or csv");
    if (output_dir.empty()) throw ConfigError("config: output_dir empty");
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

} // namespace freefall
