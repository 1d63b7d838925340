#ifndef FREEFALL_IO_HPP
#define FREEFALL_IO_HPP

#include <string>

#include <json.hpp>

#include "freefall/cascade.hpp"
#include "freefall/config.hpp"
#include "freefall/critical.hpp"
#include "freefall/fourier_loop.hpp"
#include "freefall/heatflow.hpp"
#include "freefall/hessian.hpp"

namespace freefall {

using json = nlohmann::ordered_json;

// Loops serialize as flat objects {"n_modes": N, "a0": x, "a": [...],
// "b": [...]}; doubles round-trip bit-exactly.
json to_json(const FourierLoop& q);
FourierLoop loop_from_json(const json& j);

json to_json(const CriticalPoint& cp);
CriticalPoint critical_point_from_json(const json& j);

json to_json(const HessianSpectrumReport& rep);
json to_json(const EvTable& table);
json to_json(const CascadeComplex& cx);
json to_json(const HomologyResult& h);

// Flat `key = value` config file mirroring SolverConfig plus the run-level
// keys (jobs, seed, log_level, output_dir, format). Blank lines and lines
// starting with '#' are skipped; unknown keys are errors, so a misspelled
// tolerance cannot pass silently.
struct RunConfig {
    SolverConfig solver;
    unsigned jobs = 0;  // 0 = hardware concurrency
    uint64_t seed = 12345;
    std::string log_level = "info";  // quiet | info | debug
    std::string output_dir = ".";
    std::string format = "json";  // json | csv

    void validate() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::string& path);

} // namespace freefall

#endif
