#pragma once

// Report plumbing for the experiment runner. A run produces one fixed-schema
// record; its JSON body is a pure function of inputs and seed, so re-running
// the same config yields byte-identical bodies. Wall time is reported outside
// the body (a trailing line in the CLI, the final CSV column in tables) and
// is the only nondeterministic output.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "banlab/serialize.hpp"

namespace banlab {

constexpr int exit_ok = 0;
constexpr int exit_validation = 2;
constexpr int exit_probe = 3;

struct experiment_config {
    std::string command;             // subcommand path, e.g. "gd cyclic"
    std::vector<std::string> inputs; // input object file paths
    std::uint64_t seed = 0;
    int budget = 200;
    double tol = 1e-9;
    bool exact = false;
    std::string output;              // report file path; empty writes to stdout
    std::string format = "json";     // json | csv
    json options;                    // command-specific parameters
};

inline experiment_config config_from_json(const json& j) {
    experiment_config c;
    c.command = j.at("command").get<std::string>();
    if (j.contains("inputs"))
        for (const auto& e : j.at("inputs")) c.inputs.push_back(e.get<std::string>());
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("budget")) c.budget = j.at("budget").get<int>();
    if (j.contains("tol")) c.tol = j.at("tol").get<double>();
    if (j.contains("exact")) c.exact = j.at("exact").get<bool>();
    if (j.contains("output")) c.output = j.at("output").get<std::string>();
    if (j.contains("format")) c.format = j.at("format").get<std::string>();
    if (c.format != "json" && c.format != "csv")
        throw std::invalid_argument("config: format must be json or csv");
    if (j.contains("options")) c.options = j.at("options");
    return c;
}

struct run_report {
    std::string command;
    std::string parameters; // canonical "key=value ..." string, ends with budget
    std::uint64_t seed = 0;
    int budget = 0;
    double value = 0;
    double lower = 0;
    double upper = 0;
    bool exact = false;
    long long runtime_ms = 0;
    json detail; // command-specific payload, deterministic content only
};

inline double report_gap(const run_report& r) { return r.upper - r.lower; }

// Body only: no wall time, no timestamp. nlohmann's object keys are sorted,
// so dumping at a fixed indent is byte-stable.
inline json report_body(const run_report& r) {
    json j;
    j["command"] = r.command;
    j["parameters"] = r.parameters;
    j["seed"] = r.seed;
    j["budget"] = r.budget;
    j["value"] = scalar_to_string(r.value);
    j["lower"] = scalar_to_string(r.lower);
    j["upper"] = scalar_to_string(r.upper);
    j["gap"] = scalar_to_string(report_gap(r));
    j["exact"] = r.exact;
    if (!r.detail.is_null()) j["detail"] = r.detail;
    return j;
}

namespace detail {

inline std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace detail

inline const char* csv_header() {
    return "parameters,value,lower,upper,gap,seed,runtime-ms";
}

inline std::string csv_row(const run_report& r) {
    std::string row = detail::csv_cell(r.parameters);
    row += ',';
    row += scalar_to_string(r.value);
    row += ',';
    row += scalar_to_string(r.lower);
    row += ',';
    row += scalar_to_string(r.upper);
    row += ',';
    row += scalar_to_string(report_gap(r));
    row += ',';
    row += std::to_string(r.seed);
    row += ',';
    row += std::to_string(r.runtime_ms);
    return row;
}

// One row per report. Reports from different commands carry different
// parameter schemas and may not be mixed in one table.
inline std::string emit_table(const std::vector<run_report>& reports) {
    for (const auto& r : reports)
        if (r.command != reports.front().command)
            throw std::invalid_argument("emit_table: mixed report schemas");
    std::string out = csv_header();
    out += '\n';
    for (const auto& r : reports) {
        out += csv_row(r);
        out += '\n';
    }
    return out;
}

} // namespace banlab
