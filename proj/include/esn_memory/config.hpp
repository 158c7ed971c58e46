#pragma once

// Sweep configuration, presets and the JSON config file format.

#include "esn_memory/errors.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace esn_memory {

enum class SweepBackend { lyapunov, eigen, both };
enum class OutputFormat { csv, json };
/// Scale used for the normalized-entry z-scores: the spread across trials of
/// one system, or across all (system, trial) residuals of a sweep point.
enum class ZPooling { system, cross };

inline std::string_view to_string(SweepBackend b)
{
    switch (b) {
    case SweepBackend::lyapunov: return "lyapunov";
    case SweepBackend::eigen: return "eigen";
    case SweepBackend::both: return "both";
    }
    return "lyapunov";
}

inline std::string_view to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }
inline std::string_view to_string(ZPooling p) { return p == ZPooling::system ? "system" : "cross"; }

inline SweepBackend parse_backend(std::string_view s)
{
    if (s == "lyapunov") return SweepBackend::lyapunov;
    if (s == "eigen") return SweepBackend::eigen;
    if (s == "both") return SweepBackend::both;
    throw ConfigError("backend", "expected lyapunov|eigen|both, got '" + std::string(s) + "'");
}

inline OutputFormat parse_format(std::string_view s)
{
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw ConfigError("output_format", "expected csv|json, got '" + std::string(s) + "'");
}

inline ZPooling parse_pooling(std::string_view s)
{
    if (s == "system") return ZPooling::system;
    if (s == "cross") return ZPooling::cross;
    throw ConfigError("pooling", "expected system|cross, got '" + std::string(s) + "'");
}

/// Field names match the JSON config keys. Defaults follow the single-figure
/// protocol: ten systems, ten input streams each.
struct ExperimentConfig {
    std::vector<std::size_t> n_list{25, 50, 75, 100};
    std::vector<double> lambda_list{0.1, 0.5, 0.95};
    std::size_t systems = 10;
    std::size_t trials = 10;
    std::size_t T = 5000;
    std::size_t washout = 2000;
    std::size_t tau_max = 100;
    double ridge = 0.0;
    std::uint64_t root_seed = 1;
    SweepBackend backend = SweepBackend::lyapunov;
    std::string output_path = "out";
    OutputFormat output_format = OutputFormat::csv;

    /// Also collect normalized Gram/projection entries.
    bool zscores = false;
    ZPooling pooling = ZPooling::system;
    /// Write a gnuplot script next to the memory-curve CSV.
    bool gnuplot = false;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

inline void validate(const ExperimentConfig& c)
{
    if (c.n_list.empty()) throw ConfigError("n_list", "no reservoir sizes given");
    for (std::size_t n : c.n_list) {
        if (n < 1) throw ConfigError("n_list", "sizes must be at least 1");
    }
    if (c.lambda_list.empty()) throw ConfigError("lambda_list", "no spectral radii given");
    for (double l : c.lambda_list) {
        if (!(l > 0.0 && l < 1.0)) {
            throw ConfigError("lambda_list", "spectral radius " + std::to_string(l)
                                               + " outside (0, 1)");
        }
    }
    if (c.systems < 1) throw ConfigError("systems", "must be at least 1");
    if (c.trials < 1) throw ConfigError("trials", "must be at least 1");
    if (c.tau_max < 1) throw ConfigError("tau_max", "must be at least 1");
    if (c.washout < c.tau_max) throw ConfigError("washout", "must be at least tau_max");
    if (c.T <= c.washout) throw ConfigError("T", "must exceed washout");
    if (!(c.ridge >= 0.0)) throw ConfigError("ridge", "must be non-negative");
    if (c.zscores && c.trials < 2 && c.pooling == ZPooling::system) {
        throw ConfigError("trials", "z-scores with per-system pooling need at least 2 trials");
    }
}

/// `fig3`: one size and radius, 20 systems x 20 inputs, normalized entries on.
/// `fig4`: the full size x radius grid, 20 systems x 20 inputs.
inline void apply_preset(ExperimentConfig& c, std::string_view name)
{
    if (name == "fig3") {
        c.n_list = {50};
        c.lambda_list = {0.95};
        c.systems = 20;
        c.trials = 20;
        c.zscores = true;
    } else if (name == "fig4") {
        c.n_list = {25, 50, 75, 100};
        c.lambda_list = {0.1, 0.5, 0.95};
        c.systems = 20;
        c.trials = 20;
    } else {
        throw ConfigError("preset", "unknown preset '" + std::string(name) + "'");
    }
}

inline nlohmann::json to_json_value(const ExperimentConfig& c)
{
    return {{"n_list", c.n_list},
            {"lambda_list", c.lambda_list},
            {"systems", c.systems},
            {"trials", c.trials},
            {"T", c.T},
            {"washout", c.washout},
            {"tau_max", c.tau_max},
            {"ridge", c.ridge},
            {"root_seed", c.root_seed},
            {"backend", to_string(c.backend)},
            {"output_path", c.output_path},
            {"output_format", to_string(c.output_format)},
            {"zscores", c.zscores},
            {"pooling", to_string(c.pooling)},
            {"gnuplot", c.gnuplot}};
}

/// Overlays the keys present in `j` onto `c`. Unknown keys are rejected.
inline void merge_config(ExperimentConfig& c, const nlohmann::json& j)
{
    if (!j.is_object()) throw ConfigError("config", "expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "n_list") c.n_list = value.get<std::vector<std::size_t>>();
            else if (key == "lambda_list") c.lambda_list = value.get<std::vector<double>>();
            else if (key == "systems") c.systems = value.get<std::size_t>();
            else if (key == "trials") c.trials = value.get<std::size_t>();
            else if (key == "T") c.T = value.get<std::size_t>();
            else if (key == "washout") c.washout = value.get<std::size_t>();
            else if (key == "tau_max") c.tau_max = value.get<std::size_t>();
            else if (key == "ridge") c.ridge = value.get<double>();
            else if (key == "root_seed") c.root_seed = value.get<std::uint64_t>();
            else if (key == "backend") c.backend = parse_backend(value.get<std::string>());
            else if (key == "output_path") c.output_path = value.get<std::string>();
            else if (key == "output_format") c.output_format = parse_format(value.get<std::string>());
            else if (key == "zscores") c.zscores = value.get<bool>();
            else if (key == "pooling") c.pooling = parse_pooling(value.get<std::string>());
            else if (key == "gnuplot") c.gnuplot = value.get<bool>();
            else throw ConfigError(key, "unknown config field");
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(key, e.what());
        }
    }
}

inline ExperimentConfig config_from_json(const nlohmann::json& j)
{
    ExperimentConfig c;
    merge_config(c, j);
    return c;
}

inline nlohmann::json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open for reading");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config", path + ": " + e.what());
    }
}

}  // namespace esn_memory
