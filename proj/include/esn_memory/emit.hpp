#pragma once

// File output for sweep results: tidy CSV, full-fidelity JSON and an optional
// gnuplot script. Numbers use the shortest representation that round-trips.

#include "esn_memory/config.hpp"
#include "esn_memory/errors.hpp"
#include "esn_memory/experiment.hpp"
#include "esn_memory/rng.hpp"

#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

namespace esn_memory {

inline std::string format_double(double value)
{
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) return "nan";
    return std::string(buf, end);
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kCurveCsvHeader = "n,lambda,tau,mc_analytic,mc_emp_mean,mc_emp_std";
inline constexpr const char* kZscoreCsvHeader = "source,z";
inline constexpr const char* kTransitionCsvHeader =
  "n,lambda,tau_star_analytic,tau_star_empirical,mc_total_analytic,mc_total_empirical,"
  "max_trial_std";

inline std::string curves_csv(const SweepResult& r)
{
    std::string out = std::string(kCurveCsvHeader) + "\n";
    for (const auto& p : r.points) {
        const std::string prefix = std::to_string(p.n) + "," + format_double(p.lambda) + ",";
        for (std::size_t i = 0; i < p.analytic.mean.size(); ++i) {
            out += prefix + std::to_string(i + 1) + "," + format_double(p.analytic.mean[i]) + ","
                   + format_double(p.empirical.mean[i]) + "," + format_double(p.empirical.std[i])
                   + "\n";
        }
    }
    return out;
}

inline std::string transitions_csv(const SweepResult& r)
{
    std::string out = std::string(kTransitionCsvHeader) + "\n";
    for (const auto& p : r.points) {
        double analytic_total = 0.0;
        double empirical_total = 0.0;
        for (double v : p.analytic.mean) analytic_total += v;
        for (double v : p.empirical.mean) empirical_total += v;
        out += std::to_string(p.n) + "," + format_double(p.lambda) + ","
               + std::to_string(p.tau_star_analytic) + "," + std::to_string(p.tau_star_empirical)
               + "," + format_double(analytic_total) + "," + format_double(empirical_total) + ","
               + format_double(p.max_trial_std()) + "\n";
    }
    return out;
}

inline std::string zscores_csv(std::span<const NormalizedEntryDataset> datasets)
{
    std::string out = std::string(kZscoreCsvHeader) + "\n";
    for (const auto& d : datasets) {
        const std::string source(to_string(d.source));
        for (double z : d.z) out += source + "," + format_double(z) + "\n";
    }
    return out;
}

inline std::vector<NormalizedEntryDataset> collect_datasets(const SweepResult& r)
{
    std::vector<NormalizedEntryDataset> all;
    for (const auto& p : r.points) {
        if (p.gram_z) all.push_back(*p.gram_z);
        if (p.projection_z) all.push_back(*p.projection_z);
    }
    return all;
}

inline std::string gnuplot_script(const SweepResult& r, const std::string& csv_name)
{
    std::string out;
    out += "# Memory curves: analytic lines, empirical mean points with std bars.\n";
    out += "set datafile separator ','\n";
    out += "set key outside right\n";
    out += "set xlabel 'tau'\n";
    out += "set ylabel 'MC_tau'\n";
    out += "set yrange [0:1.05]\n";
    out += "plot \\\n";
    for (std::size_t i = 0; i < r.points.size(); ++i) {
        const auto& p = r.points[i];
        const std::string sel = "(($1==" + std::to_string(p.n) + " && abs($2-"
                                + format_double(p.lambda) + ")<1e-12) ? ";
        const std::string title = "N=" + std::to_string(p.n) + " lambda=" + format_double(p.lambda);
        out += "  '" + csv_name + "' using 3:" + sel + "$4 : 1/0) with lines title '" + title
               + " analytic', \\\n";
        out += "  '" + csv_name + "' using 3:" + sel + "$5 : 1/0):6 with yerrorbars title '"
               + title + " empirical'";
        out += i + 1 < r.points.size() ? ", \\\n" : "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json curve_json(const MemoryCurve& c) { return c.mc; }

inline nlohmann::json to_json_value(const NormalizedEntryDataset& d)
{
    return {{"source", to_string(d.source)}, {"excluded", d.excluded}, {"mean", d.mean},
            {"variance", d.variance},        {"skewness", d.skewness}, {"z", d.z}};
}

inline NormalizedEntryDataset dataset_from_json(const nlohmann::json& j)
{
    NormalizedEntryDataset d;
    const auto source = j.at("source").get<std::string>();
    if (source == "gram") d.source = EntrySource::gram;
    else if (source == "projection") d.source = EntrySource::projection;
    else throw ParameterError("dataset JSON: unknown source '" + source + "'");
    d.excluded = j.at("excluded").get<std::size_t>();
    d.mean = j.at("mean").get<double>();
    d.variance = j.at("variance").get<double>();
    d.skewness = j.at("skewness").get<double>();
    d.z = j.at("z").get<std::vector<double>>();
    return d;
}

inline nlohmann::json to_json_value(const SweepResult& r)
{
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : r.points) {
        nlohmann::json systems = nlohmann::json::array();
        for (const auto& s : p.systems) {
            nlohmann::json empirical = nlohmann::json::array();
            for (const auto& c : s.empirical) empirical.push_back(curve_json(c));
            systems.push_back({{"index", s.index},
                               {"seed", s.seed},
                               {"analytic", curve_json(s.analytic)},
                               {"empirical", std::move(empirical)}});
        }
        nlohmann::json jp = {{"n", p.n},
                             {"lambda", p.lambda},
                             {"tau_star_analytic", p.tau_star_analytic},
                             {"tau_star_empirical", p.tau_star_empirical},
                             {"analytic_mean", p.analytic.mean},
                             {"analytic_std", p.analytic.std},
                             {"empirical_mean", p.empirical.mean},
                             {"empirical_std", p.empirical.std},
                             {"trial_std", p.trial_std},
                             {"systems", std::move(systems)}};
        if (p.gram_z) jp["gram_z"] = to_json_value(*p.gram_z);
        if (p.projection_z) jp["projection_z"] = to_json_value(*p.projection_z);
        points.push_back(std::move(jp));
    }
    return {{"rng", kRngVersion}, {"config", to_json_value(r.config)}, {"points", std::move(points)}};
}

inline SweepResult sweep_from_json(const nlohmann::json& j)
{
    try {
        SweepResult r;
        r.config = config_from_json(j.at("config"));
        for (const auto& jp : j.at("points")) {
            PointResult p;
            p.n = jp.at("n").get<std::size_t>();
            p.lambda = jp.at("lambda").get<double>();
            p.tau_star_analytic = jp.at("tau_star_analytic").get<std::size_t>();
            p.tau_star_empirical = jp.at("tau_star_empirical").get<std::size_t>();
            p.analytic = {jp.at("analytic_mean").get<std::vector<double>>(),
                          jp.at("analytic_std").get<std::vector<double>>()};
            p.empirical = {jp.at("empirical_mean").get<std::vector<double>>(),
                           jp.at("empirical_std").get<std::vector<double>>()};
            p.trial_std = jp.at("trial_std").get<std::vector<double>>();
            for (const auto& js : jp.at("systems")) {
                SystemResult s;
                s.index = js.at("index").get<std::size_t>();
                s.seed = js.at("seed").get<std::uint64_t>();
                s.analytic = MemoryCurve(js.at("analytic").get<std::vector<double>>());
                for (const auto& jc : js.at("empirical")) {
                    s.empirical.emplace_back(jc.get<std::vector<double>>());
                }
                p.systems.push_back(std::move(s));
            }
            if (jp.contains("gram_z")) p.gram_z = dataset_from_json(jp.at("gram_z"));
            if (jp.contains("projection_z")) p.projection_z = dataset_from_json(jp.at("projection_z"));
            r.points.push_back(std::move(p));
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("sweep JSON: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Files

inline void write_text_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    out << content;
    out.close();
    if (!out) throw IoError(path.string(), "write failed");
}

inline constexpr const char* kCurvesFile = "memory_curves.csv";
inline constexpr const char* kTransitionsFile = "transitions.csv";
inline constexpr const char* kZscoresFile = "zscores.csv";
inline constexpr const char* kSweepJsonFile = "sweep.json";
inline constexpr const char* kGnuplotFile = "memory_curves.gp";

/// Writes the sweep into `dir` and returns the paths written, in order.
inline std::vector<std::filesystem::path> emit(const SweepResult& r, OutputFormat format,
                                               const std::filesystem::path& dir,
                                               bool gnuplot = false)
{
    if (r.points.empty()) throw ConfigError("n_list", "sweep has no (n, lambda) combinations");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError(dir.string(), ec.message());

    std::vector<std::filesystem::path> written;
    auto put = [&](const char* name, const std::string& content) {
        write_text_file(dir / name, content);
        written.push_back(dir / name);
    };
    if (format == OutputFormat::json) {
        put(kSweepJsonFile, to_json_value(r).dump(1) + "\n");
    } else {
        put(kCurvesFile, curves_csv(r));
        put(kTransitionsFile, transitions_csv(r));
        const auto datasets = collect_datasets(r);
        if (!datasets.empty()) put(kZscoresFile, zscores_csv(datasets));
    }
    if (gnuplot) {
        if (format == OutputFormat::json) put(kCurvesFile, curves_csv(r));
        put(kGnuplotFile, gnuplot_script(r, kCurvesFile));
    }
    return written;
}

/// z-score CSV for one dataset.
inline void emit(const NormalizedEntryDataset& d, const std::filesystem::path& path)
{
    write_text_file(path, zscores_csv(std::span<const NormalizedEntryDataset>(&d, 1)));
}

}  // namespace esn_memory
