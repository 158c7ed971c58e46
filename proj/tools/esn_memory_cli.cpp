// esn-memory: closed-form vs simulated memory curves of linear echo state networks.

#include "esn_memory/esn_memory.hpp"
#include "validation.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace esn_memory;

struct SweepFlags {
    std::string config_file;
    std::string preset;
    std::vector<std::size_t> n_list;
    std::vector<double> lambda_list;
    std::size_t systems = 0;
    std::size_t trials = 0;
    std::size_t train_len = 0;
    std::size_t washout = 0;
    std::size_t tau_max = 0;
    double ridge = 0.0;
    std::uint64_t seed = 0;
    std::string backend;
    std::string format;
    std::string out;
    std::string pooling;
    bool zscores = false;
    bool gnuplot = false;
    std::size_t threads = 0;
};

struct CurveFlags {
    std::size_t n = 50;
    double lambda = 0.95;
    std::uint64_t seed = 1;
    std::size_t trials = 10;
    std::size_t train_len = 5000;
    std::size_t washout = 2000;
    std::size_t tau_max = 100;
    double ridge = 0.0;
    std::string backend = "lyapunov";
    std::string reservoir_in;
    std::string reservoir_out;
};

int run_sweep_command(const SweepFlags& f, CLI::App& cmd)
{
    ExperimentConfig config;
    if (!f.preset.empty()) apply_preset(config, f.preset);
    if (!f.config_file.empty()) merge_config(config, read_json_file(f.config_file));

    auto given = [&](const char* name) { return cmd.get_option(name)->count() > 0; };
    if (given("--n")) config.n_list = f.n_list;
    if (given("--lambda")) config.lambda_list = f.lambda_list;
    if (given("--systems")) config.systems = f.systems;
    if (given("--trials")) config.trials = f.trials;
    if (given("--train-len")) config.T = f.train_len;
    if (given("--washout")) config.washout = f.washout;
    if (given("--tau-max")) config.tau_max = f.tau_max;
    if (given("--ridge")) config.ridge = f.ridge;
    if (given("--seed")) config.root_seed = f.seed;
    if (given("--backend")) config.backend = parse_backend(f.backend);
    if (given("--format")) config.output_format = parse_format(f.format);
    if (given("--out")) config.output_path = f.out;
    if (given("--pooling")) config.pooling = parse_pooling(f.pooling);
    if (given("--zscores")) config.zscores = true;
    if (given("--gnuplot")) config.gnuplot = true;

    validate(config);
    const SweepResult result = run_sweep(config, f.threads);
    for (const auto& path : emit(result, config.output_format, config.output_path, config.gnuplot)) {
        std::cerr << "wrote " << path.string() << "\n";
    }
    for (const auto& p : result.points) {
        std::cerr << "n=" << p.n << " lambda=" << format_double(p.lambda)
                  << " tau*_analytic=" << p.tau_star_analytic
                  << " tau*_empirical=" << p.tau_star_empirical << "\n";
    }
    return 0;
}

int run_curve_command(const CurveFlags& f)
{
    const Reservoir res = f.reservoir_in.empty()
                            ? generate_reservoir(f.n, f.lambda, f.seed)
                            : reservoir_from_json(read_json_file(f.reservoir_in));
    if (!f.reservoir_out.empty()) write_text_file(f.reservoir_out, to_json_value(res).dump() + "\n");

    const GramBackend backend = f.backend == "eigen" ? GramBackend::eigen : GramBackend::lyapunov;
    if (f.backend != "eigen" && f.backend != "lyapunov") {
        throw ConfigError("backend", "expected lyapunov|eigen, got '" + f.backend + "'");
    }
    if (f.trials < 1) throw ConfigError("trials", "must be at least 1");
    const MemoryCurve analytic = analytic_memory_curve(res, InputSpec::variance, f.tau_max, backend);
    std::vector<MemoryCurve> empirical;
    for (std::size_t k = 0; k < f.trials; ++k) {
        empirical.push_back(empirical_memory_curve(res, InputSpec{trial_seed(res.seed(), k)},
                                                   f.train_len, f.washout, f.tau_max, f.ridge));
    }
    const CurveSummary summary = summarize_curves(empirical);

    std::cout << "tau,mc_analytic,mc_emp_mean,mc_emp_std\n";
    for (std::size_t i = 0; i < f.tau_max; ++i) {
        std::cout << (i + 1) << "," << format_double(analytic.mc[i]) << ","
                  << format_double(summary.mean[i]) << "," << format_double(summary.std[i]) << "\n";
    }
    double emp_total = 0.0;
    for (double v : summary.mean) emp_total += v;
    std::cerr << "N=" << res.size() << " lambda=" << format_double(res.lambda())
              << " total_analytic=" << format_double(analytic.total)
              << " total_empirical=" << format_double(emp_total) << "\n";
    return 0;
}

int run_validate_command(std::uint64_t seed)
{
    bool all = true;
    for (const auto& c : tools::run_validation(seed)) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
        all = all && c.passed;
    }
    return all ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Analytic and simulated memory curves of linear echo state networks"};
    app.require_subcommand(1);

    SweepFlags sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run an (N, lambda) sweep and write CSV/JSON");
    sweep_cmd->add_option("--config", sweep.config_file, "JSON config file");
    sweep_cmd->add_option("--preset", sweep.preset, "fig3 | fig4");
    sweep_cmd->add_option("--n", sweep.n_list, "Reservoir sizes")->delimiter(',');
    sweep_cmd->add_option("--lambda", sweep.lambda_list, "Spectral radii")->delimiter(',');
    sweep_cmd->add_option("--systems", sweep.systems, "Reservoirs per (N, lambda)");
    sweep_cmd->add_option("--trials", sweep.trials, "Input streams per reservoir");
    sweep_cmd->add_option("--train-len", sweep.train_len, "Input stream length T");
    sweep_cmd->add_option("--washout", sweep.washout, "Discarded initial states");
    sweep_cmd->add_option("--tau-max", sweep.tau_max, "Largest delay");
    sweep_cmd->add_option("--ridge", sweep.ridge, "Ridge added to the Gram matrix");
    sweep_cmd->add_option("--seed", sweep.seed, "Root seed");
    sweep_cmd->add_option("--backend", sweep.backend, "lyapunov | eigen | both");
    sweep_cmd->add_option("--format", sweep.format, "csv | json");
    sweep_cmd->add_option("--out", sweep.out, "Output directory");
    sweep_cmd->add_option("--pooling", sweep.pooling, "z-score scale: system | cross");
    sweep_cmd->add_flag("--zscores", sweep.zscores, "Collect normalized Gram/projection entries");
    sweep_cmd->add_flag("--gnuplot", sweep.gnuplot, "Also write a gnuplot script");
    sweep_cmd->add_option("--threads", sweep.threads, "Worker threads (0 = all cores)");

    CurveFlags curve;
    auto* curve_cmd = app.add_subcommand("curve", "Print analytic and simulated curve of one system");
    curve_cmd->add_option("--n", curve.n, "Reservoir size");
    curve_cmd->add_option("--lambda", curve.lambda, "Spectral radius");
    curve_cmd->add_option("--seed", curve.seed, "Reservoir seed");
    curve_cmd->add_option("--trials", curve.trials, "Input streams");
    curve_cmd->add_option("--train-len", curve.train_len, "Input stream length T");
    curve_cmd->add_option("--washout", curve.washout, "Discarded initial states");
    curve_cmd->add_option("--tau-max", curve.tau_max, "Largest delay");
    curve_cmd->add_option("--ridge", curve.ridge, "Ridge added to the Gram matrix");
    curve_cmd->add_option("--backend", curve.backend, "lyapunov | eigen");
    curve_cmd->add_option("--reservoir", curve.reservoir_in, "Load reservoir JSON instead of generating");
    curve_cmd->add_option("--save-reservoir", curve.reservoir_out, "Write the reservoir as JSON");

    std::uint64_t validate_seed = 7;
    auto* validate_cmd = app.add_subcommand("validate", "Run oracle cross-checks");
    validate_cmd->add_option("--seed", validate_seed, "Seed for the checked systems");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*sweep_cmd) return run_sweep_command(sweep, *sweep_cmd);
        if (*curve_cmd) return run_curve_command(curve);
        if (*validate_cmd) return run_validate_command(validate_seed);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.category());
    }
    return 0;
}
