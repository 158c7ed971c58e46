#pragma once

// Sweeps over reservoir size and spectral radius comparing the closed-form
// memory curve with simulated ones, plus the normalized-entry datasets that
// show where the simulated estimators scatter around the closed forms.

#include "esn_memory/analytic.hpp"
#include "esn_memory/config.hpp"
#include "esn_memory/errors.hpp"
#include "esn_memory/linalg.hpp"
#include "esn_memory/memory_curve.hpp"
#include "esn_memory/reservoir.hpp"
#include "esn_memory/rng.hpp"
#include "esn_memory/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace esn_memory {

// ---------------------------------------------------------------------------
// Curve statistics

struct CurveSummary {
    std::vector<double> mean;
    std::vector<double> std;  // population

    friend bool operator==(const CurveSummary&, const CurveSummary&) = default;
};

inline CurveSummary summarize_curves(std::span<const MemoryCurve> curves)
{
    if (curves.empty()) throw ParameterError("summarize_curves: no curves");
    const std::size_t len = curves.front().tau_max();
    for (const auto& c : curves) {
        if (c.tau_max() != len) throw DimensionError("summarize_curves: curves differ in tau_max");
    }
    const double count = static_cast<double>(curves.size());
    CurveSummary s{std::vector<double>(len, 0.0), std::vector<double>(len, 0.0)};
    for (std::size_t i = 0; i < len; ++i) {
        double sum = 0.0;
        for (const auto& c : curves) sum += c.mc[i];
        const double mean = sum / count;
        double sq = 0.0;
        for (const auto& c : curves) sq += (c.mc[i] - mean) * (c.mc[i] - mean);
        s.mean[i] = mean;
        s.std[i] = std::sqrt(sq / count);
    }
    return s;
}

/// Largest delay with mean MC at or above 0.5; 0 when there is none.
inline std::size_t transition_point(const std::vector<double>& mean_curve)
{
    for (std::size_t i = mean_curve.size(); i > 0; --i) {
        if (mean_curve[i - 1] >= 0.5) return i;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// Normalized entries

enum class EntrySource { gram, projection };

inline std::string_view to_string(EntrySource s) { return s == EntrySource::gram ? "gram" : "projection"; }

struct NormalizedEntryDataset {
    EntrySource source = EntrySource::gram;
    std::vector<double> z;
    std::size_t excluded = 0;  // entries with no spread across samples
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;

    friend bool operator==(const NormalizedEntryDataset&, const NormalizedEntryDataset&) = default;
};

inline constexpr double kDegenerateSpread = 1e-14;

namespace detail {

inline void fill_moments(NormalizedEntryDataset& d)
{
    if (d.z.empty()) {
        d.mean = d.variance = d.skewness = 0.0;
        return;
    }
    const double count = static_cast<double>(d.z.size());
    double sum = 0.0;
    for (double v : d.z) sum += v;
    d.mean = sum / count;
    double m2 = 0.0;
    double m3 = 0.0;
    for (double v : d.z) {
        const double c = v - d.mean;
        m2 += c * c;
        m3 += c * c * c;
    }
    m2 /= count;
    m3 /= count;
    d.variance = m2;
    d.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
}

}  // namespace detail

/// z = (sample_e - analytic_e) / s_e for each entry e of each sample, where s_e
/// is the sample standard deviation of the residuals of entry e. `analytic`
/// holds one reference per sample (they may differ when pooling across
/// systems).
inline NormalizedEntryDataset normalize_entries(std::span<const Matrix> samples,
                                                std::span<const Matrix> analytic,
                                                EntrySource source)
{
    if (samples.size() < 2) throw ParameterError("normalize_entries: need at least 2 samples");
    if (analytic.size() != samples.size()) {
        throw DimensionError("normalize_entries: one analytic reference per sample required");
    }
    const auto rows = samples.front().rows();
    const auto cols = samples.front().cols();
    for (std::size_t k = 0; k < samples.size(); ++k) {
        if (samples[k].rows() != rows || samples[k].cols() != cols || analytic[k].rows() != rows
            || analytic[k].cols() != cols) {
            throw DimensionError("normalize_entries: sample shapes differ");
        }
    }

    const double count = static_cast<double>(samples.size());
    Matrix mean = Matrix::Zero(rows, cols);
    for (std::size_t k = 0; k < samples.size(); ++k) mean += samples[k] - analytic[k];
    mean /= count;
    Matrix spread = Matrix::Zero(rows, cols);
    for (std::size_t k = 0; k < samples.size(); ++k) {
        spread += (samples[k] - analytic[k] - mean).cwiseAbs2();
    }
    spread = (spread / (count - 1.0)).cwiseSqrt();

    NormalizedEntryDataset out;
    out.source = source;
    out.z.reserve(samples.size() * static_cast<std::size_t>(rows * cols));
    for (std::size_t k = 0; k < samples.size(); ++k) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            for (Eigen::Index i = 0; i < rows; ++i) {
                if (!(spread(i, j) >= kDegenerateSpread)) continue;
                out.z.push_back((samples[k](i, j) - analytic[k](i, j)) / spread(i, j));
            }
        }
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            if (!(spread(i, j) >= kDegenerateSpread)) ++out.excluded;
        }
    }
    if (out.z.empty()) throw DegenerateError("normalize_entries: every entry is degenerate");
    detail::fill_moments(out);
    return out;
}

inline NormalizedEntryDataset normalize_entries(std::span<const Matrix> samples,
                                                const Matrix& analytic, EntrySource source)
{
    const std::vector<Matrix> refs(samples.size(), analytic);
    return normalize_entries(samples, refs, source);
}

/// Concatenates datasets of one source and recomputes the moments.
inline NormalizedEntryDataset pool_datasets(std::span<const NormalizedEntryDataset> parts)
{
    if (parts.empty()) throw ParameterError("pool_datasets: nothing to pool");
    NormalizedEntryDataset out;
    out.source = parts.front().source;
    for (const auto& p : parts) {
        out.z.insert(out.z.end(), p.z.begin(), p.z.end());
        out.excluded += p.excluded;
    }
    detail::fill_moments(out);
    return out;
}

// ---------------------------------------------------------------------------
// Sweep

struct SystemResult {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    MemoryCurve analytic;
    std::vector<MemoryCurve> empirical;  // one per trial

    friend bool operator==(const SystemResult&, const SystemResult&) = default;
};

struct PointResult {
    std::size_t n = 0;
    double lambda = 0.0;
    std::vector<SystemResult> systems;
    CurveSummary analytic;   // across systems
    CurveSummary empirical;  // across all (system, trial) curves
    /// Per delay: within-system std across trials, averaged over systems.
    std::vector<double> trial_std;
    std::size_t tau_star_empirical = 0;
    std::size_t tau_star_analytic = 0;
    std::optional<NormalizedEntryDataset> gram_z;
    std::optional<NormalizedEntryDataset> projection_z;

    double max_trial_std() const
    {
        return trial_std.empty() ? 0.0 : *std::max_element(trial_std.begin(), trial_std.end());
    }

    friend bool operator==(const PointResult&, const PointResult&) = default;
};

struct SweepResult {
    ExperimentConfig config;
    std::vector<PointResult> points;  // n-major, then lambda, in config order

    friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

inline std::uint64_t system_seed(std::uint64_t root, std::size_t n, std::size_t lambda_index,
                                 std::size_t system)
{
    return derive_seed(root, {static_cast<std::uint64_t>(StreamRole::system), n, lambda_index,
                              system});
}

inline std::uint64_t trial_seed(std::uint64_t system_seed, std::size_t trial)
{
    return derive_seed(system_seed, {static_cast<std::uint64_t>(StreamRole::trial), trial});
}

inline constexpr double kBackendAgreementTolerance = 1e-8;

/// Analytic Gram for the configured backend; `both` cross-checks the two
/// routes and continues with the Lyapunov one.
inline AnalyticGram sweep_gram(const Reservoir& res, SweepBackend backend)
{
    switch (backend) {
    case SweepBackend::eigen: return analytic_gram(res, GramBackend::eigen);
    case SweepBackend::lyapunov: return analytic_gram(res, GramBackend::lyapunov);
    case SweepBackend::both: {
        AnalyticGram lyap = analytic_gram(res, GramBackend::lyapunov);
        const AnalyticGram eig = analytic_gram(res, GramBackend::eigen);
        const double gap = max_norm(lyap.g - eig.g);
        if (!(gap <= kBackendAgreementTolerance * detail::scale_or_one(max_norm(lyap.g)))) {
            throw NumericalError("Gram backends disagree (max-norm gap " + std::to_string(gap) + ")");
        }
        return lyap;
    }
    }
    return analytic_gram(res, GramBackend::lyapunov);
}

namespace detail {

struct SystemWork {
    SystemResult result;
    Matrix analytic_gram;
    Matrix analytic_projections;
    std::vector<Matrix> grams;
    std::vector<Matrix> projections;
};

inline std::string coordinates(std::size_t n, double lambda, std::size_t system,
                               std::optional<std::size_t> trial)
{
    std::string s = "n=" + std::to_string(n) + " lambda=" + std::to_string(lambda)
                    + " system=" + std::to_string(system);
    if (trial) s += " trial=" + std::to_string(*trial);
    return s;
}

inline SystemWork run_system(const ExperimentConfig& c, std::size_t n, double lambda,
                             std::size_t lambda_index, std::size_t system)
{
    SystemWork work;
    work.result.index = system;
    work.result.seed = system_seed(c.root_seed, n, lambda_index, system);
    std::optional<std::size_t> trial;
    try {
        const Reservoir res = generate_reservoir(n, lambda, work.result.seed);
        const AnalyticGram gram = sweep_gram(res, c.backend);
        work.result.analytic = analytic_memory_curve(res, gram, InputSpec::variance, c.tau_max);
        if (c.zscores) {
            work.analytic_gram = gram.g;
            work.analytic_projections = analytic_projections(res, InputSpec::variance, c.tau_max);
        }
        for (std::size_t k = 0; k < c.trials; ++k) {
            trial = k;
            const InputSpec spec{trial_seed(work.result.seed, k)};
            EmpiricalRun run = run_empirical(res, spec, c.T, c.washout, c.tau_max, c.ridge);
            work.result.empirical.push_back(std::move(run.curve));
            if (c.zscores) {
                work.grams.push_back(std::move(run.gram));
                work.projections.push_back(std::move(run.projections));
            }
        }
    } catch (const Error& e) {
        throw Error(e.category(), coordinates(n, lambda, system, trial) + ": " + e.what());
    }
    return work;
}

template <typename Task>
void parallel_for(std::size_t count, std::size_t threads, const Task& task)
{
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, count);
    std::vector<std::exception_ptr> errors(count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            try {
                task(i);
            } catch (...) {
                errors[i] = std::current_exception();
                break;
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::atomic<bool> failed{false};
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count && !failed; i = next++) {
                    try {
                        task(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                        failed = true;
                    }
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

inline void fill_datasets(PointResult& point, std::span<const SystemWork> work, ZPooling pooling)
{
    if (pooling == ZPooling::system) {
        std::vector<NormalizedEntryDataset> grams;
        std::vector<NormalizedEntryDataset> projections;
        for (const auto& w : work) {
            grams.push_back(normalize_entries(w.grams, w.analytic_gram, EntrySource::gram));
            projections.push_back(
              normalize_entries(w.projections, w.analytic_projections, EntrySource::projection));
        }
        point.gram_z = pool_datasets(grams);
        point.projection_z = pool_datasets(projections);
        return;
    }
    std::vector<Matrix> samples;
    std::vector<Matrix> refs;
    for (const auto& w : work) {
        for (const auto& g : w.grams) {
            samples.push_back(g);
            refs.push_back(w.analytic_gram);
        }
    }
    point.gram_z = normalize_entries(samples, refs, EntrySource::gram);
    samples.clear();
    refs.clear();
    for (const auto& w : work) {
        for (const auto& p : w.projections) {
            samples.push_back(p);
            refs.push_back(w.analytic_projections);
        }
    }
    point.projection_z = normalize_entries(samples, refs, EntrySource::projection);
}

}  // namespace detail

/// Runs every (n, lambda, system, trial) combination; the result depends only
/// on the configuration, not on `threads` (0 = hardware concurrency).
inline SweepResult run_sweep(const ExperimentConfig& config, std::size_t threads = 0)
{
    validate(config);
    const std::size_t n_points = config.n_list.size() * config.lambda_list.size();
    const std::size_t n_tasks = n_points * config.systems;

    std::vector<detail::SystemWork> work(n_tasks);
    detail::parallel_for(n_tasks, threads, [&](std::size_t task) {
        const std::size_t point = task / config.systems;
        const std::size_t system = task % config.systems;
        const std::size_t ni = point / config.lambda_list.size();
        const std::size_t li = point % config.lambda_list.size();
        work[task] = detail::run_system(config, config.n_list[ni], config.lambda_list[li], li, system);
    });

    SweepResult out;
    out.config = config;
    for (std::size_t p = 0; p < n_points; ++p) {
        PointResult point;
        point.n = config.n_list[p / config.lambda_list.size()];
        point.lambda = config.lambda_list[p % config.lambda_list.size()];
        const std::span<const detail::SystemWork> mine(work.data() + p * config.systems,
                                                       config.systems);

        std::vector<MemoryCurve> analytic;
        std::vector<MemoryCurve> empirical;
        point.trial_std.assign(config.tau_max, 0.0);
        for (const auto& w : mine) {
            analytic.push_back(w.result.analytic);
            empirical.insert(empirical.end(), w.result.empirical.begin(), w.result.empirical.end());
            const CurveSummary within = summarize_curves(w.result.empirical);
            for (std::size_t i = 0; i < config.tau_max; ++i) point.trial_std[i] += within.std[i];
        }
        for (double& s : point.trial_std) s /= static_cast<double>(config.systems);
        point.analytic = summarize_curves(analytic);
        point.empirical = summarize_curves(empirical);
        point.tau_star_analytic = transition_point(point.analytic.mean);
        point.tau_star_empirical = transition_point(point.empirical.mean);
        if (config.zscores) {
            try {
                detail::fill_datasets(point, mine, config.pooling);
            } catch (const Error& e) {
                throw Error(e.category(), "n=" + std::to_string(point.n) + " lambda="
                                            + std::to_string(point.lambda) + ": " + e.what());
            }
        }
        for (const auto& w : mine) point.systems.push_back(w.result);
        out.points.push_back(std::move(point));
    }
    return out;
}

}  // namespace esn_memory
