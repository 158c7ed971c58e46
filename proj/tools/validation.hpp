#pragma once

// Oracle cross-checks behind `esn-memory validate`.

#include "esn_memory/esn_memory.hpp"
#include "esn_memory/oracles.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace esn_memory::tools {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

inline double relative_gap(const Matrix& a, const Matrix& b)
{
    return max_norm(a - b) / detail::scale_or_one(max_norm(b));
}

inline std::vector<CheckResult> run_validation(std::uint64_t seed)
{
    std::vector<CheckResult> checks;
    auto record = [&](std::string name, bool ok, std::string detail) {
        checks.push_back({std::move(name), ok, std::move(detail)});
    };
    auto guarded = [&](const std::string& name, auto&& body) {
        try {
            body();
        } catch (const std::exception& e) {
            record(name, false, std::string("threw: ") + e.what());
        }
    };

    guarded("gram-backends-vs-series", [&] {
        double worst_eigen = 0.0;
        double worst_lyap = 0.0;
        double worst_cross = 0.0;
        int systems = 0;
        for (std::size_t n : {5, 25, 50}) {
            for (double lambda : {0.1, 0.5, 0.95}) {
                for (std::uint64_t s = 0; s < 2; ++s) {
                    const auto res = generate_reservoir(n, lambda, derive_seed(seed, {n, s}));
                    const Matrix series =
                      oracle::truncated_series_gram(res.w(), res.v(), InputSpec::variance);
                    const Matrix eig = analytic_gram(res, GramBackend::eigen).g;
                    const Matrix lyap = analytic_gram(res, GramBackend::lyapunov).g;
                    worst_eigen = std::max(worst_eigen, relative_gap(eig, series));
                    worst_lyap = std::max(worst_lyap, relative_gap(lyap, series));
                    worst_cross = std::max(worst_cross, relative_gap(eig, lyap));
                    ++systems;
                }
            }
        }
        const bool ok = worst_eigen < 1e-8 && worst_lyap < 1e-8 && worst_cross < 1e-8;
        record("gram-backends-vs-series", ok,
               std::to_string(systems) + " systems, eigen " + format_double(worst_eigen)
                 + ", lyapunov " + format_double(worst_lyap) + ", cross " + format_double(worst_cross));
    });

    guarded("scalar-closed-form", [&] {
        double worst = 0.0;
        double worst_total = 0.0;
        for (double a : {-0.9, -0.5, -0.1, 0.1, 0.5, 0.9}) {
            const auto res = Reservoir::from_weights(Matrix::Constant(1, 1, a), Vector::Ones(1));
            const auto curve =
              analytic_memory_curve(res, InputSpec::variance, 2000, GramBackend::lyapunov);
            for (std::size_t tau = 1; tau <= curve.tau_max(); ++tau) {
                worst = std::max(worst, std::abs(curve.at(tau) - oracle::scalar_mc_tau(a, tau)));
            }
            worst_total = std::max(worst_total, std::abs(curve.total - 1.0));
        }
        record("scalar-closed-form", worst < 1e-12 && worst_total < 1e-9,
               "max |MC - a^(2(tau-1))(1-a^2)| " + format_double(worst) + ", max |total - 1| "
                 + format_double(worst_total));
    });

    guarded("state-expansion", [&] {
        double worst = 0.0;
        for (std::uint64_t s = 0; s < 10; ++s) {
            const auto res = generate_reservoir(8, 0.9, derive_seed(seed, {100, s}));
            const auto input = generate_input(InputSpec{derive_seed(seed, {101, s})}, 120);
            const auto traj = drive(res, input);
            const Matrix expected = oracle::explicit_states(res.w(), res.v(), input, 120);
            worst = std::max(worst, max_norm(Matrix(traj.states) - expected));
        }
        record("state-expansion", worst < 1e-10, "max-norm gap " + format_double(worst));
    });

    guarded("lyapunov-residual", [&] {
        const auto res = generate_reservoir(20, 0.95, derive_seed(seed, {200}));
        const Matrix q = res.v() * res.v().transpose();
        const Matrix g = solve_discrete_lyapunov(res.w(), q);
        const double residual = max_norm(g - (res.w() * g * res.w().transpose() + q)) / max_norm(q);
        record("lyapunov-residual", residual < 1e-10, "relative residual " + format_double(residual));
    });

    guarded("memory-bound", [&] {
        double worst_excess = -1e300;
        for (std::size_t n : {5, 25, 50}) {
            for (double lambda : {0.1, 0.5, 0.95}) {
                const auto res = generate_reservoir(n, lambda, derive_seed(seed, {300, n}));
                const auto curve =
                  analytic_memory_curve(res, InputSpec::variance, 200, GramBackend::lyapunov);
                worst_excess = std::max(worst_excess, curve.total - static_cast<double>(n));
                for (double v : curve.mc) {
                    if (v < 0.0 || v > 1.0 + 1e-9) worst_excess = std::max(worst_excess, 1e300);
                }
            }
        }
        record("memory-bound", worst_excess <= 1e-6,
               "max (total - N) " + format_double(worst_excess));
    });

    return checks;
}

}  // namespace esn_memory::tools
