#pragma once

// Direct simulation: drive the reservoir, estimate <XX'> and <X y_tau'> by time
// averages, fit the least-squares readout and measure MC_tau on the retained
// states.

#include "esn_memory/errors.hpp"
#include "esn_memory/linalg.hpp"
#include "esn_memory/memory_curve.hpp"
#include "esn_memory/reservoir.hpp"

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

namespace esn_memory {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Row r holds x(start_time + r)'.
struct StateTrajectory {
    RowMatrix states;
    std::size_t start_time = 0;

    std::size_t length() const { return static_cast<std::size_t>(states.rows()); }
    std::size_t dim() const { return static_cast<std::size_t>(states.cols()); }
};

struct Readout {
    Vector weights;
};

/// x(0) = x0, x(t+1) = W x(t) + V u(t). Produces one state per input sample,
/// x(0) .. x(T-1).
inline StateTrajectory drive(const Reservoir& res, const InputStream& input, const Vector& x0)
{
    detail::require_length(static_cast<Eigen::Index>(res.size()), x0.size(), "drive initial state");
    if (input.size() == 0) throw ParameterError("drive: empty input stream");

    const auto steps = static_cast<Eigen::Index>(input.size());
    StateTrajectory traj;
    traj.states.resize(steps, x0.size());
    Vector x = x0;
    Vector next(x0.size());
    traj.states.row(0) = x.transpose();
    for (Eigen::Index t = 0; t + 1 < steps; ++t) {
        next.noalias() = res.w() * x;
        next += res.v() * input[static_cast<std::size_t>(t)];
        x.swap(next);
        traj.states.row(t + 1) = x.transpose();
    }
    if (!traj.states.allFinite()) {
        throw DivergenceError("drive: state left the finite range (spectral radius "
                              + std::to_string(res.lambda()) + ")");
    }
    return traj;
}

inline StateTrajectory drive(const Reservoir& res, const InputStream& input)
{
    return drive(res, input, Vector::Zero(static_cast<Eigen::Index>(res.size())));
}

inline StateTrajectory apply_washout(const StateTrajectory& traj, std::size_t washout)
{
    if (washout >= traj.length()) {
        throw ParameterError("apply_washout: washout " + std::to_string(washout)
                             + " leaves no states out of " + std::to_string(traj.length()));
    }
    StateTrajectory out;
    out.states = traj.states.bottomRows(static_cast<Eigen::Index>(traj.length() - washout));
    out.start_time = traj.start_time + washout;
    return out;
}

/// (1/T) sum_t x_t x_t'.
inline Matrix empirical_gram(const StateTrajectory& traj)
{
    if (traj.length() == 0) throw ParameterError("empirical_gram: empty trajectory");
    const auto n = static_cast<Eigen::Index>(traj.dim());
    Matrix g = Matrix::Zero(n, n);
    g.selfadjointView<Eigen::Lower>().rankUpdate(traj.states.transpose(),
                                                 1.0 / static_cast<double>(traj.length()));
    g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
    return g;
}

namespace detail {

/// u_{t - tau} for every retained t, as a view into the input.
inline Eigen::Map<const Vector> delayed_targets(const StateTrajectory& traj,
                                                const InputStream& input, std::size_t tau)
{
    if (tau < 1) throw ParameterError("delay must be at least 1");
    if (tau > traj.start_time) {
        throw AlignmentError("delay " + std::to_string(tau) + " reaches before the input start ("
                             + std::to_string(traj.start_time) + " steps retained before)");
    }
    if (traj.start_time + traj.length() - tau > input.size()) {
        throw AlignmentError("input stream shorter than the trajectory");
    }
    return {input.values.data() + (traj.start_time - tau),
            static_cast<Eigen::Index>(traj.length())};
}

}  // namespace detail

/// (1/T) sum_t x_t u_{t-tau}, with t the absolute time of each retained row.
inline Vector empirical_projection(const StateTrajectory& traj, const InputStream& input,
                                   std::size_t tau)
{
    const auto target = detail::delayed_targets(traj, input, tau);
    return traj.states.transpose() * target / static_cast<double>(traj.length());
}

/// Readout from an already factored Gram matrix.
inline Readout train_readout(const SymmetricPseudoInverse& gram, const Vector& proj)
{
    if (gram.rank() == 0) {
        throw SingularSystemError("train_readout: Gram matrix has no usable direction");
    }
    return Readout{gram.solve(proj)};
}

/// W_out = pinv(<XX'> + ridge I) <X y'>.
inline Readout train_readout(const Matrix& gram, const Vector& proj, double ridge)
{
    detail::require_square(gram, "train_readout");
    detail::require_length(gram.rows(), proj.size(), "train_readout projection");
    return train_readout(SymmetricPseudoInverse(gram, ridge), proj);
}

inline Vector readout_output(const StateTrajectory& traj, const Readout& r)
{
    detail::require_length(static_cast<Eigen::Index>(traj.dim()), r.weights.size(),
                           "readout_output");
    return traj.states * r.weights;
}

/// Cov^2(u_{t-tau}, y_t) / (Var(u_{t-tau}) Var(y_t)) with population moments.
/// The raw ratio is returned; zero output variance raises DegenerateError.
inline double empirical_mc_tau(const InputStream& input, const Vector& output,
                               std::size_t start_time, std::size_t tau)
{
    if (tau < 1) throw ParameterError("empirical_mc_tau: delay must be at least 1");
    if (tau > start_time) throw AlignmentError("empirical_mc_tau: delay reaches before input start");
    const auto len = static_cast<std::size_t>(output.size());
    if (len == 0) throw ParameterError("empirical_mc_tau: empty output");
    if (start_time + len - tau > input.size()) {
        throw AlignmentError("empirical_mc_tau: input stream shorter than output");
    }
    const Eigen::Map<const Vector> target(input.values.data() + (start_time - tau),
                                          static_cast<Eigen::Index>(len));
    const double inv_len = 1.0 / static_cast<double>(len);
    const Vector tc = target.array() - target.mean();
    const Vector yc = output.array() - output.mean();
    const double cov = tc.dot(yc) * inv_len;
    const double var_u = tc.squaredNorm() * inv_len;
    const double var_y = yc.squaredNorm() * inv_len;
    if (!(var_y > 0.0) || !(var_u > 0.0)) {
        throw DegenerateError("empirical_mc_tau: output or target has zero variance");
    }
    return cov * cov / (var_u * var_y);
}

/// One simulated trial: the estimators and the resulting memory curve.
struct EmpiricalRun {
    Matrix gram;
    Matrix projections;  // column tau-1 is <X y_tau'>
    MemoryCurve curve;
};

namespace detail {

inline void check_run_lengths(std::size_t length, std::size_t washout, std::size_t tau_max)
{
    if (tau_max < 1) throw ParameterError("tau_max must be at least 1");
    if (washout < tau_max) {
        throw ParameterError("washout " + std::to_string(washout) + " shorter than tau_max "
                             + std::to_string(tau_max));
    }
    if (length <= washout) {
        throw ParameterError("stream length " + std::to_string(length)
                             + " does not exceed washout " + std::to_string(washout));
    }
}

}  // namespace detail

/// Generate input, drive from x0 = 0, discard the washout and fit one readout
/// per delay against a single Gram factorization. MC values are clipped to
/// [0, 1]; a degenerate output reports 0.
inline EmpiricalRun run_empirical(const Reservoir& res, const InputSpec& spec, std::size_t length,
                                  std::size_t washout, std::size_t tau_max, double ridge)
{
    detail::check_run_lengths(length, washout, tau_max);
    const InputStream input = generate_input(spec, length);
    const StateTrajectory traj = apply_washout(drive(res, input), washout);

    EmpiricalRun run;
    run.gram = empirical_gram(traj);
    const SymmetricPseudoInverse solver(run.gram, ridge);
    run.projections.resize(static_cast<Eigen::Index>(res.size()),
                           static_cast<Eigen::Index>(tau_max));
    std::vector<double> mc(tau_max, 0.0);
    for (std::size_t tau = 1; tau <= tau_max; ++tau) {
        const Vector proj = empirical_projection(traj, input, tau);
        run.projections.col(static_cast<Eigen::Index>(tau - 1)) = proj;
        if (solver.rank() == 0) continue;
        const Vector y = readout_output(traj, train_readout(solver, proj));
        try {
            mc[tau - 1] = std::clamp(empirical_mc_tau(input, y, traj.start_time, tau), 0.0, 1.0);
        } catch (const DegenerateError&) {
            mc[tau - 1] = 0.0;
        }
    }
    run.curve = MemoryCurve(std::move(mc));
    return run;
}

inline MemoryCurve empirical_memory_curve(const Reservoir& res, const InputSpec& spec,
                                          std::size_t length, std::size_t washout,
                                          std::size_t tau_max, double ridge = 0.0)
{
    return run_empirical(res, spec, length, washout, tau_max, ridge).curve;
}

}  // namespace esn_memory
