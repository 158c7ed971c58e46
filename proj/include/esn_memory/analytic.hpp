#pragma once

// Closed-form memory curve of a linear ESN driven by i.i.d. input of variance s2.
//
// In the infinite-stream limit the state Gram matrix is
//     G = s2 * sum_{i>=0} W^i V V' (W')^i,
// and the delay-tau projection is p_tau = s2 * W^(tau-1) V. The least-squares
// readout w = G^+ p_tau then gives
//     MC_tau = (w' p_tau)^2 / (s2 * w' G w) = p_tau' G^+ p_tau / s2.
//
// G has two independent evaluations. In the eigenbasis W = U diag(d) U^-1 with
// Vb = U^-1 V, the series sums entrywise:
//     G = s2 * U (Vb Vb^T o K) U^T,   K_kl = 1 / (1 - d_k d_l),
// using plain transposes (W^i V is real, so no conjugation enters). The second
// route solves the discrete Lyapunov equation G = W G W' + s2 V V'.

#include "esn_memory/errors.hpp"
#include "esn_memory/linalg.hpp"
#include "esn_memory/memory_curve.hpp"
#include "esn_memory/reservoir.hpp"

#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace esn_memory {

enum class GramBackend { eigen, lyapunov };

inline std::string_view to_string(GramBackend b)
{
    return b == GramBackend::eigen ? "eigen" : "lyapunov";
}

struct EigenModel {
    ComplexEigenSystem eigen;
    ComplexVector v_bar;
    double variance = InputSpec::variance;
};

inline EigenModel make_eigen_model(const Reservoir& res, double variance = InputSpec::variance)
{
    EigenModel model;
    model.eigen = eigendecompose(res.w());
    model.v_bar = model.eigen.inverse_eigenvectors * res.v().cast<std::complex<double>>();
    model.variance = variance;
    return model;
}

struct AnalyticGram {
    Matrix g;
    GramBackend backend = GramBackend::lyapunov;
};

inline constexpr double kImaginaryResidueTolerance = 1e-8;

inline AnalyticGram analytic_gram_eigen(const EigenModel& model)
{
    const ComplexVector& d = model.eigen.eigenvalues;
    const auto n = d.size();
    for (Eigen::Index k = 0; k < n; ++k) {
        if (!(std::abs(d(k)) < 1.0 - kUnitRadiusMargin)) {
            throw DivergenceError("analytic_gram_eigen: eigenvalue modulus "
                                  + std::to_string(std::abs(d(k))) + " >= 1");
        }
    }

    ComplexMatrix core(n, n);
    for (Eigen::Index l = 0; l < n; ++l) {
        for (Eigen::Index k = 0; k < n; ++k) {
            core(k, l) = model.v_bar(k) * model.v_bar(l) / (1.0 - d(k) * d(l));
        }
    }
    const ComplexMatrix& u = model.eigen.eigenvectors;
    const ComplexMatrix full = model.variance * (u * core * u.transpose());

    Matrix g = full.real();
    const double residue = max_norm(full.imag());
    if (!(residue <= kImaginaryResidueTolerance * detail::scale_or_one(max_norm(g)))) {
        throw NumericalError("analytic_gram_eigen: imaginary residue " + std::to_string(residue)
                             + " too large to discard");
    }
    g = 0.5 * (g + g.transpose());
    return {std::move(g), GramBackend::eigen};
}

inline AnalyticGram analytic_gram_lyapunov(const Reservoir& res,
                                           double variance = InputSpec::variance)
{
    const Matrix q = variance * (res.v() * res.v().transpose());
    return {solve_discrete_lyapunov(res.w(), q), GramBackend::lyapunov};
}

inline AnalyticGram analytic_gram(const Reservoir& res, GramBackend backend,
                                  double variance = InputSpec::variance)
{
    if (backend == GramBackend::eigen) return analytic_gram_eigen(make_eigen_model(res, variance));
    return analytic_gram_lyapunov(res, variance);
}

/// s2 * W^(tau-1) V.
inline Vector analytic_projection(const Reservoir& res, double variance, std::size_t tau)
{
    if (tau < 1) throw ParameterError("analytic_projection: delay must be at least 1");
    return variance * matrix_power_apply(res.w(), res.v(), tau - 1);
}

inline double analytic_mc_tau(const SymmetricPseudoInverse& gram, const Vector& proj,
                              double variance)
{
    if (gram.rank() == 0) throw SingularSystemError("analytic_mc_tau: Gram matrix is zero");
    return gram.quadratic_form(proj) / variance;
}

/// p' G^+ p / s2.
inline double analytic_mc_tau(const AnalyticGram& gram, const Vector& proj, double variance)
{
    return analytic_mc_tau(SymmetricPseudoInverse(gram.g), proj, variance);
}

/// Consecutive delays with MC below kTailThreshold after which the tail is
/// taken as zero.
inline constexpr double kTailThreshold = 1e-12;
inline constexpr std::size_t kTailRun = 10;

/// Curve from a precomputed Gram matrix: one factorization, then one
/// projection update and quadratic form per delay.
inline MemoryCurve analytic_memory_curve(const Reservoir& res, const AnalyticGram& gram,
                                         double variance, std::size_t tau_max)
{
    if (tau_max < 1) throw ParameterError("analytic_memory_curve: tau_max must be at least 1");
    const SymmetricPseudoInverse solver(gram.g);

    std::vector<double> mc(tau_max, 0.0);
    Vector proj = variance * res.v();
    std::size_t small_run = 0;
    for (std::size_t tau = 1; tau <= tau_max; ++tau) {
        mc[tau - 1] = analytic_mc_tau(solver, proj, variance);
        small_run = mc[tau - 1] < kTailThreshold ? small_run + 1 : 0;
        if (small_run == kTailRun) break;
        proj = res.w() * proj;
    }
    return MemoryCurve(std::move(mc));
}

inline MemoryCurve analytic_memory_curve(const Reservoir& res, double variance,
                                         std::size_t tau_max, GramBackend backend)
{
    return analytic_memory_curve(res, analytic_gram(res, backend, variance), variance, tau_max);
}

/// Column tau-1 holds s2 * W^(tau-1) V.
inline Matrix analytic_projections(const Reservoir& res, double variance, std::size_t tau_max)
{
    Matrix out(static_cast<Eigen::Index>(res.size()), static_cast<Eigen::Index>(tau_max));
    Vector proj = variance * res.v();
    for (std::size_t tau = 1; tau <= tau_max; ++tau) {
        out.col(static_cast<Eigen::Index>(tau - 1)) = proj;
        proj = res.w() * proj;
    }
    return out;
}

}  // namespace esn_memory
