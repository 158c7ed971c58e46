#pragma once

// Dense linear algebra used by the reservoir, simulation and analytic layers.
// Storage and the general eigenproblem are Eigen's; the Lyapunov solver and the
// pseudo-inverse policy are defined here.

#include "esn_memory/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>

namespace esn_memory {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Relative eigenvalue cutoff of the Gram pseudo-inverse. Eigen-directions of a
/// Gram matrix below this fraction of its largest eigenvalue are treated as
/// numerically absent.
inline constexpr double kPseudoInverseCutoff = 1e-12;

template <typename Derived>
double max_norm(const Eigen::MatrixBase<Derived>& m)
{
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().maxCoeff();
}

namespace detail {

inline void require_square(const Matrix& m, const char* what)
{
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw DimensionError(std::string(what) + ": expected a non-empty square matrix, got "
                             + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
}

inline void require_length(Eigen::Index expected, Eigen::Index actual, const char* what)
{
    if (expected != actual) {
        throw DimensionError(std::string(what) + ": length " + std::to_string(actual)
                             + " does not match dimension " + std::to_string(expected));
    }
}

inline double scale_or_one(double norm) { return norm > 0.0 ? norm : 1.0; }

}  // namespace detail

inline double spectral_radius(const Matrix& m)
{
    detail::require_square(m, "spectral_radius");
    Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("spectral_radius: QR iteration did not converge");
    }
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

/// W = U diag(d) U^-1 over the complex numbers. Columns of U are unit-norm right
/// eigenvectors.
struct ComplexEigenSystem {
    ComplexVector eigenvalues;
    ComplexMatrix eigenvectors;
    ComplexMatrix inverse_eigenvectors;

    Eigen::Index size() const { return eigenvalues.size(); }
};

inline constexpr double kEigenReconstructionTolerance = 1e-8;

inline ComplexEigenSystem eigendecompose(const Matrix& m)
{
    detail::require_square(m, "eigendecompose");
    Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success) {
        throw DecompositionError("eigendecompose: QR iteration did not converge");
    }

    ComplexEigenSystem sys;
    sys.eigenvalues = solver.eigenvalues();
    sys.eigenvectors = solver.eigenvectors();
    sys.inverse_eigenvectors = sys.eigenvectors.partialPivLu().inverse();

    const auto n = m.rows();
    const double scale = detail::scale_or_one(max_norm(m));
    const ComplexMatrix cm = m.cast<std::complex<double>>();

    const double eig_residual =
      max_norm(cm * sys.eigenvectors - sys.eigenvectors * sys.eigenvalues.asDiagonal());
    const double inv_residual =
      max_norm(sys.eigenvectors * sys.inverse_eigenvectors - ComplexMatrix::Identity(n, n));
    const double rec_residual = max_norm(
      sys.eigenvectors * sys.eigenvalues.asDiagonal() * sys.inverse_eigenvectors - cm);

    const bool finite = sys.inverse_eigenvectors.allFinite();
    if (!finite || !(eig_residual <= kEigenReconstructionTolerance * scale)
        || !(inv_residual <= kEigenReconstructionTolerance)
        || !(rec_residual <= kEigenReconstructionTolerance * scale)) {
        throw DecompositionError(
          "eigendecompose: matrix is defective or nearly so (reconstruction residual "
          + std::to_string(rec_residual) + ", U*U^-1 residual " + std::to_string(inv_residual)
          + ")");
    }
    return sys;
}

/// Eigenvalue-truncated pseudo-inverse of a symmetric positive semidefinite
/// matrix, factored once and applied to many right-hand sides.
class SymmetricPseudoInverse {
public:
    explicit SymmetricPseudoInverse(const Matrix& m, double ridge = 0.0,
                                    double cutoff = kPseudoInverseCutoff)
    {
        detail::require_square(m, "SymmetricPseudoInverse");
        if (!(ridge >= 0.0)) throw ParameterError("ridge must be non-negative");
        if (!m.allFinite()) throw NumericalError("SymmetricPseudoInverse: non-finite entries");

        const auto n = m.rows();
        Matrix a = 0.5 * (m + m.transpose());
        a.diagonal().array() += ridge;

        Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
        if (solver.info() != Eigen::Success) {
            throw NumericalError("SymmetricPseudoInverse: eigen-solver did not converge");
        }
        const Vector& eig = solver.eigenvalues();  // ascending
        largest_ = eig(n - 1);
        smallest_ = eig(0);

        Eigen::Index first_kept = n;
        if (largest_ > 0.0) {
            const double threshold = cutoff * largest_;
            first_kept = 0;
            while (first_kept < n && !(eig(first_kept) > threshold)) ++first_kept;
        }
        rank_ = n - first_kept;
        basis_ = solver.eigenvectors().rightCols(rank_);
        inverse_eigenvalues_ = eig.tail(rank_).cwiseInverse();
        dim_ = n;
    }

    Eigen::Index dim() const { return dim_; }
    Eigen::Index rank() const { return rank_; }
    double largest_eigenvalue() const { return largest_; }
    double smallest_eigenvalue() const { return smallest_; }

    Vector solve(const Vector& rhs) const
    {
        detail::require_length(dim_, rhs.size(), "SymmetricPseudoInverse::solve");
        const Vector coords = basis_.transpose() * rhs;
        return basis_ * inverse_eigenvalues_.cwiseProduct(coords);
    }

    /// Solves every column of `rhs` at once.
    Matrix solve_columns(const Matrix& rhs) const
    {
        detail::require_length(dim_, rhs.rows(), "SymmetricPseudoInverse::solve_columns");
        const Matrix coords = basis_.transpose() * rhs;
        return basis_ * (inverse_eigenvalues_.asDiagonal() * coords);
    }

    /// rhs' * pinv(m) * rhs, summed mode by mode.
    double quadratic_form(const Vector& rhs) const
    {
        detail::require_length(dim_, rhs.size(), "SymmetricPseudoInverse::quadratic_form");
        const Vector coords = basis_.transpose() * rhs;
        return coords.cwiseAbs2().dot(inverse_eigenvalues_);
    }

private:
    Matrix basis_;
    Vector inverse_eigenvalues_;
    Eigen::Index rank_ = 0;
    Eigen::Index dim_ = 0;
    double largest_ = 0.0;
    double smallest_ = 0.0;
};

inline constexpr double kSolveResidualTolerance = 1e-8;

/// Solves (m + ridge*I) z = rhs for symmetric positive semidefinite m.
/// A numerically singular system is an error, never a least-squares answer.
inline Vector solve_linear(const Matrix& m, const Vector& rhs, double ridge)
{
    detail::require_square(m, "solve_linear");
    detail::require_length(m.rows(), rhs.size(), "solve_linear");
    if (!(ridge >= 0.0)) throw ParameterError("solve_linear: ridge must be non-negative");

    const auto n = m.rows();
    Matrix a = 0.5 * (m + m.transpose());
    a.diagonal().array() += ridge;

    Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("solve_linear: eigen-solver did not converge");
    }
    const Vector& eig = solver.eigenvalues();
    const double largest = eig.cwiseAbs().maxCoeff();
    const double smallest = eig.cwiseAbs().minCoeff();
    const double floor = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * largest;
    if (!(largest > 0.0) || !(smallest > floor)) {
        throw SingularSystemError("solve_linear: singular system (smallest |eigenvalue| "
                                  + std::to_string(smallest) + ", largest "
                                  + std::to_string(largest) + ")");
    }

    const Matrix& q = solver.eigenvectors();
    const Vector z = q * eig.cwiseInverse().cwiseProduct(q.transpose() * rhs);

    const double residual = (a * z - rhs).norm();
    if (!(residual <= kSolveResidualTolerance * detail::scale_or_one(rhs.norm()))) {
        throw SingularSystemError("solve_linear: ill-conditioned system, residual "
                                  + std::to_string(residual));
    }
    return z;
}

/// m^k v by k matrix-vector products.
inline Vector matrix_power_apply(const Matrix& m, Vector v, std::size_t k)
{
    detail::require_square(m, "matrix_power_apply");
    detail::require_length(m.rows(), v.size(), "matrix_power_apply");
    for (std::size_t i = 0; i < k; ++i) v = m * v;
    return v;
}

inline constexpr double kLyapunovUpdateTolerance = 1e-13;
inline constexpr double kLyapunovResidualTolerance = 1e-10;
inline constexpr int kLyapunovMaxDoublings = 64;

/// Radii this close to 1 count as divergent: the eigensolver returns a unit
/// circle eigenvalue only to within rounding.
inline constexpr double kUnitRadiusMargin = 1e-12;

/// Solves G = w G w' + q for spectral_radius(w) < 1 by the doubling iteration
///   G <- G + A G A',  A <- A^2,
/// which after k steps holds sum_{i < 2^k} w^i q (w')^i.
inline Matrix solve_discrete_lyapunov(const Matrix& w, const Matrix& q)
{
    detail::require_square(w, "solve_discrete_lyapunov");
    detail::require_square(q, "solve_discrete_lyapunov");
    if (w.rows() != q.rows()) {
        throw DimensionError("solve_discrete_lyapunov: w and q differ in size");
    }
    const double q_norm = max_norm(q);
    if (!(max_norm(q - q.transpose()) <= 1e-10 * detail::scale_or_one(q_norm))) {
        throw ParameterError("solve_discrete_lyapunov: q is not symmetric");
    }
    const double rho = spectral_radius(w);
    if (!(rho < 1.0 - kUnitRadiusMargin)) {
        throw DivergenceError("solve_discrete_lyapunov: spectral radius " + std::to_string(rho)
                              + " >= 1, the series does not converge");
    }

    Matrix g = q;
    Matrix a = w;
    bool converged = false;
    for (int k = 0; k < kLyapunovMaxDoublings; ++k) {
        const Matrix update = a * g * a.transpose();
        g += update;
        if (!g.allFinite()) break;
        if (max_norm(update) <= kLyapunovUpdateTolerance * max_norm(g)) {
            converged = true;
            break;
        }
        a = a * a;
    }
    if (!converged) {
        throw NumericalError("solve_discrete_lyapunov: doubling iteration did not converge");
    }
    g = 0.5 * (g + g.transpose());

    const double residual = max_norm(g - (w * g * w.transpose() + q));
    if (!(residual <= kLyapunovResidualTolerance * detail::scale_or_one(q_norm))) {
        throw NumericalError("solve_discrete_lyapunov: residual " + std::to_string(residual)
                             + " above tolerance");
    }
    return g;
}

}  // namespace esn_memory
