#include "esn_memory/linalg.hpp"
#include "esn_memory/oracles.hpp"
#include "esn_memory/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <complex>

namespace esn_memory {
namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed)
{
    RandomStream rng(seed);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
    return m;
}

Matrix with_radius(const Matrix& m, double rho) { return (rho / spectral_radius(m)) * m; }

TEST(SpectralRadius, DiagonalNilpotentAndPermutation)
{
    Matrix d(2, 2);
    d << 0.5, 0.0, 0.0, -0.2;
    EXPECT_NEAR(spectral_radius(d), 0.5, 1e-15);

    Matrix nil(2, 2);
    nil << 0.0, 1.0, 0.0, 0.0;
    EXPECT_EQ(spectral_radius(nil), 0.0);

    Matrix perm(2, 2);
    perm << 0.0, 1.0, 1.0, 0.0;
    EXPECT_NEAR(spectral_radius(perm), 1.0, 1e-15);
}

TEST(SpectralRadius, RejectsNonSquare)
{
    EXPECT_THROW(spectral_radius(Matrix::Zero(2, 3)), DimensionError);
}

TEST(SpectralRadius, ScalesWithAbsoluteFactor)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Matrix m = random_matrix(6, 6, seed);
        const double base = spectral_radius(m);
        for (double c : {-3.0, -0.25, 0.5, 7.0}) {
            EXPECT_NEAR(spectral_radius(c * m), std::abs(c) * base, 1e-10 * std::abs(c) * base);
        }
    }
}

TEST(Eigendecompose, DiagonalMatrix)
{
    Matrix d(2, 2);
    d << 0.3, 0.0, 0.0, 0.7;
    const auto sys = eigendecompose(d);
    std::vector<double> values{sys.eigenvalues(0).real(), sys.eigenvalues(1).real()};
    std::sort(values.begin(), values.end());
    EXPECT_NEAR(values[0], 0.3, 1e-15);
    EXPECT_NEAR(values[1], 0.7, 1e-15);
    EXPECT_NEAR(sys.eigenvalues.imag().cwiseAbs().maxCoeff(), 0.0, 1e-15);
    // Unit-norm columns of a diagonal matrix's eigenvectors are +-e_i.
    EXPECT_NEAR(sys.eigenvectors.cwiseAbs().colwise().sum().maxCoeff(), 1.0, 1e-15);
}

TEST(Eigendecompose, RotationHasImaginaryPair)
{
    Matrix r(2, 2);
    r << 0.0, -1.0, 1.0, 0.0;
    const auto sys = eigendecompose(r);
    std::vector<double> imag{sys.eigenvalues(0).imag(), sys.eigenvalues(1).imag()};
    std::sort(imag.begin(), imag.end());
    EXPECT_NEAR(imag[0], -1.0, 1e-14);
    EXPECT_NEAR(imag[1], 1.0, 1e-14);
    EXPECT_NEAR(std::abs(sys.eigenvalues(0).real()), 0.0, 1e-14);
}

TEST(Eigendecompose, ReconstructsRandomMatrices)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Matrix m = random_matrix(5, 5, 100 + seed);
        const auto sys = eigendecompose(m);
        const ComplexMatrix back =
          sys.eigenvectors * sys.eigenvalues.asDiagonal() * sys.inverse_eigenvectors;
        EXPECT_LE(max_norm(back.real() - m), 1e-8 * max_norm(m));
        EXPECT_LE(max_norm(back.imag()), 1e-8 * max_norm(m));
        EXPECT_LE(max_norm(sys.eigenvectors * sys.inverse_eigenvectors
                           - ComplexMatrix::Identity(5, 5)),
                  1e-8);
    }
}

TEST(Eigendecompose, DefectiveMatrixFails)
{
    Matrix jordan(2, 2);
    jordan << 0.5, 1.0, 0.0, 0.5;
    EXPECT_THROW(eigendecompose(jordan), DecompositionError);
}

TEST(SolveLinear, IdentityAndDiagonal)
{
    const Vector rhs = (Vector(3) << 1, 2, 3).finished();
    EXPECT_LE((solve_linear(Matrix::Identity(3, 3), rhs, 0.0) - rhs).cwiseAbs().maxCoeff(), 1e-15);

    Matrix d(2, 2);
    d << 2.0, 0.0, 0.0, 4.0;
    const Vector z = solve_linear(d, (Vector(2) << 2, 4).finished(), 0.0);
    EXPECT_NEAR(z(0), 1.0, 1e-15);
    EXPECT_NEAR(z(1), 1.0, 1e-15);
}

TEST(SolveLinear, RankDeficientIsSingular)
{
    Matrix d(2, 2);
    d << 1.0, 0.0, 0.0, 0.0;
    EXPECT_THROW(solve_linear(d, Vector::Ones(2), 0.0), SingularSystemError);
    // A ridge makes the same system solvable.
    const Vector z = solve_linear(d, Vector::Ones(2), 0.5);
    EXPECT_NEAR(z(0), 1.0 / 1.5, 1e-15);
    EXPECT_NEAR(z(1), 2.0, 1e-15);
}

TEST(SolveLinear, ResidualOnRandomGram)
{
    const Matrix a = random_matrix(8, 20, 5);
    const Matrix gram = a * a.transpose() / 20.0;
    const Vector rhs = random_matrix(8, 1, 6);
    const Vector z = solve_linear(gram, rhs, 0.0);
    EXPECT_LE((gram * z - rhs).norm(), 1e-8 * rhs.norm());
}

TEST(SymmetricPseudoInverse, DropsNullDirections)
{
    Matrix d(3, 3);
    d << 4.0, 0.0, 0.0, 0.0, 1e-20, 0.0, 0.0, 0.0, 2.0;
    const SymmetricPseudoInverse pinv(d);
    EXPECT_EQ(pinv.rank(), 2);
    const Vector z = pinv.solve(Vector::Ones(3));
    EXPECT_NEAR(z(0), 0.25, 1e-15);
    EXPECT_EQ(z(1), 0.0);
    EXPECT_NEAR(z(2), 0.5, 1e-15);
    EXPECT_NEAR(pinv.quadratic_form(Vector::Ones(3)), 0.75, 1e-15);
    EXPECT_EQ(SymmetricPseudoInverse(Matrix::Zero(2, 2)).rank(), 0);
}

TEST(MatrixPowerApply, ZeroPowerAndScalar)
{
    const Matrix m = random_matrix(3, 3, 9);
    const Vector v = random_matrix(3, 1, 10);
    EXPECT_EQ(matrix_power_apply(m, v, 0), v);
    EXPECT_NEAR(matrix_power_apply(Matrix::Constant(1, 1, 0.5), Vector::Ones(1), 3)(0), 0.125,
                1e-16);
    EXPECT_THROW(matrix_power_apply(m, Vector::Ones(2), 1), DimensionError);
}

TEST(MatrixPowerApply, MatchesExplicitPower)
{
    const Matrix m = random_matrix(4, 4, 11);
    const Vector v = random_matrix(4, 1, 12);
    const Vector expected = oracle::repeated_multiply(m, v, 6);
    EXPECT_LE((matrix_power_apply(m, v, 6) - expected).cwiseAbs().maxCoeff(),
              1e-12 * expected.cwiseAbs().maxCoeff());
}

TEST(MatrixPowerApply, ComposesAdditively)
{
    const Matrix m = with_radius(random_matrix(6, 6, 13), 0.9);
    const Vector v = random_matrix(6, 1, 14);
    for (std::size_t j : {0, 1, 5})
        for (std::size_t k : {0, 2, 7}) {
            const Vector direct = matrix_power_apply(m, v, j + k);
            const Vector split = matrix_power_apply(m, matrix_power_apply(m, v, k), j);
            EXPECT_LE((direct - split).cwiseAbs().maxCoeff(),
                      1e-10 * std::max(1e-300, direct.cwiseAbs().maxCoeff()));
        }
}

TEST(DiscreteLyapunov, ScalarCases)
{
    const double s2 = 1.0 / 3.0;
    EXPECT_NEAR(solve_discrete_lyapunov(Matrix::Zero(1, 1), Matrix::Constant(1, 1, s2))(0, 0), s2,
                1e-16);
    for (double a : {-0.9, -0.3, 0.5, 0.95}) {
        const double g =
          solve_discrete_lyapunov(Matrix::Constant(1, 1, a), Matrix::Constant(1, 1, s2))(0, 0);
        EXPECT_NEAR(g, s2 / (1.0 - a * a), 1e-13 * g);
    }
}

TEST(DiscreteLyapunov, MatchesTruncatedSeries)
{
    const Matrix w = with_radius(random_matrix(5, 5, 20), 0.9);
    const Matrix b = random_matrix(5, 2, 21);
    const Matrix q = b * b.transpose();
    const Matrix g = solve_discrete_lyapunov(w, q);
    const Matrix expected = oracle::truncated_series_lyapunov(w, q);
    EXPECT_LE(max_norm(g - expected), 1e-10 * max_norm(expected));
    EXPECT_LE(max_norm(g - (w * g * w.transpose() + q)), 1e-10 * max_norm(q));
}

TEST(DiscreteLyapunov, SymmetricPsdForPsdInput)
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Matrix w = with_radius(random_matrix(7, 7, 30 + seed), 0.95);
        const Matrix b = random_matrix(7, 1, 60 + seed);
        const Matrix g = solve_discrete_lyapunov(w, b * b.transpose());
        EXPECT_LE(max_norm(g - g.transpose()), 1e-12 * max_norm(g));
        const Eigen::SelfAdjointEigenSolver<Matrix> eig(g);
        EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10 * max_norm(g));
    }
}

TEST(DiscreteLyapunov, DivergesAtUnitRadius)
{
    Matrix perm(2, 2);
    perm << 0.0, 1.0, 1.0, 0.0;
    EXPECT_THROW(solve_discrete_lyapunov(perm, Matrix::Identity(2, 2)), DivergenceError);
    EXPECT_THROW(solve_discrete_lyapunov(Matrix::Identity(2, 2), Matrix::Zero(3, 3)),
                 DimensionError);
}

}  // namespace
}  // namespace esn_memory
