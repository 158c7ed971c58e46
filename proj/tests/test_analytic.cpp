#include "esn_memory/analytic.hpp"
#include "esn_memory/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <utility>

namespace esn_memory {
namespace {

constexpr double kS2 = InputSpec::variance;

Reservoir scalar(double a) { return Reservoir::from_weights(Matrix::Constant(1, 1, a), Vector::Ones(1)); }

double relative_gap(const Matrix& a, const Matrix& b) { return max_norm(a - b) / max_norm(b); }

TEST(EigenModel, RotatedInputRecoversV)
{
    const auto res = generate_reservoir(15, 0.9, 3);
    const auto model = make_eigen_model(res);
    const ComplexVector back = model.eigen.eigenvectors * model.v_bar;
    EXPECT_LE(max_norm(back.real() - res.v()), 1e-8 * max_norm(res.v()));
    EXPECT_LE(max_norm(back.imag()), 1e-8 * max_norm(res.v()));
}

TEST(AnalyticGram, ScalarGeometricSeries)
{
    for (double a : {-0.9, -0.2, 0.3, 0.95}) {
        const double expected = kS2 / (1.0 - a * a);
        EXPECT_NEAR(analytic_gram_eigen(make_eigen_model(scalar(a))).g(0, 0), expected, 1e-14 * expected);
        EXPECT_NEAR(analytic_gram_lyapunov(scalar(a), kS2).g(0, 0), expected, 1e-13 * expected);
    }
}

TEST(AnalyticGram, ZeroRecurrenceKeepsOnlyFirstTerm)
{
    const Vector v = (Vector(3) << 1.0, -2.0, 0.5).finished();
    const auto res = Reservoir::from_weights(Matrix::Zero(3, 3), v);
    const Matrix expected = kS2 * v * v.transpose();
    EXPECT_LE(max_norm(analytic_gram_eigen(make_eigen_model(res)).g - expected), 1e-15);
    EXPECT_LE(max_norm(analytic_gram_lyapunov(res, kS2).g - expected), 1e-15);
}

TEST(AnalyticGram, BothBackendsMatchTruncatedSeries)
{
    // N = 10, lambda = 0.9, several seeds; the series oracle uses only matrix products.
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto res = generate_reservoir(10, 0.9, seed);
        const Matrix series = oracle::truncated_series_gram(res.w(), res.v(), kS2);
        const auto eig = analytic_gram_eigen(make_eigen_model(res));
        const auto lyap = analytic_gram_lyapunov(res, kS2);
        EXPECT_EQ(eig.backend, GramBackend::eigen);
        EXPECT_EQ(lyap.backend, GramBackend::lyapunov);
        EXPECT_LT(relative_gap(eig.g, series), 1e-8);
        EXPECT_LT(relative_gap(lyap.g, series), 1e-8);
        EXPECT_LE(max_norm(eig.g - eig.g.transpose()), 1e-10 * max_norm(eig.g));
    }
}

TEST(AnalyticGram, PaperKernelDoesNotMatchSeries)
{
    // The kernel 1/((1-d_k)(1-d_l)) is not the geometric series sum; 1/(1 - d_k d_l) is.
    const auto res = generate_reservoir(6, 0.8, 21);
    const auto model = make_eigen_model(res);
    const ComplexVector& d = model.eigen.eigenvalues;
    ComplexMatrix core(6, 6);
    for (Eigen::Index l = 0; l < 6; ++l)
        for (Eigen::Index k = 0; k < 6; ++k)
            core(k, l) = model.v_bar(k) * model.v_bar(l) / ((1.0 - d(k)) * (1.0 - d(l)));
    const Matrix product_kernel =
      (kS2 * model.eigen.eigenvectors * core * model.eigen.eigenvectors.transpose()).real();
    const Matrix series = oracle::truncated_series_gram(res.w(), res.v(), kS2);
    EXPECT_GT(relative_gap(product_kernel, series), 1e-2);
    EXPECT_LT(relative_gap(analytic_gram_eigen(model).g, series), 1e-8);
}

TEST(AnalyticGram, DivergentRadiusRejected)
{
    Matrix w(2, 2);
    w << 0.0, 1.0, 1.0, 0.0;
    ComplexEigenSystem sys = eigendecompose(w);
    EigenModel model{sys, sys.inverse_eigenvectors * Vector::Ones(2).cast<std::complex<double>>(), kS2};
    EXPECT_THROW(analytic_gram_eigen(model), DivergenceError);
}

TEST(AnalyticProjection, Cases)
{
    const auto res = generate_reservoir(5, 0.7, 9);
    EXPECT_LE(max_norm(analytic_projection(res, kS2, 1) - kS2 * res.v()), 1e-16);
    const auto zero = Reservoir::from_weights(Matrix::Zero(4, 4), Vector::Ones(4));
    EXPECT_EQ(analytic_projection(zero, kS2, 2), Vector::Zero(4));
    EXPECT_EQ(analytic_projection(zero, kS2, 7), Vector::Zero(4));
    for (double a : {-0.6, 0.8}) {
        EXPECT_NEAR(analytic_projection(scalar(a), kS2, 5)(0), kS2 * std::pow(a, 4), 1e-16);
    }
    EXPECT_THROW(analytic_projection(res, kS2, 0), ParameterError);
}

TEST(AnalyticMcTau, ScalarClosedForm)
{
    for (double a : {-0.9, -0.5, 0.1, 0.5, 0.9}) {
        const auto gram = analytic_gram_lyapunov(scalar(a), kS2);
        for (std::size_t tau = 1; tau <= 30; ++tau) {
            const double mc = analytic_mc_tau(gram, analytic_projection(scalar(a), kS2, tau), kS2);
            EXPECT_NEAR(mc, oracle::scalar_mc_tau(a, tau), 1e-12);
        }
    }
}

TEST(AnalyticMcTau, ShiftRegisterAndZeroProjection)
{
    const auto res = Reservoir::from_weights(Matrix::Zero(1, 1), Vector::Ones(1));
    const auto gram = analytic_gram_lyapunov(res, kS2);
    EXPECT_NEAR(analytic_mc_tau(gram, analytic_projection(res, kS2, 1), kS2), 1.0, 1e-15);
    EXPECT_EQ(analytic_mc_tau(gram, analytic_projection(res, kS2, 2), kS2), 0.0);

    const auto big = generate_reservoir(8, 0.5, 2);
    EXPECT_EQ(analytic_mc_tau(analytic_gram_lyapunov(big, kS2), Vector::Zero(8), kS2), 0.0);
    EXPECT_THROW(analytic_mc_tau(AnalyticGram{Matrix::Zero(2, 2)}, Vector::Ones(2), kS2),
                 SingularSystemError);
}

TEST(AnalyticMemoryCurve, ScalarTotalTelescopesToOne)
{
    for (double a : {-0.9, -0.5, -0.1, 0.1, 0.5, 0.9}) {
        const auto curve = analytic_memory_curve(scalar(a), kS2, 2000, GramBackend::lyapunov);
        EXPECT_EQ(curve.tau_max(), 2000u);
        EXPECT_NEAR(curve.total, 1.0, 1e-9);
        for (std::size_t tau = 1; tau < 200; ++tau) {
            if (curve.at(tau) < 1e-200) break;
            EXPECT_NEAR(curve.at(tau + 1), a * a * curve.at(tau), 1e-12);
        }
    }
}

TEST(AnalyticMemoryCurve, ShiftRegister)
{
    const auto res = Reservoir::from_weights(Matrix::Zero(1, 1), Vector::Ones(1));
    for (auto backend : {GramBackend::eigen, GramBackend::lyapunov}) {
        const auto curve = analytic_memory_curve(res, kS2, 50, backend);
        EXPECT_EQ(curve.at(1), 1.0);
        for (std::size_t tau = 2; tau <= 50; ++tau) EXPECT_EQ(curve.at(tau), 0.0);
        EXPECT_EQ(curve.total, 1.0);
    }
}

// Rounding in G is ~eps * |G| absolute, so a retained eigenvalue mu carries a
// relative error ~ n eps |G| / mu. The bounds below hold to that precision.
double conditioning_slack(const Matrix& g)
{
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(g);
    const double top = eig.eigenvalues().maxCoeff();
    double kept = top;
    for (double mu : eig.eigenvalues()) {
        if (mu > kPseudoInverseCutoff * top) kept = std::min(kept, mu);
    }
    return 16.0 * static_cast<double>(g.rows()) * std::numeric_limits<double>::epsilon() * top / kept;
}

TEST(AnalyticMemoryCurve, RangeAndCapacityBound)
{
    for (std::size_t n : {5, 25, 50}) {
        for (double lambda : {0.1, 0.5, 0.95}) {
            for (std::uint64_t seed = 0; seed < 4; ++seed) {
                const auto res = generate_reservoir(n, lambda, 1000 + seed);
                const auto gram = analytic_gram(res, GramBackend::lyapunov);
                const double slack = std::max(1e-12, conditioning_slack(gram.g));
                const auto curve = analytic_memory_curve(res, gram, kS2, 200);
                for (double v : curve.mc) {
                    EXPECT_GE(v, -slack);
                    EXPECT_LE(v, 1.0 + slack);
                }
                EXPECT_LE(curve.total, static_cast<double>(n) * (1.0 + slack) + 1e-6);
            }
        }
    }
}

TEST(AnalyticMemoryCurve, WellConditionedBoundsAreTight)
{
    const auto res = generate_reservoir(5, 0.95, 1003);
    const auto curve = analytic_memory_curve(res, kS2, 2000, GramBackend::lyapunov);
    for (double v : curve.mc) EXPECT_LE(v, 1.0 + 1e-12);
    EXPECT_NEAR(curve.total, 5.0, 1e-8);
}

TEST(AnalyticMemoryCurve, InvariantUnderInputWeightScale)
{
    // Scaling V by c scales G by c^2 and p by c; MC moves only by rounding,
    // amplified by the conditioning of G.
    for (auto [n, lambda] : {std::pair<std::size_t, double>{6, 0.95}, {20, 0.9}}) {
        const auto res = generate_reservoir(n, lambda, 55);
        const auto gram = analytic_gram(res, GramBackend::lyapunov);
        const double slack = std::max(1e-12, conditioning_slack(gram.g));
        const auto base = analytic_memory_curve(res, gram, kS2, 100);
        for (double c : {-3.0, 0.01, 25.0}) {
            const auto scaled = Reservoir::create(res.w(), c * res.v(), res.lambda(), res.seed());
            const auto curve = analytic_memory_curve(scaled, kS2, 100, GramBackend::lyapunov);
            for (std::size_t tau = 1; tau <= 100; ++tau) {
                EXPECT_NEAR(curve.at(tau), base.at(tau), slack) << "n=" << n << " tau=" << tau;
            }
        }
    }
}

TEST(AnalyticMemoryCurve, BackendsAgree)
{
    const auto res = generate_reservoir(25, 0.95, 77);
    const auto a = analytic_memory_curve(res, kS2, 100, GramBackend::eigen);
    const auto b = analytic_memory_curve(res, kS2, 100, GramBackend::lyapunov);
    double worst = 0.0;
    for (std::size_t tau = 1; tau <= 100; ++tau) worst = std::max(worst, std::abs(a.at(tau) - b.at(tau)));
    EXPECT_LT(worst, 1e-3);
}

}  // namespace
}  // namespace esn_memory
