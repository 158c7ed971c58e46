#pragma once

// Linear echo state networks x(t+1) = W x(t) + V u(t): seeded construction and
// i.i.d. uniform input streams.

#include "esn_memory/errors.hpp"
#include "esn_memory/linalg.hpp"
#include "esn_memory/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace esn_memory {

inline constexpr double kSpectralRadiusTolerance = 1e-10;

/// Recurrent weights W (N x N) and input weights V (length N). Immutable once
/// built; `lambda` is the spectral radius W was scaled to.
class Reservoir {
public:
    /// Validates shapes and finiteness. `lambda` must equal spectral_radius(w)
    /// to kSpectralRadiusTolerance and lie in [0, 1).
    static Reservoir create(Matrix w, Vector v, double lambda, std::uint64_t seed)
    {
        detail::require_square(w, "Reservoir");
        detail::require_length(w.rows(), v.size(), "Reservoir input weights");
        if (!w.allFinite() || !v.allFinite()) {
            throw ParameterError("Reservoir: weights must be finite");
        }
        if (!(lambda >= 0.0 && lambda < 1.0)) {
            throw ParameterError("Reservoir: spectral radius " + std::to_string(lambda)
                                 + " outside [0, 1)");
        }
        const double rho = spectral_radius(w);
        if (std::abs(rho - lambda) > kSpectralRadiusTolerance) {
            throw ParameterError("Reservoir: spectral radius " + std::to_string(rho)
                                 + " does not match lambda " + std::to_string(lambda));
        }
        return Reservoir(std::move(w), std::move(v), lambda, seed);
    }

    /// Wraps explicit weights, recording their measured spectral radius.
    static Reservoir from_weights(Matrix w, Vector v, std::uint64_t seed = 0)
    {
        detail::require_square(w, "Reservoir");
        const double rho = spectral_radius(w);
        return create(std::move(w), std::move(v), rho, seed);
    }

    std::size_t size() const { return static_cast<std::size_t>(w_.rows()); }
    const Matrix& w() const { return w_; }
    const Vector& v() const { return v_; }
    double lambda() const { return lambda_; }
    std::uint64_t seed() const { return seed_; }

    friend bool operator==(const Reservoir& a, const Reservoir& b)
    {
        return a.lambda_ == b.lambda_ && a.seed_ == b.seed_ && a.w_ == b.w_ && a.v_ == b.v_;
    }

private:
    Reservoir(Matrix w, Vector v, double lambda, std::uint64_t seed)
      : w_(std::move(w)), v_(std::move(v)), lambda_(lambda), seed_(seed)
    {
    }

    Matrix w_;
    Vector v_;
    double lambda_;
    std::uint64_t seed_;
};

/// Returns (lambda / spectral_radius(w)) * w.
inline Matrix rescale_spectral_radius(const Matrix& w, double lambda)
{
    const double rho = spectral_radius(w);
    if (!(rho > 0.0)) {
        throw ParameterError("rescale_spectral_radius: matrix has spectral radius 0 (nilpotent)");
    }
    return (lambda / rho) * w;
}

/// Standard-normal W before rescaling; the same draws generate_reservoir uses.
inline Matrix sample_recurrent_weights(std::size_t n, std::uint64_t seed)
{
    auto stream = make_stream(seed, StreamRole::recurrent_weights);
    Matrix w(n, n);
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = stream.normal();
    }
    return w;
}

inline Vector sample_input_weights(std::size_t n, std::uint64_t seed)
{
    auto stream = make_stream(seed, StreamRole::input_weights);
    Vector v(n);
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = stream.normal();
    return v;
}

/// W and V drawn i.i.d. N(0, 1); W rescaled to spectral radius `lambda`, V left
/// at unit scale.
inline Reservoir generate_reservoir(std::size_t n, double lambda, std::uint64_t seed)
{
    if (n < 1) throw ParameterError("generate_reservoir: n must be at least 1");
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw ParameterError("generate_reservoir: lambda " + std::to_string(lambda)
                             + " outside (0, 1)");
    }
    Matrix w = rescale_spectral_radius(sample_recurrent_weights(n, seed), lambda);
    Vector v = sample_input_weights(n, seed);
    return Reservoir::create(std::move(w), std::move(v), lambda, seed);
}

/// i.i.d. inputs uniform on [-1, 1].
struct InputSpec {
    static constexpr double low = -1.0;
    static constexpr double high = 1.0;
    static constexpr double variance = 1.0 / 3.0;

    std::uint64_t seed = 0;
};

struct InputStream {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t t) const { return values[t]; }
};

inline InputStream generate_input(const InputSpec& spec, std::size_t length)
{
    if (length < 1) throw ParameterError("generate_input: length must be at least 1");
    auto stream = make_stream(spec.seed, StreamRole::input_stream);
    InputStream out;
    out.values.resize(length);
    for (double& u : out.values) u = stream.uniform(InputSpec::low, InputSpec::high);
    return out;
}

// JSON: {"n": int, "lambda": float, "seed": int, "w": [[...]], "v": [...]}

inline nlohmann::json to_json_value(const Reservoir& r)
{
    nlohmann::json w = nlohmann::json::array();
    for (Eigen::Index i = 0; i < r.w().rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < r.w().cols(); ++j) row.push_back(r.w()(i, j));
        w.push_back(std::move(row));
    }
    nlohmann::json v = nlohmann::json::array();
    for (Eigen::Index i = 0; i < r.v().size(); ++i) v.push_back(r.v()(i));
    return {{"n", r.size()}, {"lambda", r.lambda()}, {"seed", r.seed()}, {"w", std::move(w)},
            {"v", std::move(v)}};
}

inline Reservoir reservoir_from_json(const nlohmann::json& j)
{
    try {
        const auto n = j.at("n").get<std::size_t>();
        const auto& jw = j.at("w");
        const auto& jv = j.at("v");
        if (n < 1 || jw.size() != n || jv.size() != n) {
            throw ParameterError("reservoir JSON: w/v shapes do not match n");
        }
        Matrix w(n, n);
        Vector v(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (jw[i].size() != n) throw ParameterError("reservoir JSON: ragged w");
            for (std::size_t k = 0; k < n; ++k) {
                w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                  jw[i][k].get<double>();
            }
            v(static_cast<Eigen::Index>(i)) = jv[i].get<double>();
        }
        return Reservoir::create(std::move(w), std::move(v), j.at("lambda").get<double>(),
                                 j.at("seed").get<std::uint64_t>());
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("reservoir JSON: ") + e.what());
    }
}

}  // namespace esn_memory
