#pragma once

// Brute-force reference computations. Each one uses plain matrix products only,
// never the eigen, Lyapunov or pseudo-inverse code paths it is used to check.

#include "esn_memory/linalg.hpp"
#include "esn_memory/reservoir.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace esn_memory::oracle {

/// Number of series terms K with rho^K < tol.
inline std::size_t series_terms(double rho, double tol = 1e-12)
{
    if (rho <= 0.0) return 1;
    return static_cast<std::size_t>(std::ceil(std::log(tol) / std::log(rho))) + 1;
}

/// s2 * sum_{i<K} W^i V V' (W')^i, with K from the spectral radius of W.
inline Matrix truncated_series_gram(const Matrix& w, const Vector& v, double variance)
{
    const std::size_t terms = series_terms(spectral_radius(w));
    Matrix g = Matrix::Zero(w.rows(), w.rows());
    Vector k = v;
    for (std::size_t i = 0; i < terms; ++i) {
        g += k * k.transpose();
        k = w * k;
    }
    return variance * g;
}

/// sum_{i<K} W^i Q (W')^i.
inline Matrix truncated_series_lyapunov(const Matrix& w, const Matrix& q)
{
    const std::size_t terms = series_terms(spectral_radius(w));
    Matrix g = Matrix::Zero(w.rows(), w.cols());
    Matrix wi = Matrix::Identity(w.rows(), w.cols());
    for (std::size_t i = 0; i < terms; ++i) {
        g += wi * q * wi.transpose();
        wi = w * wi;
    }
    return g;
}

/// Rows x_0 .. x_{T-1} of x_t = sum_{i=0}^{t-1} W^{t-i-1} V u_i, from an explicit
/// table of matrix powers.
inline Matrix explicit_states(const Matrix& w, const Vector& v, const InputStream& input,
                              std::size_t length)
{
    std::vector<Vector> powers_v;  // W^p V
    Matrix power = Matrix::Identity(w.rows(), w.cols());
    for (std::size_t p = 0; p < length; ++p) {
        powers_v.push_back(power * v);
        power = power * w;
    }
    Matrix states = Matrix::Zero(static_cast<Eigen::Index>(length), v.size());
    for (std::size_t t = 0; t < length; ++t) {
        Vector x = Vector::Zero(v.size());
        for (std::size_t i = 0; i < t; ++i) x += powers_v[t - i - 1] * input[i];
        states.row(static_cast<Eigen::Index>(t)) = x.transpose();
    }
    return states;
}

/// m^k v by forming m^k first.
inline Vector repeated_multiply(const Matrix& m, const Vector& v, std::size_t k)
{
    Matrix power = Matrix::Identity(m.rows(), m.cols());
    for (std::size_t i = 0; i < k; ++i) power = power * m;
    return power * v;
}

/// Scalar reservoir W = [a], V = [1]: MC_tau = a^(2(tau-1)) (1 - a^2).
inline double scalar_mc_tau(double a, std::size_t tau)
{
    return std::pow(a, 2.0 * static_cast<double>(tau - 1)) * (1.0 - a * a);
}

}  // namespace esn_memory::oracle
