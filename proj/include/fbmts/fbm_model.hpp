#pragma once

// Correlation structure of discretised fractional Brownian motion increments
// and the symmetric Toeplitz algebra built on top of it.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "fbmts/error.hpp"

namespace fbmts {

/// Hurst exponent, strictly inside (0, 1).
class HurstExponent {
public:
    explicit HurstExponent(double value) : value_(value)
    {
        if (!(value > 0.0 && value < 1.0)) {
            throw Error(ErrorKind::domain, "Hurst exponent must lie in (0, 1), got " + std::to_string(value));
        }
    }

    double value() const noexcept { return value_; }

    friend auto operator<=>(const HurstExponent&, const HurstExponent&) = default;

private:
    double value_;
};

namespace detail {

// t^{2H}; t = 0 handled explicitly.
inline double pow_2h(double t, double h) noexcept
{
    return t == 0.0 ? 0.0 : std::exp(2.0 * h * std::log(t));
}

} // namespace detail

/// Correlation between increments `lag` steps apart:
/// ½[(lag+1)^{2H} + |lag−1|^{2H} − 2·lag^{2H}].
inline double increment_correlation(HurstExponent h, std::size_t lag) noexcept
{
    const double two_h = 2.0 * h.value();
    if (lag == 0) {
        return 1.0;
    }
    if (two_h == 1.0) {
        return 0.0;
    }
    if (lag == 1) {
        return 0.5 * (detail::pow_2h(2.0, h.value()) - 2.0);
    }
    // Second difference written as lag^{2H}·½[(1+1/lag)^{2H} − 1 + (1−1/lag)^{2H} − 1]
    // so the leading terms do not cancel catastrophically at large lags.
    const double n = static_cast<double>(lag);
    const double inv = 1.0 / n;
    const double up = std::expm1(two_h * std::log1p(inv));
    const double down = std::expm1(two_h * std::log1p(-inv));
    return 0.5 * detail::pow_2h(n, h.value()) * (up + down);
}

/// Large-lag power law H(2H−1)·lag^{2H−2}.
inline double asymptotic_correlation(HurstExponent h, std::size_t lag)
{
    if (lag == 0) {
        throw Error(ErrorKind::domain, "asymptotic correlation needs lag >= 1");
    }
    const double hv = h.value();
    return hv * (2.0 * hv - 1.0) * std::exp((2.0 * hv - 2.0) * std::log(static_cast<double>(lag)));
}

/// First row of the unit-diagonal correlation matrix of m consecutive increments.
struct IncrementCorrelation {
    HurstExponent hurst;
    std::vector<double> first_row;

    std::size_t size() const noexcept { return first_row.size(); }

    /// Entry (j, k) of the implied symmetric Toeplitz matrix.
    double operator()(std::size_t j, std::size_t k) const { return first_row.at(j > k ? j - k : k - j); }
};

inline IncrementCorrelation build_correlation(HurstExponent h, std::size_t m)
{
    if (m < 2) {
        throw Error(ErrorKind::invalid_size, "correlation matrix needs m >= 2, got " + std::to_string(m));
    }
    std::vector<double> row(m);
    for (std::size_t j = 0; j < m; ++j) {
        row[j] = increment_correlation(h, j);
    }
    return IncrementCorrelation{h, std::move(row)};
}

/// Levinson recursion for T x = b, T symmetric Toeplitz with first row `row`.
/// Returns nullopt when a leading minor stops being positive definite.
/// O(m²) time, O(m) memory.
inline std::optional<std::vector<double>> levinson_solve(std::span<const double> row, std::span<const double> rhs)
{
    const std::size_t n = row.size();
    if (n == 0 || rhs.size() != n) {
        throw Error(ErrorKind::invalid_size, "Toeplitz row and right-hand side must have equal non-zero length");
    }
    const double scale = row[0];
    if (!(scale > 0.0)) {
        return std::nullopt;
    }
    // Work with the unit-diagonal matrix T/scale.
    std::vector<double> r(row.begin(), row.end());
    for (double& value : r) {
        value /= scale;
    }

    std::vector<double> x(n), y(n), tmp(n);
    x[0] = rhs[0] / scale;
    if (n == 1) {
        return x;
    }
    y[0] = -r[1];
    double alpha = -r[1];
    double beta = 1.0;
    constexpr double kMinPivot = 1e-13;

    for (std::size_t k = 1; k < n; ++k) {
        beta *= (1.0 - alpha * alpha);
        if (!(beta > kMinPivot) || !std::isfinite(beta)) {
            return std::nullopt;
        }
        double dot = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            dot += r[i + 1] * x[k - 1 - i];
        }
        const double mu = (rhs[k] / scale - dot) / beta;
        for (std::size_t i = 0; i < k; ++i) {
            x[i] += mu * y[k - 1 - i];
        }
        x[k] = mu;

        if (k + 1 < n) {
            double ydot = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                ydot += r[i + 1] * y[k - 1 - i];
            }
            alpha = (-r[k + 1] - ydot) / beta;
            for (std::size_t i = 0; i < k; ++i) {
                tmp[i] = y[i] + alpha * y[k - 1 - i];
            }
            std::copy_n(tmp.begin(), k, y.begin());
            y[k] = alpha;
        }
    }
    return x;
}

inline constexpr double kToeplitzJitter = 1e-10;

/// zᵀ S⁻¹ z through the Levinson solver. One retry with kToeplitzJitter added to
/// the diagonal before giving up with an ill-conditioned error.
inline double toeplitz_quadratic_form(const IncrementCorrelation& corr, std::span<const double> z)
{
    if (z.size() != corr.size()) {
        throw Error(ErrorKind::invalid_size, "series length " + std::to_string(z.size()) +
                                                 " does not match correlation size " + std::to_string(corr.size()));
    }
    auto solution = levinson_solve(corr.first_row, z);
    if (!solution) {
        std::vector<double> jittered = corr.first_row;
        jittered[0] += kToeplitzJitter;
        solution = levinson_solve(jittered, z);
        if (!solution) {
            throw Error(ErrorKind::ill_conditioned,
                        "Toeplitz correlation matrix is numerically singular at H = " + std::to_string(corr.hurst.value()));
        }
    }
    double q = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        q += z[i] * (*solution)[i];
    }
    return std::max(q, 0.0);
}

/// Dense correlation matrix; intended for cross-checks on moderate m.
inline Eigen::MatrixXd dense_correlation(const IncrementCorrelation& corr)
{
    const auto m = static_cast<Eigen::Index>(corr.size());
    Eigen::MatrixXd dense(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index k = 0; k < m; ++k) {
            dense(j, k) = corr.first_row[static_cast<std::size_t>(j > k ? j - k : k - j)];
        }
    }
    return dense;
}

/// zᵀ S⁻¹ z through a dense Cholesky factorisation; O(m³), cross-check path only.
inline double dense_quadratic_form(const IncrementCorrelation& corr, std::span<const double> z)
{
    if (z.size() != corr.size()) {
        throw Error(ErrorKind::invalid_size, "series length does not match correlation size");
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(dense_correlation(corr));
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorKind::ill_conditioned, "dense Cholesky factorisation failed");
    }
    const Eigen::Map<const Eigen::VectorXd> zv(z.data(), static_cast<Eigen::Index>(z.size()));
    return zv.dot(llt.solve(zv));
}

} // namespace fbmts
