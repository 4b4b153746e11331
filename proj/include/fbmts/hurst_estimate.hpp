#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fbmts/error.hpp"
#include "fbmts/fbm_model.hpp"
#include "fbmts/gaussianize.hpp"

namespace fbmts {

/// √(2/π), the mean absolute value of a standard normal variable.
inline constexpr double kDefaultQConstant = 0.79788456080286535588;
/// Rounded constant used in the original formulation of Q.
inline constexpr double kLegacyQConstant = 0.8;

struct HurstGrid {
    double start = 0.05;
    double stop = 0.95;
    double step = 0.05;

    void validate() const
    {
        if (!(start > 0.0 && start < stop && stop < 1.0)) {
            throw Error(ErrorKind::configuration, "Hurst grid needs 0 < start < stop < 1");
        }
        if (!(step >= 0.01 - 1e-12 && step <= 0.1 + 1e-12)) {
            throw Error(ErrorKind::configuration, "Hurst grid step must lie in [0.01, 0.1]");
        }
    }

    /// start, start+step, … ≤ stop; values rounded to 12 decimals so that
    /// 0.05 + 2·0.05 prints as 0.15.
    std::vector<double> points() const
    {
        validate();
        const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        std::vector<double> out;
        out.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            out.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
        }
        return out;
    }
};

struct GridPoint {
    double hurst = 0.0;
    double q = 0.0;

    friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

struct HurstEstimate {
    std::vector<GridPoint> grid;
    double h_hat = 0.0;
    double q_at_hat = 0.0;
    double r1 = 0.0;
    std::size_t m = 0;

    friend bool operator==(const HurstEstimate&, const HurstEstimate&) = default;
};

/// R1 = mean |z_k|.
inline double mean_absolute(std::span<const double> z)
{
    double sum = 0.0;
    for (double v : z) {
        sum += std::abs(v);
    }
    return sum / static_cast<double>(z.size());
}

namespace detail {

inline void check_estimation_input(std::span<const double> z)
{
    if (z.size() < kMinIncrements) {
        throw Error(ErrorKind::invalid_size, "Hurst estimation needs at least " + std::to_string(kMinIncrements) +
                                                 " increments, got " + std::to_string(z.size()));
    }
}

inline double q_from_parts(double q_constant, double r1, double quadratic_form, std::size_t m)
{
    return q_constant / r1 * std::sqrt(quadratic_form / static_cast<double>(m - 1));
}

} // namespace detail

/// Q(H) = (q_constant / R1) · √(zᵀ S_H⁻¹ z / (m − 1)).
inline double q_statistic(std::span<const double> z, HurstExponent h, double q_constant = kDefaultQConstant)
{
    detail::check_estimation_input(z);
    const double r1 = mean_absolute(z);
    if (r1 == 0.0) {
        throw Error(ErrorKind::degenerate_series, "Q statistic of an all-zero series");
    }
    const auto corr = build_correlation(h, z.size());
    return detail::q_from_parts(q_constant, r1, toeplitz_quadratic_form(corr, z), z.size());
}

inline double q_statistic(const GaussianizedSeries& z, HurstExponent h, double q_constant = kDefaultQConstant)
{
    return q_statistic(std::span<const double>(z.values), h, q_constant);
}

/// Grid search for Ĥ = argmin |Q(H) − 1|; ties go to the smaller H.
inline HurstEstimate estimate_hurst(std::span<const double> z, const HurstGrid& grid = {},
                                    double q_constant = kDefaultQConstant)
{
    detail::check_estimation_input(z);
    const auto points = grid.points();
    HurstEstimate estimate;
    estimate.m = z.size();
    estimate.r1 = mean_absolute(z);
    if (estimate.r1 == 0.0) {
        throw Error(ErrorKind::degenerate_series, "Hurst estimate of an all-zero series");
    }

    double best = std::numeric_limits<double>::infinity();
    estimate.grid.reserve(points.size());
    for (double h : points) {
        const auto corr = build_correlation(HurstExponent(h), z.size());
        const double q = detail::q_from_parts(q_constant, estimate.r1, toeplitz_quadratic_form(corr, z), z.size());
        estimate.grid.push_back({h, q});
        const double distance = std::abs(q - 1.0);
        if (distance < best) {
            best = distance;
            estimate.h_hat = h;
            estimate.q_at_hat = q;
        }
    }
    return estimate;
}

inline HurstEstimate estimate_hurst(const GaussianizedSeries& z, const HurstGrid& grid = {},
                                    double q_constant = kDefaultQConstant)
{
    return estimate_hurst(std::span<const double>(z.values), grid, q_constant);
}

} // namespace fbmts
