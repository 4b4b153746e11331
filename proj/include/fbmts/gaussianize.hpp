#pragma once

// Odd power transform z = sgn(y)|y|^λ with λ chosen so that the
// mean-absolute / root-mean-square ratio of z hits its Gaussian value 2/π.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "fbmts/error.hpp"

namespace fbmts {

inline constexpr double kGaussianRatio = 2.0 * std::numbers::inv_pi;
inline constexpr std::size_t kMinIncrements = 8;
inline constexpr double kMagnitudeFloor = 1e-300;

/// First differences y_k = x_{k+1} − x_k of a level series.
class IncrementSeries {
public:
    explicit IncrementSeries(std::vector<double> values) : values_(std::move(values))
    {
        if (values_.size() < kMinIncrements) {
            throw Error(ErrorKind::invalid_size, "need at least " + std::to_string(kMinIncrements) +
                                                     " increments, got " + std::to_string(values_.size()));
        }
        for (double v : values_) {
            if (!std::isfinite(v)) {
                throw Error(ErrorKind::input, "increment series contains a non-finite value");
            }
        }
    }

    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

private:
    std::vector<double> values_;
};

struct GaussianizedSeries {
    std::vector<double> values;
    double lambda = 1.0;
    double achieved_ratio = 0.0;
    double tolerance = 0.0;

    std::size_t size() const noexcept { return values.size(); }
};

inline IncrementSeries increments(std::span<const double> x)
{
    if (x.size() < kMinIncrements + 1) {
        throw Error(ErrorKind::invalid_size,
                    "need at least " + std::to_string(kMinIncrements + 1) + " observations, got " + std::to_string(x.size()));
    }
    std::vector<double> out(x.size() - 1);
    for (std::size_t k = 0; k + 1 < x.size(); ++k) {
        out[k] = x[k + 1] - x[k];
    }
    return IncrementSeries(std::move(out));
}

/// d = (mean |v|)² / mean v².
inline double kurtosis_ratio(std::span<const double> v)
{
    if (v.size() < kMinIncrements) {
        throw Error(ErrorKind::invalid_size, "kurtosis ratio needs at least " + std::to_string(kMinIncrements) + " values");
    }
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    for (double x : v) {
        abs_sum += std::abs(x);
        sq_sum += x * x;
    }
    if (sq_sum == 0.0) {
        throw Error(ErrorKind::degenerate_series, "kurtosis ratio of an all-zero series");
    }
    const double n = static_cast<double>(v.size());
    const double mean_abs = abs_sum / n;
    return mean_abs * mean_abs / (sq_sum / n);
}

inline constexpr double kMaxTheoreticalLambda = 40.0;

/// Limit of the ratio for z = sgn(ξ)|ξ|^λ, ξ Gaussian:
/// Γ((λ+1)/2)² / (√π·Γ(λ+½)). Evaluated through log-Γ.
inline double gaussian_ratio_theoretical(double lambda)
{
    if (!(lambda > 0.0 && lambda < kMaxTheoreticalLambda)) {
        throw Error(ErrorKind::domain, "theoretical ratio defined for 0 < lambda < 40, got " + std::to_string(lambda));
    }
    const double log_ratio = 2.0 * std::lgamma(0.5 * (lambda + 1.0)) - std::lgamma(lambda + 0.5) -
                             0.5 * std::log(std::numbers::pi);
    return std::exp(log_ratio);
}

/// sgn(y)|y|^λ elementwise; zeros and magnitudes below 1e−300 map to 0.
inline std::vector<double> signed_power(std::span<const double> y, double lambda)
{
    if (!(lambda > 0.0)) {
        throw Error(ErrorKind::domain, "power exponent must be positive");
    }
    std::vector<double> out(y.size());
    for (std::size_t k = 0; k < y.size(); ++k) {
        const double magnitude = std::abs(y[k]);
        if (magnitude < kMagnitudeFloor) {
            out[k] = 0.0;
            continue;
        }
        const double powered = lambda == 1.0 ? magnitude : std::pow(magnitude, lambda);
        out[k] = y[k] < 0.0 ? -powered : powered;
    }
    return out;
}

struct FitOptions {
    double tolerance = 1e-3;
    int max_iterations = 100;
    double lambda_min = 0.05;
    double lambda_max = 20.0;
};

namespace detail {

// Ratio of sgn(y)|y|^λ evaluated on magnitudes pre-scaled to (0, 1] by their
// maximum; the ratio is scale-free and the scaling keeps a^λ representable.
class PowerRatio {
public:
    explicit PowerRatio(std::span<const double> y) : count_(static_cast<double>(y.size()))
    {
        double peak = 0.0;
        for (double v : y) {
            peak = std::max(peak, std::abs(v));
        }
        for (double v : y) {
            const double magnitude = std::abs(v);
            if (magnitude >= kMagnitudeFloor && peak > 0.0) {
                log_magnitudes_.push_back(std::log(magnitude / peak));
            }
        }
    }

    double operator()(double lambda) const
    {
        double first = 0.0;
        double second = 0.0;
        for (double lm : log_magnitudes_) {
            const double p = std::exp(lambda * lm);
            first += p;
            second += p * p;
        }
        first /= count_;
        second /= count_;
        return first * first / second;
    }

    std::size_t nonzero() const noexcept { return log_magnitudes_.size(); }

    bool has_two_magnitudes() const
    {
        if (log_magnitudes_.empty()) {
            return false;
        }
        const double first = log_magnitudes_.front();
        return std::any_of(log_magnitudes_.begin(), log_magnitudes_.end(), [&](double v) { return v != first; });
    }

private:
    double count_;
    std::vector<double> log_magnitudes_;
};

// Solves gaussian_ratio_theoretical(μ) = target for μ by bisection; the map is
// decreasing from 1 (μ → 0) towards 0.
inline double invert_theoretical_ratio(double target)
{
    double lo = 1e-6;
    double hi = kMaxTheoreticalLambda - 1e-6;
    if (target >= gaussian_ratio_theoretical(lo)) {
        return lo;
    }
    if (target <= gaussian_ratio_theoretical(hi)) {
        return hi;
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (gaussian_ratio_theoretical(mid) > target) {
            lo = mid;
        }
        else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

/// Exponent λ* > 0 with |d(sgn(y)|y|^λ*) − 2/π| ≤ tolerance. The ratio is
/// non-increasing in λ, so the root is bracketed by doubling/halving from the
/// Γ-ratio inversion guess and then bisected.
inline double fit_lambda(const IncrementSeries& y, const FitOptions& options = {})
{
    const detail::PowerRatio ratio(y.values());
    if (ratio.nonzero() == 0) {
        throw Error(ErrorKind::degenerate_series, "all increments are zero");
    }
    if (!ratio.has_two_magnitudes()) {
        throw Error(ErrorKind::unfittable_series, "increments take a single magnitude; no power makes them Gaussian");
    }
    auto gap = [&](double lambda) { return ratio(lambda) - kGaussianRatio; };

    const double raw_gap = gap(1.0);
    if (std::abs(raw_gap) <= options.tolerance) {
        return 1.0;
    }

    // y ≈ sgn(ξ)|ξ|^μ has ratio ≈ theoretical(μ), and λ = 1/μ undoes it.
    const double mu = detail::invert_theoretical_ratio(raw_gap + kGaussianRatio);
    double guess = std::clamp(1.0 / mu, options.lambda_min, options.lambda_max);
    double guess_gap = gap(guess);
    if (std::abs(guess_gap) <= options.tolerance) {
        return guess;
    }

    double lo = guess;
    double hi = guess;
    if (guess_gap > 0.0) {
        // ratio too high: the root lies at larger λ
        while (true) {
            if (hi >= options.lambda_max) {
                throw Error(ErrorKind::unfittable_series, "no exponent up to " + std::to_string(options.lambda_max) +
                                                              " brings the ratio down to 2/pi");
            }
            lo = hi;
            hi = std::min(2.0 * hi, options.lambda_max);
            const double g = gap(hi);
            if (std::abs(g) <= options.tolerance) {
                return hi;
            }
            if (g < 0.0) {
                break;
            }
        }
    }
    else {
        while (true) {
            if (lo <= options.lambda_min) {
                throw Error(ErrorKind::unfittable_series, "no exponent down to " + std::to_string(options.lambda_min) +
                                                              " lifts the ratio up to 2/pi");
            }
            hi = lo;
            lo = std::max(0.5 * lo, options.lambda_min);
            const double g = gap(lo);
            if (std::abs(g) <= options.tolerance) {
                return lo;
            }
            if (g > 0.0) {
                break;
            }
        }
    }

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double g = gap(mid);
        if (std::abs(g) <= options.tolerance) {
            return mid;
        }
        (g > 0.0 ? lo : hi) = mid;
    }
    throw Error(ErrorKind::unfittable_series, "bisection did not reach the ratio tolerance");
}

inline GaussianizedSeries transform(const IncrementSeries& y, double lambda, double tolerance = FitOptions{}.tolerance)
{
    GaussianizedSeries out;
    out.values = signed_power(y.values(), lambda);
    out.lambda = lambda;
    out.achieved_ratio = kurtosis_ratio(out.values);
    out.tolerance = tolerance;
    return out;
}

/// y_k = sgn(z_k)|z_k|^{1/λ}.
inline IncrementSeries inverse_transform(const GaussianizedSeries& z)
{
    if (!(z.lambda > 0.0)) {
        throw Error(ErrorKind::domain, "transform exponent must be positive");
    }
    return IncrementSeries(signed_power(z.values, 1.0 / z.lambda));
}

/// fit_lambda followed by transform.
inline GaussianizedSeries gaussianize(const IncrementSeries& y, const FitOptions& options = {})
{
    return transform(y, fit_lambda(y, options), options.tolerance);
}

/// Fraction of exact zeros; the transform is ill-conditioned when this is large.
inline double zero_fraction(std::span<const double> v)
{
    if (v.empty()) {
        return 0.0;
    }
    const auto zeros = std::count(v.begin(), v.end(), 0.0);
    return static_cast<double>(zeros) / static_cast<double>(v.size());
}

} // namespace fbmts
