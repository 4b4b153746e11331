#pragma once

// Checks whether Gaussianised increments behave like fBm increments by
// comparing weighted power variations against their limit laws:
//   A_n = (1/m)        Σ v_k z_k³  → −(3/2)c²          (H < 1/2)
//   B_n = m^{−(1+H)}   Σ v_k² z_k³ → 3c^{5/2}·η        (H < 1/2), η ~ N(0, σ²), σ = (2H+2)^{−1/2}
//   D_n = m^{−2H}      Σ v_k z_k³  → (3/2)c²·B²        (H > 1/2), B ~ N(0, 1)
// where v_k is the partial sum of the first k−1 increments and c = mean z².

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "fbmts/error.hpp"
#include "fbmts/gaussianize.hpp"

namespace fbmts {

enum class Verdict { accepted, rejected };
enum class Branch { antipersistent, persistent };

constexpr std::string_view to_string(Verdict verdict) noexcept
{
    return verdict == Verdict::accepted ? "accepted" : "rejected";
}

constexpr std::string_view to_string(Branch branch) noexcept
{
    return branch == Branch::antipersistent ? "antipersistent" : "persistent";
}

/// v_1 = 0, v_{k+1} = v_k + z_k.
inline std::vector<double> partial_sums(std::span<const double> z)
{
    std::vector<double> v(z.size(), 0.0);
    for (std::size_t k = 1; k < z.size(); ++k) {
        v[k] = v[k - 1] + z[k - 1];
    }
    return v;
}

namespace detail {

inline void check_pair(std::span<const double> z, std::span<const double> v)
{
    if (z.size() != v.size() || z.empty()) {
        throw Error(ErrorKind::invalid_size, "statistic needs equal non-empty z and v");
    }
}

inline double weighted_cube_sum(std::span<const double> z, std::span<const double> v, int weight_power)
{
    double sum = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
        const double weight = weight_power == 1 ? v[k] : v[k] * v[k];
        sum += weight * z[k] * z[k] * z[k];
    }
    return sum;
}

} // namespace detail

inline double stat_a(std::span<const double> z, std::span<const double> v)
{
    detail::check_pair(z, v);
    return detail::weighted_cube_sum(z, v, 1) / static_cast<double>(z.size());
}

inline double stat_b(std::span<const double> z, std::span<const double> v, double h)
{
    detail::check_pair(z, v);
    if (!(h > 0.0 && h <= 0.5)) {
        throw Error(ErrorKind::domain, "B_n is defined for H in (0, 0.5]");
    }
    const double m = static_cast<double>(z.size());
    return detail::weighted_cube_sum(z, v, 2) * std::exp(-(1.0 + h) * std::log(m));
}

inline double stat_d(std::span<const double> z, std::span<const double> v, double h)
{
    detail::check_pair(z, v);
    if (!(h > 0.5 && h < 1.0)) {
        throw Error(ErrorKind::domain, "D_n is defined for H in (0.5, 1)");
    }
    const double m = static_cast<double>(z.size());
    return detail::weighted_cube_sum(z, v, 1) * std::exp(-2.0 * h * std::log(m));
}

/// Quantile of the standard normal law.
inline double normal_quantile(double p)
{
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

inline constexpr double kPaperBeta1Coefficient = 4.95;
inline constexpr double kPaperBeta2Coefficient = 4.08;

struct Thresholds {
    double beta1 = 0.0;
    double beta2 = 0.0;
};

/// β₁ bounds |B_n| and β₂ bounds D_n at level α. Derived from the limit laws:
/// β₁ = 3·z·c^{2.5}/√(2H+2), β₂ = 1.5·z²·c², z the 1 − α/2 normal quantile.
/// With `paper_constants` the coefficients 3z and 1.5z² are replaced by the
/// tabulated 4.95 and 4.08.
inline Thresholds thresholds(double c, double h, double alpha, bool paper_constants)
{
    if (!(c > 0.0)) {
        throw Error(ErrorKind::degenerate_series, "thresholds need c > 0");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error(ErrorKind::configuration, "significance level must lie in (0, 1)");
    }
    double beta1_coefficient = kPaperBeta1Coefficient;
    double beta2_coefficient = kPaperBeta2Coefficient;
    if (!paper_constants) {
        const double quantile = normal_quantile(1.0 - alpha / 2.0);
        beta1_coefficient = 3.0 * quantile;
        beta2_coefficient = 1.5 * quantile * quantile;
    }
    return Thresholds{beta1_coefficient * std::pow(c, 2.5) / std::sqrt(2.0 * h + 2.0), beta2_coefficient * c * c};
}

/// δ = |A_n − A| / |A|.
inline double relative_deviation(double a_n, double a_limit)
{
    return std::abs(a_n - a_limit) / std::abs(a_limit);
}

inline Verdict decide_antipersistent(double delta, double b_n, double beta0, double beta1) noexcept
{
    return delta < beta0 && std::abs(b_n) < beta1 ? Verdict::accepted : Verdict::rejected;
}

/// `require_delta` also applies δ < β₀ on this branch.
inline Verdict decide_persistent(double delta, double d_n, double beta0, double beta2, bool require_delta) noexcept
{
    const bool delta_ok = !require_delta || delta < beta0;
    return delta_ok && d_n > 0.0 && d_n < beta2 ? Verdict::accepted : Verdict::rejected;
}

struct TestOptions {
    double beta0 = 0.1;
    double alpha = 0.1;
    bool paper_constants = false;
    /// A_n only has the −(3/2)c² limit for H < 1/2; off by default.
    bool delta_on_persistent = false;
};

struct HypothesisStats {
    std::size_t m = 0;
    double c = 0.0;
    double a_n = 0.0;
    std::optional<double> b_n;
    std::optional<double> d_n;
    double a_limit = 0.0;
    double delta = 0.0;
    double sigma = 0.0;
    double beta0 = 0.0;
    std::optional<double> beta1;
    std::optional<double> beta2;
    double h_used = 0.0;
    Verdict verdict = Verdict::rejected;
    Branch branch = Branch::antipersistent;
};

inline HypothesisStats test_hypothesis(std::span<const double> z, double h_hat, const TestOptions& options = {})
{
    if (z.size() < kMinIncrements) {
        throw Error(ErrorKind::invalid_size, "hypothesis test needs at least " + std::to_string(kMinIncrements) +
                                                 " increments");
    }
    if (!(h_hat > 0.0 && h_hat < 1.0)) {
        throw Error(ErrorKind::domain, "Hurst exponent must lie in (0, 1)");
    }
    if (!(options.beta0 > 0.0)) {
        throw Error(ErrorKind::configuration, "beta0 must be positive");
    }

    HypothesisStats stats;
    stats.m = z.size();
    for (double x : z) {
        stats.c += x * x;
    }
    stats.c /= static_cast<double>(z.size());
    if (stats.c == 0.0) {
        throw Error(ErrorKind::degenerate_series, "hypothesis test on an all-zero series");
    }

    const auto v = partial_sums(z);
    stats.h_used = h_hat;
    stats.beta0 = options.beta0;
    stats.sigma = 1.0 / std::sqrt(2.0 * h_hat + 2.0);
    stats.a_n = stat_a(z, v);
    stats.a_limit = -1.5 * stats.c * stats.c;
    stats.delta = relative_deviation(stats.a_n, stats.a_limit);

    const auto limits = thresholds(stats.c, h_hat, options.alpha, options.paper_constants);
    if (h_hat <= 0.5) {
        stats.branch = Branch::antipersistent;
        stats.b_n = stat_b(z, v, h_hat);
        stats.beta1 = limits.beta1;
        stats.verdict = decide_antipersistent(stats.delta, *stats.b_n, options.beta0, limits.beta1);
    }
    else {
        stats.branch = Branch::persistent;
        stats.d_n = stat_d(z, v, h_hat);
        stats.beta2 = limits.beta2;
        stats.verdict =
            decide_persistent(stats.delta, *stats.d_n, options.beta0, limits.beta2, options.delta_on_persistent);
    }
    return stats;
}

inline HypothesisStats test_hypothesis(const GaussianizedSeries& z, double h_hat, const TestOptions& options = {})
{
    return test_hypothesis(std::span<const double>(z.values), h_hat, options);
}

enum class Persistence { antipersistent, independent, persistent };
enum class MemoryClass { short_memory, independent, long_memory };
enum class NoiseLabel { pink, white, black };

constexpr std::string_view to_string(Persistence p) noexcept
{
    switch (p) {
    case Persistence::antipersistent: return "antipersistent";
    case Persistence::independent: return "independent";
    case Persistence::persistent: return "persistent";
    }
    return "";
}

constexpr std::string_view to_string(MemoryClass m) noexcept
{
    switch (m) {
    case MemoryClass::short_memory: return "short";
    case MemoryClass::independent: return "independent";
    case MemoryClass::long_memory: return "long";
    }
    return "";
}

constexpr std::string_view to_string(NoiseLabel n) noexcept
{
    switch (n) {
    case NoiseLabel::pink: return "pink";
    case NoiseLabel::white: return "white";
    case NoiseLabel::black: return "black";
    }
    return "";
}

struct Classification {
    Persistence persistence = Persistence::independent;
    MemoryClass memory = MemoryClass::independent;
    NoiseLabel noise = NoiseLabel::white;
    bool forecastable = false;

    friend bool operator==(const Classification&, const Classification&) = default;
};

/// Only an accepted persistent model supports a forecast.
inline Classification classify(double h_hat, Verdict verdict)
{
    if (!(h_hat > 0.0 && h_hat < 1.0)) {
        throw Error(ErrorKind::domain, "Hurst exponent must lie in (0, 1)");
    }
    Classification out;
    if (h_hat < 0.5) {
        out = {Persistence::antipersistent, MemoryClass::short_memory, NoiseLabel::pink, false};
    }
    else if (h_hat > 0.5) {
        out = {Persistence::persistent, MemoryClass::long_memory, NoiseLabel::black, false};
    }
    out.forecastable = verdict == Verdict::accepted && h_hat > 0.5;
    return out;
}

} // namespace fbmts
