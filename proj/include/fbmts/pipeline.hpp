#pragma once

// Per-series analysis: normalise → detrend → increments → Gaussianise →
// estimate Ĥ → test the fBm hypothesis → classify.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "fbmts/error.hpp"
#include "fbmts/gaussianize.hpp"
#include "fbmts/hurst_estimate.hpp"
#include "fbmts/hypothesis_test.hpp"
#include "fbmts/series_io.hpp"

namespace fbmts {

struct NormalizedSeries {
    std::vector<double> values;
    double min = 0.0;
    double max = 1.0;
};

/// Affine map of the observed range onto [0, 1].
inline NormalizedSeries normalize(std::span<const double> values)
{
    if (values.empty()) {
        throw Error(ErrorKind::invalid_size, "cannot normalise an empty series");
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (!(*hi > *lo)) {
        throw Error(ErrorKind::degenerate_series, "constant series cannot be normalised");
    }
    NormalizedSeries out{std::vector<double>(values.size()), *lo, *hi};
    const double range = *hi - *lo;
    for (std::size_t k = 0; k < values.size(); ++k) {
        out.values[k] = (values[k] - *lo) / range;
    }
    return out;
}

/// Residuals after the OLS line over k = 0..n−1, plus what is needed to undo
/// both the normalisation and the detrending.
struct PreparedSeries {
    std::vector<double> values;
    double norm_min = 0.0;
    double norm_max = 1.0;
    double trend_intercept = 0.0;
    double trend_slope = 0.0;

    /// Original observations: (residual + trend) · (max − min) + min.
    std::vector<double> reconstruct() const
    {
        std::vector<double> out(values.size());
        for (std::size_t k = 0; k < values.size(); ++k) {
            const double level = values[k] + trend_intercept + trend_slope * static_cast<double>(k);
            out[k] = level * (norm_max - norm_min) + norm_min;
        }
        return out;
    }
};

inline PreparedSeries detrend(std::span<const double> values)
{
    if (values.size() < kMinIncrements + 1) {
        throw Error(ErrorKind::invalid_size, "detrending needs at least " + std::to_string(kMinIncrements + 1) +
                                                 " observations");
    }
    const double n = static_cast<double>(values.size());
    const double k_mean = (n - 1.0) / 2.0;
    double x_mean = 0.0;
    for (double v : values) {
        x_mean += v;
    }
    x_mean /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double dk = static_cast<double>(k) - k_mean;
        sxy += dk * (values[k] - x_mean);
        sxx += dk * dk;
    }
    PreparedSeries out;
    out.trend_slope = sxy / sxx;
    out.trend_intercept = x_mean - out.trend_slope * k_mean;
    out.values.resize(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        out.values[k] = values[k] - (out.trend_intercept + out.trend_slope * static_cast<double>(k));
    }
    return out;
}

/// normalize followed by detrend.
inline PreparedSeries prepare(std::span<const double> values)
{
    const auto normalized = normalize(values);
    auto prepared = detrend(normalized.values);
    prepared.norm_min = normalized.min;
    prepared.norm_max = normalized.max;
    return prepared;
}

struct AnalysisConfig {
    HurstGrid grid;
    double alpha = 0.1;
    double beta0 = 0.1;
    double q_constant = kDefaultQConstant;
    bool paper_constants = false;
    bool delta_on_persistent = false;
    double ratio_tolerance = 1e-3;
    int max_iterations = 100;
    GapPolicy gap_policy = GapPolicy::drop;

    void validate() const
    {
        grid.validate();
        if (!(alpha > 0.0 && alpha < 1.0)) {
            throw Error(ErrorKind::configuration, "alpha must lie in (0, 1)");
        }
        if (!(beta0 > 0.0)) {
            throw Error(ErrorKind::configuration, "beta0 must be positive");
        }
        if (!(q_constant > 0.0)) {
            throw Error(ErrorKind::configuration, "q_constant must be positive");
        }
        if (!(ratio_tolerance > 0.0)) {
            throw Error(ErrorKind::configuration, "ratio_tolerance must be positive");
        }
        if (max_iterations < 1) {
            throw Error(ErrorKind::configuration, "max_iterations must be at least 1");
        }
    }

    FitOptions fit_options() const
    {
        FitOptions options;
        options.tolerance = ratio_tolerance;
        options.max_iterations = max_iterations;
        return options;
    }

    TestOptions test_options() const
    {
        return TestOptions{beta0, alpha, paper_constants, delta_on_persistent};
    }
};

/// One row of the consumption report. Statistics are absent when the series
/// could not be analysed; b_n/beta1 and d_n/beta2 follow the test branch.
struct BuildingReport {
    std::string building_id;
    Quantity quantity = Quantity::P;
    std::size_t m = 0;
    std::optional<double> lambda;
    std::optional<double> achieved_ratio;
    std::optional<double> h_hat;
    std::optional<double> q_at_hat;
    std::optional<double> c;
    std::optional<double> a_n;
    std::optional<double> a_limit;
    std::optional<double> delta;
    std::optional<double> b_n;
    std::optional<double> d_n;
    std::optional<double> beta0;
    std::optional<double> beta1;
    std::optional<double> beta2;
    std::optional<Verdict> verdict;
    std::optional<Classification> classification;
    std::vector<std::string> warnings;
};

inline constexpr double kZeroFractionWarning = 0.5;

inline BuildingReport analyze(const RawSeries& series, const AnalysisConfig& config)
{
    config.validate();
    BuildingReport report;
    report.building_id = series.building_id;
    report.quantity = series.quantity;
    report.warnings = series.warnings;
    report.m = series.values.size() > 0 ? series.values.size() - 1 : 0;

    if (series.values.size() < kMinIncrements + 1) {
        if (report.warnings.empty()) {
            report.warnings.push_back("series too short: " + std::to_string(series.values.size()) +
                                      " observation(s), at least 9 are needed");
        }
        return report;
    }

    try {
        const auto prepared = prepare(series.values);
        const auto y = increments(prepared.values);
        if (zero_fraction(y.values()) > kZeroFractionWarning) {
            report.warnings.push_back("more than half of the increments are zero; the power transform is ill-conditioned");
        }

        double lambda = 0.0;
        try {
            lambda = fit_lambda(y, config.fit_options());
        }
        catch (const Error& e) {
            if (e.kind() != ErrorKind::unfittable_series) {
                throw;
            }
            report.verdict = Verdict::rejected;
            report.warnings.push_back(std::string("non-Gaussianizable: ") + e.what());
            return report;
        }

        const auto z = transform(y, lambda, config.ratio_tolerance);
        report.lambda = z.lambda;
        report.achieved_ratio = z.achieved_ratio;

        const auto estimate = estimate_hurst(z, config.grid, config.q_constant);
        report.h_hat = estimate.h_hat;
        report.q_at_hat = estimate.q_at_hat;

        const auto stats = test_hypothesis(z, estimate.h_hat, config.test_options());
        report.c = stats.c;
        report.a_n = stats.a_n;
        report.a_limit = stats.a_limit;
        report.delta = stats.delta;
        report.b_n = stats.b_n;
        report.d_n = stats.d_n;
        report.beta0 = stats.beta0;
        report.beta1 = stats.beta1;
        report.beta2 = stats.beta2;
        report.verdict = stats.verdict;
        report.classification = classify(estimate.h_hat, stats.verdict);
    }
    catch (const Error& e) {
        if (e.kind() == ErrorKind::configuration) {
            throw;
        }
        report.warnings.push_back(e.what());
    }
    return report;
}

/// Analyses every series independently; output ordered by (building, quantity).
inline std::vector<BuildingReport> analyze_all(std::span<const RawSeries> series, const AnalysisConfig& config)
{
    config.validate();
    std::vector<BuildingReport> reports;
    reports.reserve(series.size());
    for (const auto& s : series) {
        reports.push_back(analyze(s, config));
    }
    std::stable_sort(reports.begin(), reports.end(), [](const BuildingReport& a, const BuildingReport& b) {
        return std::tie(a.building_id, a.quantity) < std::tie(b.building_id, b.quantity);
    });
    return reports;
}

} // namespace fbmts
