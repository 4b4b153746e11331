#pragma once

// Exact, seeded sampling of fractional Brownian motion on the grid k/n.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "fbmts/error.hpp"
#include "fbmts/fbm_model.hpp"

namespace fbmts {

/// E{B_H(t)·B_H(s)} = ½(t^{2H} + s^{2H} − |t−s|^{2H}).
inline double fbm_covariance(double t, double s, HurstExponent h)
{
    if (!(t >= 0.0) || !(s >= 0.0)) {
        throw Error(ErrorKind::domain, "fBm covariance is defined for t, s >= 0");
    }
    const double hv = h.value();
    return 0.5 * (detail::pow_2h(t, hv) + detail::pow_2h(s, hv) - detail::pow_2h(std::abs(t - s), hv));
}

/// Standard normal source: std::mt19937_64 seeded with the 64-bit seed, each
/// pair of 64-bit draws mapped to 53-bit uniforms and through the Box–Muller
/// transform. Draws are consumed in pairs; the sine branch is cached.
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

    double operator()()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1], u2 in [0, 1)
        const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    std::vector<double> draw(std::size_t count)
    {
        std::vector<double> out(count);
        for (double& value : out) {
            value = (*this)();
        }
        return out;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

enum class SimulationMethod { cholesky, circulant };

constexpr std::string_view to_string(SimulationMethod method) noexcept
{
    return method == SimulationMethod::cholesky ? "cholesky" : "circulant";
}

inline SimulationMethod parse_simulation_method(std::string_view text)
{
    if (text == "cholesky") {
        return SimulationMethod::cholesky;
    }
    if (text == "circulant") {
        return SimulationMethod::circulant;
    }
    throw Error(ErrorKind::configuration, "unknown simulation method '" + std::string(text) + "'");
}

inline constexpr std::size_t kCholeskyDefaultLimit = 4096;

inline SimulationMethod default_simulation_method(std::size_t n) noexcept
{
    return n <= kCholeskyDefaultLimit ? SimulationMethod::cholesky : SimulationMethod::circulant;
}

/// Colours `noise` (i.i.d. standard normals) with the lower Cholesky factor of
/// the increment correlation matrix. The factor is never formed: the
/// Levinson–Durbin recursion yields it implicitly through the one-step
/// predictors, x_k = Σ_j φ_{k,j} x_{k−j} + √v_k · ε_k, which is exactly L·ε.
inline std::vector<double> cholesky_colour(const IncrementCorrelation& corr, std::span<const double> noise)
{
    const std::size_t n = corr.size();
    if (noise.size() != n) {
        throw Error(ErrorKind::invalid_size, "noise length must match correlation size");
    }
    const auto& rho = corr.first_row;
    std::vector<double> phi(n, 0.0), next(n, 0.0), x(n, 0.0);
    double variance = rho[0];
    x[0] = std::sqrt(variance) * noise[0];

    for (std::size_t k = 1; k < n; ++k) {
        double acc = rho[k];
        for (std::size_t j = 1; j < k; ++j) {
            acc -= phi[j] * rho[k - j];
        }
        const double kappa = acc / variance;
        for (std::size_t j = 1; j < k; ++j) {
            next[j] = phi[j] - kappa * phi[k - j];
        }
        next[k] = kappa;
        std::copy(next.begin() + 1, next.begin() + static_cast<std::ptrdiff_t>(k) + 1, phi.begin() + 1);
        variance *= (1.0 - kappa * kappa);
        if (!(variance > 0.0)) {
            throw Error(ErrorKind::ill_conditioned, "increment correlation lost positive definiteness at order " +
                                                        std::to_string(k));
        }
        double prediction = 0.0;
        for (std::size_t j = 1; j <= k; ++j) {
            prediction += phi[j] * x[k - j];
        }
        x[k] = prediction + std::sqrt(variance) * noise[k];
    }
    return x;
}

inline constexpr double kCirculantEigenTolerance = 1e-9;

/// Davies–Harte circulant embedding. The embedding size is twice the next power
/// of two ≥ n so the FFT stays radix-2.
inline std::vector<double> circulant_increments(HurstExponent h, std::size_t n, GaussianSource& source)
{
    std::size_t half = 1;
    while (half < n) {
        half <<= 1;
    }
    const std::size_t size = 2 * half;
    std::vector<double> embedding(size);
    for (std::size_t j = 0; j <= half; ++j) {
        embedding[j] = increment_correlation(h, j);
    }
    for (std::size_t j = half + 1; j < size; ++j) {
        embedding[j] = embedding[size - j];
    }

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> eigen;
    fft.fwd(eigen, embedding);

    std::vector<std::complex<double>> weighted(size);
    for (std::size_t k = 0; k < size; ++k) {
        double lambda = eigen[k].real();
        if (lambda < -kCirculantEigenTolerance) {
            throw Error(ErrorKind::method_failure,
                        "circulant embedding has negative eigenvalue " + std::to_string(lambda));
        }
        lambda = std::max(lambda, 0.0);
        const double re = source();
        const double im = source();
        weighted[k] = std::sqrt(lambda / static_cast<double>(size)) * std::complex<double>(re, im);
    }
    std::vector<std::complex<double>> spectrum;
    fft.fwd(spectrum, weighted);

    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = spectrum[k].real();
    }
    return out;
}

/// Unit-variance increments (fractional Gaussian noise) with correlation
/// build_correlation(h, n).
inline std::vector<double> simulate_increments(HurstExponent h, std::size_t n, GaussianSource& source,
                                               SimulationMethod method)
{
    if (n < 2) {
        throw Error(ErrorKind::invalid_size, "simulation needs n >= 2, got " + std::to_string(n));
    }
    if (method == SimulationMethod::cholesky) {
        const auto corr = build_correlation(h, n);
        const auto noise = source.draw(n);
        return cholesky_colour(corr, noise);
    }
    return circulant_increments(h, n, source);
}

/// Sample path B_H(k/n), k = 0..n.
struct FbmPath {
    HurstExponent hurst;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    SimulationMethod method = SimulationMethod::cholesky;
    std::vector<double> values;

    double time(std::size_t k) const { return static_cast<double>(k) / static_cast<double>(n); }

    std::vector<double> increments() const
    {
        std::vector<double> out(values.size() - 1);
        for (std::size_t k = 0; k + 1 < values.size(); ++k) {
            out[k] = values[k + 1] - values[k];
        }
        return out;
    }
};

inline FbmPath simulate_fbm(HurstExponent h, std::size_t n, std::uint64_t seed, SimulationMethod method)
{
    GaussianSource source(seed);
    auto noise = simulate_increments(h, n, source, method);
    const double scale = std::exp(-h.value() * std::log(static_cast<double>(n)));

    FbmPath path{h, n, seed, method, std::vector<double>(n + 1, 0.0)};
    for (std::size_t k = 0; k < n; ++k) {
        path.values[k + 1] = path.values[k] + scale * noise[k];
    }
    return path;
}

inline FbmPath simulate_fbm(HurstExponent h, std::size_t n, std::uint64_t seed)
{
    return simulate_fbm(h, n, seed, default_simulation_method(n));
}

} // namespace fbmts
