#include <cmath>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "fbmts/fbm_sim.hpp"
#include "fbmts/gaussianize.hpp"

using fbmts::HurstExponent;
using fbmts::SimulationMethod;

namespace {

double lag1_correlation(const std::vector<double>& x)
{
    double mean = 0.0;
    for (double v : x) {
        mean += v;
    }
    mean /= static_cast<double>(x.size());
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        den += (x[k] - mean) * (x[k] - mean);
        if (k + 1 < x.size()) {
            num += (x[k] - mean) * (x[k + 1] - mean);
        }
    }
    return num / den;
}

} // namespace

TEST(FbmCovariance, Examples)
{
    EXPECT_EQ(fbmts::fbm_covariance(0.0, 0.7, HurstExponent(0.3)), 0.0);
    EXPECT_EQ(fbmts::fbm_covariance(0.0, 0.0, HurstExponent(0.8)), 0.0);
    EXPECT_NEAR(fbmts::fbm_covariance(1.0, 1.0, HurstExponent(0.3)), 1.0, 1e-15);
    EXPECT_NEAR(fbmts::fbm_covariance(1.0, 1.0, HurstExponent(0.9)), 1.0, 1e-15);
    EXPECT_NEAR(fbmts::fbm_covariance(1.0, 2.0, HurstExponent(0.5)), 1.0, 1e-15);
    EXPECT_NEAR(fbmts::fbm_covariance(0.3, 0.8, HurstExponent(0.5)), 0.3, 1e-15);
    EXPECT_THROW(fbmts::fbm_covariance(-1.0, 1.0, HurstExponent(0.5)), fbmts::Error);
}

TEST(GaussianSource, DeterministicPerSeed)
{
    fbmts::GaussianSource a(123), b(123), c(124);
    const auto xa = a.draw(100);
    const auto xb = b.draw(100);
    const auto xc = c.draw(100);
    EXPECT_EQ(xa, xb);
    EXPECT_NE(xa, xc);
}

TEST(GaussianSource, MomentsAreStandardNormal)
{
    fbmts::GaussianSource source(7);
    const auto x = source.draw(200000);
    double mean = 0.0, second = 0.0, fourth = 0.0;
    for (double v : x) {
        mean += v;
        second += v * v;
        fourth += v * v * v * v;
    }
    const double n = static_cast<double>(x.size());
    EXPECT_NEAR(mean / n, 0.0, 0.01);
    EXPECT_NEAR(second / n, 1.0, 0.015);
    EXPECT_NEAR(fourth / n, 3.0, 0.08);
}

TEST(SimulationMethod, ParseAndDefault)
{
    EXPECT_EQ(fbmts::parse_simulation_method("cholesky"), SimulationMethod::cholesky);
    EXPECT_EQ(fbmts::parse_simulation_method("circulant"), SimulationMethod::circulant);
    EXPECT_THROW(fbmts::parse_simulation_method("hosking"), fbmts::Error);
    EXPECT_EQ(fbmts::default_simulation_method(4096), SimulationMethod::cholesky);
    EXPECT_EQ(fbmts::default_simulation_method(4097), SimulationMethod::circulant);
}

TEST(CholeskyColour, MatchesDenseFactorOnSameNoise)
{
    for (double h : {0.15, 0.5, 0.72, 0.93}) {
        const std::size_t n = 200;
        const auto corr = fbmts::build_correlation(HurstExponent(h), n);
        fbmts::GaussianSource source(99);
        const auto noise = source.draw(n);

        Eigen::MatrixXd dense(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = corr(i, j);
            }
        }
        const Eigen::MatrixXd lower = dense.llt().matrixL();
        const Eigen::VectorXd eps = Eigen::Map<const Eigen::VectorXd>(noise.data(), static_cast<Eigen::Index>(n));
        const Eigen::VectorXd expected = lower * eps;

        const auto got = fbmts::cholesky_colour(corr, noise);
        for (std::size_t k = 0; k < n; ++k) {
            EXPECT_NEAR(got[k], expected(static_cast<Eigen::Index>(k)), 1e-9) << "H=" << h << " k=" << k;
        }
    }
}

TEST(SimulateFbm, PathShape)
{
    for (auto method : {SimulationMethod::cholesky, SimulationMethod::circulant}) {
        const auto path = fbmts::simulate_fbm(HurstExponent(0.4), 100, 3, method);
        ASSERT_EQ(path.values.size(), 101u);
        EXPECT_EQ(path.values[0], 0.0);
        EXPECT_EQ(path.time(0), 0.0);
        EXPECT_EQ(path.time(100), 1.0);
        EXPECT_EQ(path.increments().size(), 100u);
    }
    EXPECT_THROW(fbmts::simulate_fbm(HurstExponent(0.4), 1, 3, SimulationMethod::cholesky), fbmts::Error);
}

TEST(SimulateFbm, DeterministicPerMethod)
{
    for (auto method : {SimulationMethod::cholesky, SimulationMethod::circulant}) {
        const auto a = fbmts::simulate_fbm(HurstExponent(0.65), 512, 2024, method);
        const auto b = fbmts::simulate_fbm(HurstExponent(0.65), 512, 2024, method);
        const auto c = fbmts::simulate_fbm(HurstExponent(0.65), 512, 2025, method);
        EXPECT_EQ(a.values, b.values);
        EXPECT_NE(a.values, c.values);
    }
}

TEST(SimulateFbm, WienerIncrementsAreUncorrelated)
{
    const auto path = fbmts::simulate_fbm(HurstExponent(0.5), 1024, 42, SimulationMethod::cholesky);
    EXPECT_LT(std::abs(lag1_correlation(path.increments())), 0.1);
}

TEST(SimulateFbm, PooledLagOneCorrelation)
{
    for (auto method : {SimulationMethod::cholesky, SimulationMethod::circulant}) {
        for (double h : {0.3, 0.7}) {
            double num = 0.0, den = 0.0;
            for (std::uint64_t seed = 1; seed <= 200; ++seed) {
                const auto inc = fbmts::simulate_fbm(HurstExponent(h), 1024, seed, method).increments();
                for (std::size_t k = 0; k < inc.size(); ++k) {
                    den += inc[k] * inc[k];
                    if (k + 1 < inc.size()) {
                        num += inc[k] * inc[k + 1];
                    }
                }
            }
            const double expected = fbmts::increment_correlation(HurstExponent(h), 1);
            EXPECT_NEAR(num / den, expected, 0.03) << to_string(method) << " H=" << h;
        }
    }
}

TEST(SimulateFbm, VarianceAndSelfSimilarity)
{
    for (auto method : {SimulationMethod::cholesky, SimulationMethod::circulant}) {
        for (double h : {0.3, 0.7}) {
            double at_quarter = 0.0, at_half = 0.0, at_one = 0.0;
            const int paths = 2000;
            for (int seed = 0; seed < paths; ++seed) {
                const auto path = fbmts::simulate_fbm(HurstExponent(h), 1024, static_cast<std::uint64_t>(seed), method);
                at_quarter += path.values[256] * path.values[256];
                at_half += path.values[512] * path.values[512];
                at_one += path.values[1024] * path.values[1024];
            }
            EXPECT_NEAR(at_one / paths, 1.0, 0.1) << to_string(method) << " H=" << h;
            EXPECT_NEAR(at_quarter / paths / std::pow(0.25, 2 * h), 1.0, 0.1);
            EXPECT_NEAR(at_half / paths / std::pow(0.5, 2 * h), 1.0, 0.1);
        }
    }
}

TEST(SimulateFbm, IncrementsLookGaussian)
{
    for (auto method : {SimulationMethod::cholesky, SimulationMethod::circulant}) {
        const auto path = fbmts::simulate_fbm(HurstExponent(0.35), 2048, 8, method);
        EXPECT_LT(std::abs(fbmts::kurtosis_ratio(path.increments()) - fbmts::kGaussianRatio), 0.05);
    }
}

TEST(SimulateFbm, DefaultMethodFollowsSize)
{
    EXPECT_EQ(fbmts::simulate_fbm(HurstExponent(0.5), 64, 1).method, SimulationMethod::cholesky);
    EXPECT_EQ(fbmts::simulate_fbm(HurstExponent(0.5), 5000, 1).method, SimulationMethod::circulant);
}
