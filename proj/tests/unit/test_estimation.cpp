#include "oracles.hpp"
#include "svshrink/estimation.hpp"
#include "svshrink/sim.hpp"
#include "svshrink/spectrum.hpp"
#include "svshrink/svd.hpp"

#include <gtest/gtest.h>

using namespace svshrink;

TEST(EstimateSigmaB, UsesLowerMedian) {
    Vector s(4);
    s << 4.0, 3.0, 2.0, 1.0;
    EXPECT_NEAR(estimate_sigma_b(s, 10, 0.4), 3.0 / mp_median({0.4, 1.0}), 1e-12);
    Vector odd(3);
    odd << 1.0, 5.0, 2.0;
    EXPECT_NEAR(estimate_sigma_b(odd, 3, 1.0), 2.0 / oracle::kMpMedianBeta1, 1e-9);
}

TEST(EstimateSigmaB, Errors) {
    EXPECT_THROW(estimate_sigma_b(Vector::Ones(2), 2, 1.0), std::invalid_argument);
    EXPECT_THROW(estimate_sigma_b(Vector::Zero(5), 5, 1.0), std::invalid_argument);
    EXPECT_THROW(estimate_parameters(Matrix::Zero(5, 5), false), std::invalid_argument);
}

TEST(EstimateSigmaB, PureNoiseAndHomogeneity) {
    Rng rng(21);
    const Matrix z = contaminate(Matrix::Zero(300, 300), ModeDescriptor::additive(1.0), rng);
    const auto r1 = estimate_parameters(z, false);
    EXPECT_NEAR(r1.sigma_b_hat, 1.0, 0.05);
    EXPECT_FALSE(r1.mu_a_hat.has_value());
    const auto r3 = estimate_parameters(3.0 * z, false);
    EXPECT_NEAR(r3.sigma_b_hat, 3.0 * r1.sigma_b_hat, 1e-9);
}

TEST(EstimateMuA, MissingFraction) {
    EXPECT_EQ(estimate_mu_a_missing(Matrix::Ones(4, 4)), 1.0);
    EXPECT_EQ(estimate_mu_a_missing(Matrix::Zero(4, 4)), 0.0);
    Rng rng(22);
    const Matrix y = contaminate(Matrix::Ones(1000, 1000), ModeDescriptor::missing(0.7), rng);
    EXPECT_NEAR(estimate_mu_a_missing(y), 0.7, 0.01);
}

// Median matching recovers the compiled sigma_b for every mode with noise.
TEST(EstimateSigmaB, RoundTripThroughEveryNoisyMode) {
    const std::vector<ModeDescriptor> modes{
        ModeDescriptor::additive(1.0),
        ModeDescriptor::outliers(0.8, 2.0),
        ModeDescriptor::corruption(0.75, 1.5),
        ModeDescriptor::make_composite({ModeKind::additive_noise, ModeKind::missing_at_random},
                                       1.0, 0.0, 0.7),
        ModeDescriptor::make_composite(
            {ModeKind::additive_noise, ModeKind::corruption_at_random}, 1.0, 3.0, 0.8),
    };
    std::uint64_t seed = 40;
    for (const auto& mode : modes) {
        Rng rng(seed++);
        SignalSpec spec{1000, 1000, {3.0}};
        const Signal s = make_signal(spec, rng);
        const Matrix y = contaminate(s.matrix, mode, rng);
        const double truth = compile_mode(mode, 1.0).sigma_b();
        const auto report = estimate_parameters(y, false);
        EXPECT_NEAR(report.sigma_b_hat / truth, 1.0, 0.03) << nlohmann::json(mode).dump();
    }
}

TEST(EstimationReport, Json) {
    EstimationReport r{1.5, 0.7, "median-matching", 10, 8, 1.2};
    const nlohmann::json j = r;
    EXPECT_DOUBLE_EQ(j.at("sigma_b_hat").get<double>(), 1.5);
    EXPECT_DOUBLE_EQ(j.at("mu_a_hat").get<double>(), 0.7);
    EXPECT_EQ(j.at("inputs").at("n"), 10);
}
