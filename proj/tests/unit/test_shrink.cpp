#include "svshrink/shrink.hpp"
#include "svshrink/spectrum.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace svshrink;

namespace {

EffectiveParams unit(double beta = 1.0) { return {1.0, 0.0, 1.0, beta}; }

Matrix low_rank(Eigen::Index m, Eigen::Index n, const std::vector<double>& x, unsigned seed) {
    std::srand(seed);
    const auto r = static_cast<Eigen::Index>(x.size());
    Eigen::HouseholderQR<Matrix> qu(Matrix::Random(m, r)), qv(Matrix::Random(n, r));
    const Matrix u = qu.householderQ() * Matrix::Identity(m, r);
    const Matrix v = qv.householderQ() * Matrix::Identity(n, r);
    return u * Eigen::Map<const Vector>(x.data(), r).asDiagonal() * v.transpose();
}

}  // namespace

TEST(OptimalShrinker, Examples) {
    EXPECT_NEAR(optimal_shrinker(2.5, unit()), 1.5, 1e-15);
    EXPECT_EQ(optimal_shrinker(2.0, unit()), 0.0);
    EXPECT_EQ(optimal_shrinker(1.2, unit()), 0.0);
    // The value on the data scale is divided by mu_a.
    const EffectiveParams p{0.5, 0.25, 1.0, 1.0};
    EXPECT_NEAR(optimal_shrinker(2.5, p), 3.0, 1e-14);
}

TEST(OptimalShrinker, ContinuousAtEdge) {
    for (double beta : {0.25, 0.5, 1.0}) {
        const EffectiveParams p{0.9, 0.0, 1.3, beta};
        const double e = bulk_edge(p);
        EXPECT_EQ(optimal_shrinker(e, p), 0.0);
        EXPECT_LT(std::abs(optimal_shrinker(e * (1 + 1e-18), p)), 1e-9);
        EXPECT_LT(std::abs(optimal_shrinker(std::nextafter(e, 10.0), p)), 1e-6);
        EXPECT_EQ(optimal_shrinker(std::nextafter(e, 0.0), p), 0.0);
    }
}

TEST(OptimalShrinker, BoundedAndMonotone) {
    for (double beta : {0.1, 0.5, 1.0}) {
        const EffectiveParams p{0.7, 0.21, 0.49, beta};
        double prev = 0.0;
        for (double y = bulk_edge(p); y < 20; y += 0.01) {
            const double eta = optimal_shrinker(y, p);
            EXPECT_LE(eta, y / p.mu_a + 1e-12);
            EXPECT_GE(eta, prev - 1e-12);
            prev = eta;
        }
    }
}

TEST(OptimalShrinker, NoiselessPassthrough) {
    const EffectiveParams p{0.5, 0.25, 0.0, 1.0};
    EXPECT_DOUBLE_EQ(optimal_shrinker(3.0, p), 6.0);
}

TEST(OptimalThreshold, ClosedForm) {
    EXPECT_NEAR(optimal_threshold(unit()), 2.309401, 1e-6);
    EXPECT_NEAR(optimal_threshold(unit()), 4.0 / std::sqrt(3.0), 1e-14);
    EXPECT_NEAR(crossover_ratio(1.0), std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(optimal_threshold({1.0, 0.0, 9.0, 1.0}), 3 * 4.0 / std::sqrt(3.0), 1e-13);
    EXPECT_EQ(optimal_threshold({1.0, 0.0, 0.0, 1.0}), 0.0);
}

TEST(OptimalThreshold, EqualsDisplacedCrossover) {
    for (double beta : {0.25, 0.5, 1.0}) {
        for (double mu : {1.0, 0.6}) {
            const EffectiveParams p{mu, 0.0, 1.7, beta};
            const double x_est = p.sigma_b() * crossover_ratio(beta);
            EXPECT_NEAR(optimal_threshold(p), displace(x_est / mu, p), 1e-9);
        }
    }
}

TEST(OptimalThreshold, AboveBulkEdge) {
    for (double beta = 0.01; beta <= 1.0; beta += 0.01) {
        EXPECT_GT(optimal_threshold(unit(beta)), bulk_edge(unit(beta))) << beta;
    }
}

TEST(ApplyRule, ZeroRule) {
    const Matrix y = Matrix::Random(6, 9);
    EXPECT_EQ(apply_rule(y, ShrinkageRule::zero(unit(6.0 / 9))), Matrix::Zero(6, 9));
}

TEST(ApplyRule, TsvdOfExactRankIsIdentity) {
    const Matrix x = low_rank(40, 70, {5, 3, 1}, 2);
    const Matrix xhat = apply_rule(x, ShrinkageRule::truncated(3, unit(40.0 / 70)));
    EXPECT_LT((xhat - x).norm(), 1e-12);
}

TEST(ApplyRule, HardThresholdKeepsOnlyStrictlyLarger) {
    const Matrix x = low_rank(30, 30, {5, 3, 2.5, 1}, 3);
    const auto out = shrink_matrix(x, ShrinkageRule::hard_threshold(2.5, unit()));
    EXPECT_EQ(out.kept_rank, 2);
    EXPECT_NEAR(out.coefficients(0), 5.0, 1e-12);
    EXPECT_EQ(out.coefficients(2), 0.0);
    EXPECT_THROW(ShrinkageRule::hard_threshold(1.9, unit()), std::invalid_argument);
}

TEST(ApplyRule, OptimalShrinkerCoefficients) {
    const Matrix x = low_rank(25, 25, {4, 2.5, 1.5}, 4);
    const auto out = shrink_matrix(x, ShrinkageRule::optimal(unit()));
    EXPECT_EQ(out.kept_rank, 2);
    EXPECT_NEAR(out.coefficients(0), optimal_shrinker(4, unit()), 1e-12);
    EXPECT_NEAR(out.coefficients(1), 1.5, 1e-12);
    EXPECT_EQ(out.coefficients(2), 0.0);
}

TEST(ApplyRule, TallMatrixMatchesTranspose) {
    const Matrix x = low_rank(30, 50, {6, 4, 3}, 5) + 0.01 * Matrix::Random(30, 50);
    const auto rule = ShrinkageRule::optimal({1.0, 0.0, 0.5, 0.6});
    const Matrix wide = apply_rule(x, rule);
    const Matrix tall = apply_rule(x.transpose(), rule);
    EXPECT_LT((wide - tall.transpose()).norm(), 1e-10);
}

TEST(ApplyRule, RejectsNonFinite) {
    Matrix y = Matrix::Ones(4, 4);
    y(0, 0) = std::numeric_limits<double>::infinity();
    EXPECT_THROW(apply_rule(y, ShrinkageRule::optimal(unit())), std::invalid_argument);
}
