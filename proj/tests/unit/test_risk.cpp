#include "oracles.hpp"
#include "svshrink/risk.hpp"
#include "svshrink/shrink.hpp"
#include "svshrink/spectrum.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace svshrink;

namespace {

EffectiveParams unit(double beta = 1.0) { return {1.0, 0.0, 1.0, beta}; }

}  // namespace

TEST(ShrinkerAmse, Examples) {
    EXPECT_NEAR(shrinker_amse(2.0, unit()), 1.75, 1e-14);
    EXPECT_DOUBLE_EQ(shrinker_amse(0.5, unit()), 0.25);
    EXPECT_NEAR(shrinker_amse(1e4, unit()), 2.0, 1e-6);
}

TEST(ShrinkerAmse, MatchesTranscription) {
    for (double beta : {0.1, 0.25, 0.5, 1.0}) {
        for (double mu : {1.0, 0.7}) {
            const EffectiveParams p{mu, 0.0, 1.44, beta};
            for (double x = 0.01; x < 15; x += 0.0371) {
                EXPECT_NEAR(shrinker_amse(x, p), oracle::shrinker_amse(x, mu, 1.2, beta),
                            1e-10 * std::max(1.0, x * x));
            }
        }
    }
}

// The shrinker loss equals x^2 - eta*(displace(x))^2.
TEST(ShrinkerAmse, PythagoreanIdentity) {
    const EffectiveParams p{0.8, 0.0, 1.1, 0.4};
    for (double x = detection_level(p) * 1.01; x < 12; x += 0.05) {
        const double eta = optimal_shrinker(displace(x, p), p);
        EXPECT_NEAR(shrinker_amse(x, p), x * x - eta * eta, 1e-9 * x * x);
    }
}

TEST(ThresholdAmse, Examples) {
    const double lam = optimal_threshold(unit());
    const double x = std::sqrt(3.0);
    EXPECT_NEAR(oracle::threshold_keep(x, 1, 1, 1), 3.0, 1e-12);
    EXPECT_NEAR(threshold_amse(x * (1 + 1e-9), lam, unit()), 3.0, 1e-7);
    EXPECT_NEAR(threshold_amse(x * (1 - 1e-9), lam, unit()), 3.0, 1e-7);
    // TSVD keep branch at the transition.
    EXPECT_NEAR(oracle::threshold_keep(1.0, 1, 1, 1), 5.0, 1e-12);
    EXPECT_NEAR(threshold_amse(1 + 1e-7, 2.0, unit()), 5.0, 1e-5);
    EXPECT_DOUBLE_EQ(threshold_amse(1.0, 2.0, unit()), 1.0);
    EXPECT_THROW(threshold_amse(1.0, 1.9, unit()), std::invalid_argument);
}

TEST(ThresholdAmse, KeepBranchMatchesTranscription) {
    for (double beta : {0.25, 0.5, 1.0}) {
        const EffectiveParams p{0.6, 0.0, 2.25, beta};
        const double edge = bulk_edge(p);
        for (double x = 0.1; x < 20; x += 0.0713) {
            const double ref = displace(x, p) > edge ? oracle::threshold_keep(x, 0.6, 1.5, beta)
                                                     : x * x;
            EXPECT_NEAR(threshold_amse(x, edge, p), ref, 1e-10 * std::max(1.0, x * x));
        }
    }
}

TEST(RuleAmse, Dispatch) {
    EXPECT_DOUBLE_EQ(rule_amse(3.0, AmseRule::zero, unit()), 9.0);
    EXPECT_DOUBLE_EQ(rule_amse(3.0, AmseRule::optimal_shrinker, unit()),
                     shrinker_amse(3.0, unit()));
    EXPECT_DOUBLE_EQ(rule_amse(3.0, AmseRule::tsvd, unit()), threshold_amse(3.0, 2.0, unit()));
    EXPECT_DOUBLE_EQ(rule_amse(3.0, AmseRule::optimal_threshold, unit()),
                     threshold_amse(3.0, optimal_threshold(unit()), unit()));
}

TEST(TotalAmse, SumsComponents) {
    const std::vector<double> x{6, 5, 4, 3, 2};
    const auto p = unit();
    const auto prof = total_amse(x, AmseRule::optimal_shrinker, p);
    double sum = 0;
    for (double xi : x) sum += shrinker_amse(xi, p);
    EXPECT_NEAR(prof.total, sum, 1e-12);
    ASSERT_EQ(prof.per_value.size(), 5u);
    EXPECT_EQ(prof.per_value[2].first, 4.0);
    const std::vector<double> one{2.0};
    EXPECT_DOUBLE_EQ(total_amse(one, AmseRule::optimal_shrinker, p).total, 1.75);
}

TEST(TotalAmse, RejectsBadOrdering) {
    const std::vector<double> up{2, 3}, dup{3, 3}, neg{3, -1};
    EXPECT_THROW(total_amse(up, AmseRule::tsvd, unit()), std::invalid_argument);
    EXPECT_THROW(total_amse(dup, AmseRule::tsvd, unit()), std::invalid_argument);
    EXPECT_THROW(total_amse(neg, AmseRule::tsvd, unit()), std::invalid_argument);
    EXPECT_THROW(total_amse_threshold(up, 2.5, unit()), std::invalid_argument);
}

TEST(CriticalLevel, Values) {
    EXPECT_NEAR(critical_level(AmseRule::optimal_shrinker, unit()), 1.0, 1e-15);
    EXPECT_NEAR(critical_level(AmseRule::optimal_threshold, unit()), std::sqrt(3.0), 1e-14);
    const EffectiveParams p{0.7, 0.0, 0.7, 1.0};
    EXPECT_NEAR(critical_level(AmseRule::optimal_threshold, p),
                std::sqrt(3.0) * p.sigma_b() / 0.7, 1e-13);
    EXPECT_THROW(critical_level(AmseRule::tsvd, unit()), std::invalid_argument);
    for (double beta = 0.05; beta <= 1.0; beta += 0.05) {
        const auto q = unit(beta);
        EXPECT_NEAR(critical_level(AmseRule::optimal_shrinker, q), detection_level(q), 1e-15);
        EXPECT_GT(critical_level(AmseRule::optimal_threshold, q),
                  critical_level(AmseRule::optimal_shrinker, q));
    }
}

TEST(WorstCase, ClosedForms) {
    EXPECT_NEAR(worst_case_mse(AmseRule::tsvd, 2, unit()), 10.0, 1e-14);
    EXPECT_NEAR(worst_case_mse(AmseRule::optimal_shrinker, 1, unit()), 2.0, 1e-14);
    EXPECT_NEAR(worst_case_mse(AmseRule::optimal_threshold, 1, unit()), 3.0, 1e-14);
    const EffectiveParams p{0.5, 0.0, 4.0, 1.0};
    EXPECT_NEAR(worst_case_mse(AmseRule::tsvd, 1, p), 5.0 * 16.0, 1e-12);
    EXPECT_THROW(worst_case_mse(AmseRule::tsvd, 1, unit(0.5)), std::invalid_argument);
    EXPECT_THROW(worst_case_mse(AmseRule::tsvd, 0, unit()), std::invalid_argument);
}

TEST(WorstCase, NumericalMatchesClosedForms) {
    const auto tsvd = worst_case_numerical(AmseRule::tsvd, 1, unit());
    EXPECT_NEAR(tsvd.value, 5.0, 1e-6);
    EXPECT_NEAR(tsvd.argmax_x, 1.0, 1e-6);
    const auto thr = worst_case_numerical(AmseRule::optimal_threshold, 1, unit());
    EXPECT_NEAR(thr.value, 3.0, 1e-6);
    EXPECT_NEAR(thr.argmax_x, std::sqrt(3.0), 1e-6);
    const auto shr = worst_case_numerical(AmseRule::optimal_shrinker, 3, unit());
    EXPECT_LE(shr.value, 6.0);
    EXPECT_NEAR(shr.value, 6.0, 0.01 * 6.0);
}

TEST(RiskCurve, CsvLayout) {
    const std::vector<double> x{0.5, 2.0};
    const std::string csv = risk_curve_csv(x, unit());
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "x,amse_shrinker,amse_threshold,amse_tsvd");
    EXPECT_NE(csv.find("\n2,1.75,"), std::string::npos) << csv;
}

TEST(RiskProfileJson, Fields) {
    const std::vector<double> x{3.0, 0.5};
    const nlohmann::json j = total_amse(x, AmseRule::optimal_shrinker, unit());
    EXPECT_TRUE(j.contains("total"));
    EXPECT_TRUE(j.contains("per_value"));
    EXPECT_EQ(j.at("per_value").at(0).at("detectable"), true);
    EXPECT_EQ(j.at("per_value").at(1).at("detectable"), false);
    EXPECT_DOUBLE_EQ(j.at("per_value").at(1).at("amse").get<double>(), 0.25);
}
