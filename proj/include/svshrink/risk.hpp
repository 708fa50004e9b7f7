#pragma once

#include "svshrink/model.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace svshrink {

/// Rules with closed-form asymptotic risk. `tsvd` is hard thresholding at the
/// bulk edge.
enum class AmseRule { optimal_shrinker, optimal_threshold, tsvd, zero };

std::string_view to_string(AmseRule rule);

/// Per-component AMSE of the optimal shrinker at signal level x.
double shrinker_amse(double x, const EffectiveParams& params);

/// Per-component AMSE of hard thresholding at lambda (lambda >= bulk edge).
/// The component is kept iff displace(x) > lambda.
double threshold_amse(double x, double lambda, const EffectiveParams& params);

double rule_amse(double x, AmseRule rule, const EffectiveParams& params);

struct RiskProfile {
    std::vector<std::pair<double, double>> per_value;  // (x_i, L1)
    double total = 0.0;
    std::vector<bool> detectable;
};

void to_json(nlohmann::json& j, const RiskProfile& profile);

/// x must be strictly decreasing and positive.
RiskProfile total_amse(std::span<const double> x, AmseRule rule, const EffectiveParams& params);
RiskProfile total_amse_threshold(std::span<const double> x, double lambda,
                                 const EffectiveParams& params);

/// Smallest signal level a rule can reconstruct better than the zero rule.
/// Only optimal_shrinker and optimal_threshold are accepted.
double critical_level(AmseRule rule, const EffectiveParams& params);

/// Closed-form worst-case risk over rank-r signals; requires beta == 1.
double worst_case_mse(AmseRule rule, int rank, const EffectiveParams& params);

struct SupGrid {
    double t_min = 1e-3;  // in units of t = mu_a x / sigma_b
    double t_max = 100.0;
    std::size_t points = 100001;
};

struct WorstCase {
    double value = 0.0;
    double argmax_x = 0.0;
};

/// Grid maximum of rank * L1(x) for any beta. For threshold rules the grid is
/// refined geometrically just above the keep/kill boundary, where the
/// supremum of the keep branch sits.
WorstCase worst_case_numerical(AmseRule rule, int rank, const EffectiveParams& params,
                               const SupGrid& grid = {});

/// CSV with header x,amse_shrinker,amse_threshold,amse_tsvd.
std::string risk_curve_csv(std::span<const double> x, const EffectiveParams& params);

}  // namespace svshrink
