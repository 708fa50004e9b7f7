#pragma once

#include "svshrink/model.hpp"
#include "svshrink/svd.hpp"

namespace svshrink {

/// eta*(y) = sigma_b^2 / (y mu_a) sqrt(((y / sigma_b)^2 - beta - 1)^2 - 4 beta) above
/// the bulk edge, 0 below. The 1/mu_a rescaling is part of the value. A
/// noiseless model passes y / mu_a through.
double optimal_shrinker(double y, const EffectiveParams& params);

/// c(beta) = sqrt(1 + beta + sqrt(1 + 14 beta + beta^2)) / sqrt(2), the ratio
/// mu_a x / sigma_b at which keeping and killing a component cost the same.
double crossover_ratio(double beta);

/// lambda* = sigma_b sqrt((c + 1/c)(c + beta/c)); 0 for a noiseless model.
double optimal_threshold(const EffectiveParams& params);

enum class RuleKind { optimal_shrinker, hard_threshold, tsvd, zero };

struct ShrinkageRule {
    RuleKind kind = RuleKind::zero;
    double lambda = 0.0;
    Eigen::Index rank = 0;
    EffectiveParams params;

    static ShrinkageRule optimal(const EffectiveParams& params);
    /// Throws if lambda is below the bulk edge.
    static ShrinkageRule hard_threshold(double lambda, const EffectiveParams& params);
    static ShrinkageRule optimal_hard_threshold(const EffectiveParams& params);
    static ShrinkageRule truncated(Eigen::Index rank, const EffectiveParams& params);
    static ShrinkageRule zero(const EffectiveParams& params);

    /// Coefficient of the index-th (0-based, descending) component, already
    /// divided by mu_a.
    double coefficient(double y, Eigen::Index index) const;
};

struct ShrinkOutput {
    Matrix estimate;
    Vector singular_values;  // data spectrum, descending
    Vector coefficients;     // rule output per singular value
    Eigen::Index kept_rank = 0;
};

/// X_hat = sum_i eta(y_i) u_i v_i'. Tall inputs are transposed internally.
ShrinkOutput shrink_matrix(const Matrix& y, const ShrinkageRule& rule);

Matrix apply_rule(const Matrix& y, const ShrinkageRule& rule);

}  // namespace svshrink
