#include "svshrink/shrink.hpp"

#include "svshrink/spectrum.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace svshrink {

double optimal_shrinker(double y, const EffectiveParams& params) {
    if (params.noiseless()) return y / params.mu_a;
    if (y < bulk_edge(params)) return 0.0;
    const double sb = params.sigma_b();
    const double u = (y / sb) * (y / sb) - params.beta - 1.0;
    const double radicand = u * u - 4.0 * params.beta;
    if (radicand <= 0.0) return 0.0;
    return sb * sb / (y * params.mu_a) * std::sqrt(radicand);
}

double crossover_ratio(double beta) {
    return std::sqrt(1.0 + beta + std::sqrt(1.0 + 14.0 * beta + beta * beta)) / std::sqrt(2.0);
}

double optimal_threshold(const EffectiveParams& params) {
    if (params.noiseless()) return 0.0;
    const double c = crossover_ratio(params.beta);
    return params.sigma_b() * std::sqrt((c + 1.0 / c) * (c + params.beta / c));
}

ShrinkageRule ShrinkageRule::optimal(const EffectiveParams& params) {
    params.validate();
    return {RuleKind::optimal_shrinker, 0.0, 0, params};
}

ShrinkageRule ShrinkageRule::hard_threshold(double lambda, const EffectiveParams& params) {
    params.validate();
    if (!(lambda >= bulk_edge(params))) {
        throw std::invalid_argument("hard threshold below the bulk edge");
    }
    return {RuleKind::hard_threshold, lambda, 0, params};
}

ShrinkageRule ShrinkageRule::optimal_hard_threshold(const EffectiveParams& params) {
    return hard_threshold(optimal_threshold(params), params);
}

ShrinkageRule ShrinkageRule::truncated(Eigen::Index rank, const EffectiveParams& params) {
    params.validate();
    if (rank < 0) throw std::invalid_argument("tsvd rank must be >= 0");
    return {RuleKind::tsvd, 0.0, rank, params};
}

ShrinkageRule ShrinkageRule::zero(const EffectiveParams& params) {
    return {RuleKind::zero, 0.0, 0, params};
}

double ShrinkageRule::coefficient(double y, Eigen::Index index) const {
    switch (kind) {
        case RuleKind::optimal_shrinker:
            return optimal_shrinker(y, params);
        case RuleKind::hard_threshold:
            return y > lambda ? y / params.mu_a : 0.0;
        case RuleKind::tsvd:
            return index < rank ? y / params.mu_a : 0.0;
        case RuleKind::zero:
            return 0.0;
    }
    return 0.0;
}

ShrinkOutput shrink_matrix(const Matrix& y, const ShrinkageRule& rule) {
    if (!y.allFinite()) throw std::invalid_argument("data matrix has non-finite entries");
    if (y.rows() > y.cols()) {
        ShrinkOutput out = shrink_matrix(y.transpose(), rule);
        out.estimate.transposeInPlace();
        return out;
    }
    ShrinkOutput out;
    if (rule.kind == RuleKind::zero) {
        out.estimate = Matrix::Zero(y.rows(), y.cols());
        out.singular_values = singular_values(y);
        out.coefficients = Vector::Zero(out.singular_values.size());
        return out;
    }
    const SvdFactorization f = svd(y);
    out.singular_values = f.singular_values;
    out.coefficients.resize(f.singular_values.size());
    std::vector<Eigen::Index> kept;
    for (Eigen::Index i = 0; i < f.singular_values.size(); ++i) {
        out.coefficients(i) = rule.coefficient(f.singular_values(i), i);
        if (out.coefficients(i) != 0.0) kept.push_back(i);
    }
    out.kept_rank = static_cast<Eigen::Index>(kept.size());
    Matrix scaled_left(y.rows(), out.kept_rank);
    Matrix right(y.cols(), out.kept_rank);
    for (Eigen::Index j = 0; j < out.kept_rank; ++j) {
        scaled_left.col(j) = f.left_vectors.col(kept[j]) * out.coefficients(kept[j]);
        right.col(j) = f.right_vectors.col(kept[j]);
    }
    out.estimate.noalias() = scaled_left * right.transpose();
    return out;
}

Matrix apply_rule(const Matrix& y, const ShrinkageRule& rule) {
    return shrink_matrix(y, rule).estimate;
}

}  // namespace svshrink
