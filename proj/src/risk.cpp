#include "svshrink/risk.hpp"

#include "svshrink/shrink.hpp"
#include "svshrink/spectrum.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace svshrink {

namespace {

void require_noisy(const EffectiveParams& params) {
    params.validate();
    if (params.noiseless()) throw std::invalid_argument("risk formulas need sigma_b > 0");
}

double signal_ratio(double x, const EffectiveParams& params) {
    return params.mu_a * x / params.sigma_b();
}

double threshold_for(AmseRule rule, const EffectiveParams& params) {
    return rule == AmseRule::optimal_threshold ? optimal_threshold(params) : bulk_edge(params);
}

void check_decreasing(std::span<const double> x) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !std::isfinite(x[i])) {
            throw std::invalid_argument("signal values must be positive and finite");
        }
        if (i > 0 && !(x[i] < x[i - 1])) {
            throw std::invalid_argument("signal values must be strictly decreasing");
        }
    }
}

template <typename PerValue>
RiskProfile build_profile(std::span<const double> x, const EffectiveParams& params,
                          PerValue per_value) {
    check_decreasing(x);
    RiskProfile profile;
    for (double xi : x) {
        const double l1 = per_value(xi);
        profile.per_value.emplace_back(xi, l1);
        profile.total += l1;
        profile.detectable.push_back(xi > detection_level(params));
    }
    return profile;
}

}  // namespace

std::string_view to_string(AmseRule rule) {
    switch (rule) {
        case AmseRule::optimal_shrinker:
            return "optimal_shrinker";
        case AmseRule::optimal_threshold:
            return "optimal_threshold";
        case AmseRule::tsvd:
            return "tsvd";
        case AmseRule::zero:
            return "zero";
    }
    return "unknown";
}

double shrinker_amse(double x, const EffectiveParams& params) {
    require_noisy(params);
    const double t = signal_ratio(x, params);
    const double beta = params.beta;
    const double t2 = t * t;
    const double t4 = t2 * t2;
    if (t4 < beta) return x * x;
    // 1 - (t^4 - b)^2 / ((t^4 + b t^2)(t^4 + t^2)) with the numerator expanded,
    // which avoids cancellation for large t.
    const double numer = (1.0 + beta) * t4 * t2 + 3.0 * beta * t4 - beta * beta;
    const double denom = (t4 + beta * t2) * (t4 + t2);
    return x * x * numer / denom;
}

double threshold_amse(double x, double lambda, const EffectiveParams& params) {
    require_noisy(params);
    if (!(lambda >= bulk_edge(params))) {
        throw std::invalid_argument(
            "threshold below the bulk edge sigma_b (1 + sqrt(beta)) is not covered");
    }
    if (!(displace(x, params) > lambda)) return x * x;
    const double t = signal_ratio(x, params);
    const double scale = params.sigma_b() / params.mu_a;
    // (t + 1/t)(t + b/t) - (t^2 - 2b/t^2) = 1 + b + 3b/t^2
    return scale * scale * (1.0 + params.beta + 3.0 * params.beta / (t * t));
}

double rule_amse(double x, AmseRule rule, const EffectiveParams& params) {
    switch (rule) {
        case AmseRule::optimal_shrinker:
            return shrinker_amse(x, params);
        case AmseRule::optimal_threshold:
        case AmseRule::tsvd:
            return threshold_amse(x, threshold_for(rule, params), params);
        case AmseRule::zero:
            return x * x;
    }
    return x * x;
}

void to_json(nlohmann::json& j, const RiskProfile& profile) {
    nlohmann::json values = nlohmann::json::array();
    for (std::size_t i = 0; i < profile.per_value.size(); ++i) {
        values.push_back({{"x", profile.per_value[i].first},
                          {"amse", profile.per_value[i].second},
                          {"detectable", static_cast<bool>(profile.detectable[i])}});
    }
    j = nlohmann::json{{"per_value", values}, {"total", profile.total}};
}

RiskProfile total_amse(std::span<const double> x, AmseRule rule, const EffectiveParams& params) {
    return build_profile(x, params, [&](double xi) { return rule_amse(xi, rule, params); });
}

RiskProfile total_amse_threshold(std::span<const double> x, double lambda,
                                 const EffectiveParams& params) {
    return build_profile(x, params,
                         [&](double xi) { return threshold_amse(xi, lambda, params); });
}

double critical_level(AmseRule rule, const EffectiveParams& params) {
    require_noisy(params);
    const double scale = params.sigma_b() / params.mu_a;
    switch (rule) {
        case AmseRule::optimal_shrinker:
            return scale * std::pow(params.beta, 0.25);
        case AmseRule::optimal_threshold:
            return scale * crossover_ratio(params.beta);
        default:
            throw std::invalid_argument("critical level defined for optimal_shrinker and "
                                        "optimal_threshold only");
    }
}

double worst_case_mse(AmseRule rule, int rank, const EffectiveParams& params) {
    require_noisy(params);
    if (params.beta != 1.0) {
        throw std::invalid_argument("closed-form worst case holds for beta = 1 only");
    }
    if (rank < 1) throw std::invalid_argument("rank must be >= 1");
    const double scale = params.sigma_b() / params.mu_a;
    double constant = 0.0;
    switch (rule) {
        case AmseRule::tsvd:
            constant = 5.0;
            break;
        case AmseRule::optimal_shrinker:
            constant = 2.0;
            break;
        case AmseRule::optimal_threshold:
            constant = 3.0;
            break;
        case AmseRule::zero:
            throw std::invalid_argument("the zero rule has unbounded worst case");
    }
    return constant * rank * scale * scale;
}

WorstCase worst_case_numerical(AmseRule rule, int rank, const EffectiveParams& params,
                               const SupGrid& grid) {
    require_noisy(params);
    if (rank < 1) throw std::invalid_argument("rank must be >= 1");
    if (rule == AmseRule::zero) throw std::invalid_argument("the zero rule has no supremum");
    if (grid.points < 2 || !(grid.t_max > grid.t_min) || !(grid.t_min > 0.0)) {
        throw std::invalid_argument("bad sup grid");
    }
    const double x_per_t = params.sigma_b() / params.mu_a;
    WorstCase best;
    auto visit = [&](double t) {
        const double x = t * x_per_t;
        const double v = rule_amse(x, rule, params);
        if (v > best.value) {
            best.value = v;
            best.argmax_x = x;
        }
    };
    const double step = (grid.t_max - grid.t_min) / static_cast<double>(grid.points - 1);
    for (std::size_t i = 0; i < grid.points; ++i) visit(grid.t_min + step * static_cast<double>(i));
    if (rule != AmseRule::optimal_shrinker) {
        const double boundary_x = inverse_displace(threshold_for(rule, params), params);
        const double boundary_t =
            std::max(boundary_x / x_per_t, std::pow(params.beta, 0.25));
        visit(boundary_t);
        for (int k = 0; k <= 40; ++k) visit(boundary_t * (1.0 + std::pow(10.0, -k / 4.0)));
    }
    best.value *= rank;
    return best;
}

std::string risk_curve_csv(std::span<const double> x, const EffectiveParams& params) {
    require_noisy(params);
    std::string out = "x,amse_shrinker,amse_threshold,amse_tsvd\n";
    char line[160];
    for (double xi : x) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", xi,
                      shrinker_amse(xi, params), rule_amse(xi, AmseRule::optimal_threshold, params),
                      rule_amse(xi, AmseRule::tsvd, params));
        out += line;
    }
    return out;
}

}  // namespace svshrink
