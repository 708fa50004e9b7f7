#include "svshrink/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace svshrink {

namespace {

constexpr std::pair<ModeKind, std::string_view> kKindNames[] = {
    {ModeKind::additive_noise, "additive_noise"},
    {ModeKind::multiplicative_noise, "multiplicative_noise"},
    {ModeKind::missing_at_random, "missing_at_random"},
    {ModeKind::outliers_at_random, "outliers_at_random"},
    {ModeKind::corruption_at_random, "corruption_at_random"},
    {ModeKind::composite, "composite"},
};

bool is_mask_term(ModeKind kind) {
    return kind == ModeKind::missing_at_random || kind == ModeKind::outliers_at_random ||
           kind == ModeKind::corruption_at_random;
}

// Flattened view of a (validated) mode.
struct Terms {
    bool additive = false;
    bool multiplicative = false;
    bool masked = false;
    ModeKind mask = ModeKind::composite;  // meaningful only when masked
};

Terms collect_terms(const ModeDescriptor& mode) {
    Terms t;
    for (ModeKind k : mode.terms()) {
        if (k == ModeKind::additive_noise) t.additive = true;
        if (k == ModeKind::multiplicative_noise) t.multiplicative = true;
        if (is_mask_term(k)) {
            t.masked = true;
            t.mask = k;
        }
    }
    return t;
}

struct FieldDraw {
    double a;
    double b;
};

// One draw of the (A, B) pair. `noise_scale` multiplies the Z and W draws
// (1/sqrt(n) for the spectral convention, 1 for raw moments).
class FieldSampler {
public:
    FieldSampler(const ModeDescriptor& mode, double noise_scale)
        : terms_(collect_terms(mode)),
          sigma_(mode.sigma),
          tau_(mode.tau),
          scale_(noise_scale),
          mask_(std::clamp(mode.kappa, 0.0, 1.0)) {}

    FieldDraw operator()(Rng& rng) {
        const bool clean = terms_.masked ? mask_(rng) : true;
        const double g = terms_.multiplicative ? 1.0 + sigma_ * normal_(rng) : 1.0;
        const double z = terms_.additive ? sigma_ * scale_ * normal_(rng) : 0.0;
        double w = 0.0;
        if (terms_.masked && terms_.mask != ModeKind::missing_at_random) {
            w = tau_ * scale_ * normal_(rng);
        }
        if (clean) return {g, z};
        switch (terms_.mask) {
            case ModeKind::missing_at_random:
                return {0.0, 0.0};
            case ModeKind::outliers_at_random:
                return {g, w};
            default:
                return {0.0, w};
        }
    }

private:
    Terms terms_;
    double sigma_;
    double tau_;
    double scale_;
    std::bernoulli_distribution mask_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

void require_level(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

std::string_view to_string(ModeKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    return "unknown";
}

ModeKind mode_kind_from_string(std::string_view name) {
    for (const auto& [k, n] : kKindNames) {
        if (n == name) return k;
    }
    throw std::invalid_argument("unknown contamination mode kind: " + std::string(name));
}

ModeDescriptor ModeDescriptor::additive(double sigma) {
    return {ModeKind::additive_noise, {}, sigma, 0.0, 1.0};
}

ModeDescriptor ModeDescriptor::multiplicative(double sigma) {
    return {ModeKind::multiplicative_noise, {}, sigma, 0.0, 1.0};
}

ModeDescriptor ModeDescriptor::missing(double kappa) {
    return {ModeKind::missing_at_random, {}, 0.0, 0.0, kappa};
}

ModeDescriptor ModeDescriptor::outliers(double kappa, double tau) {
    return {ModeKind::outliers_at_random, {}, 0.0, tau, kappa};
}

ModeDescriptor ModeDescriptor::corruption(double kappa, double tau) {
    return {ModeKind::corruption_at_random, {}, 0.0, tau, kappa};
}

ModeDescriptor ModeDescriptor::make_composite(std::vector<ModeKind> parts, double sigma,
                                              double tau, double kappa) {
    return {ModeKind::composite, std::move(parts), sigma, tau, kappa};
}

void ModeDescriptor::validate() const {
    require_level(std::isfinite(sigma) && sigma >= 0.0, "sigma must be finite and >= 0");
    require_level(std::isfinite(tau) && tau >= 0.0, "tau must be finite and >= 0");
    require_level(std::isfinite(kappa) && kappa >= 0.0 && kappa <= 1.0,
                  "kappa must lie in [0, 1]");
    if (kind != ModeKind::composite) {
        require_level(components.empty(), "primitive modes take no components");
        return;
    }
    require_level(!components.empty(), "composite mode needs at least one component");
    int masks = 0;
    for (std::size_t i = 0; i < components.size(); ++i) {
        require_level(components[i] != ModeKind::composite, "composite components must be primitive");
        for (std::size_t j = 0; j < i; ++j) {
            require_level(components[i] != components[j], "composite repeats a component kind");
        }
        if (is_mask_term(components[i])) ++masks;
    }
    require_level(masks <= 1,
                  "composite may hold at most one of missing/outliers/corruption (one shared mask)");
}

std::vector<ModeKind> ModeDescriptor::terms() const {
    if (kind == ModeKind::composite) return components;
    return {kind};
}

void to_json(nlohmann::json& j, const ModeDescriptor& mode) {
    j = nlohmann::json{{"kind", to_string(mode.kind)},
                       {"sigma", mode.sigma},
                       {"tau", mode.tau},
                       {"kappa", mode.kappa}};
    nlohmann::json parts = nlohmann::json::array();
    for (ModeKind k : mode.components) parts.push_back(to_string(k));
    j["components"] = std::move(parts);
}

void from_json(const nlohmann::json& j, ModeDescriptor& mode) {
    if (!j.is_object()) throw std::invalid_argument("mode must be a JSON object");
    mode = ModeDescriptor{};
    mode.kind = mode_kind_from_string(j.at("kind").get<std::string>());
    mode.sigma = j.value("sigma", 0.0);
    mode.tau = j.value("tau", 0.0);
    mode.kappa = j.value("kappa", 1.0);
    if (j.contains("components")) {
        for (const auto& part : j.at("components")) {
            mode.components.push_back(mode_kind_from_string(part.get<std::string>()));
        }
    }
    mode.validate();
}

double EffectiveParams::sigma_b() const { return std::sqrt(sigma_b2); }

void EffectiveParams::validate() const {
    if (!(std::isfinite(mu_a) && mu_a != 0.0)) {
        throw std::invalid_argument("signal annihilated: mu_a must be nonzero");
    }
    require_level(std::isfinite(sigma_b2) && sigma_b2 >= 0.0, "sigma_b2 must be >= 0");
    require_level(beta > 0.0 && beta <= 1.0, "beta must lie in (0, 1]");
}

EffectiveParams compile_mode(const ModeDescriptor& mode, double beta) {
    mode.validate();
    require_level(beta > 0.0 && beta <= 1.0, "beta must lie in (0, 1]");
    const Terms t = collect_terms(mode);
    const double k = mode.kappa;
    const double g_var = t.multiplicative ? mode.sigma * mode.sigma : 0.0;
    const double z_var = t.additive ? mode.sigma * mode.sigma : 0.0;
    const double w_var = mode.tau * mode.tau;

    EffectiveParams p;
    p.beta = beta;
    if (!t.masked) {
        p.mu_a = 1.0;
        p.sigma_a2 = g_var;
        p.sigma_b2 = z_var;
    } else if (t.mask == ModeKind::outliers_at_random) {
        // A = G on every entry; B = M Z + (1 - M) W
        p.mu_a = 1.0;
        p.sigma_a2 = g_var;
        p.sigma_b2 = k * z_var + (1.0 - k) * w_var;
    } else {
        // A = M G; B = M Z (+ (1 - M) W for corruption)
        p.mu_a = k;
        p.sigma_a2 = k * (1.0 + g_var) - k * k;
        p.sigma_b2 = k * z_var;
        if (t.mask == ModeKind::corruption_at_random) p.sigma_b2 += (1.0 - k) * w_var;
    }
    if (p.mu_a == 0.0) {
        throw std::invalid_argument("signal annihilated: mode has mu_a = 0 (kappa = 0)");
    }
    return p;
}

Matrix contaminate(const Matrix& signal, const ModeDescriptor& mode, Rng& rng) {
    mode.validate();
    if (!signal.allFinite()) throw std::invalid_argument("signal matrix has non-finite entries");
    const auto n = std::max(signal.rows(), signal.cols());
    FieldSampler draw(mode, n > 0 ? 1.0 / std::sqrt(static_cast<double>(n)) : 1.0);
    Matrix out(signal.rows(), signal.cols());
    for (Eigen::Index j = 0; j < signal.cols(); ++j) {
        for (Eigen::Index i = 0; i < signal.rows(); ++i) {
            const auto [a, b] = draw(rng);
            out(i, j) = a * signal(i, j) + b;
        }
    }
    return out;
}

EffectiveParams empirical_params(const ModeDescriptor& mode, std::size_t trials, Rng& rng,
                                 double beta) {
    mode.validate();
    FieldSampler draw(mode, 1.0);
    double sum_a = 0.0, sum_a2 = 0.0, sum_b = 0.0, sum_b2 = 0.0;
    for (std::size_t i = 0; i < trials; ++i) {
        const auto [a, b] = draw(rng);
        sum_a += a;
        sum_a2 += a * a;
        sum_b += b;
        sum_b2 += b * b;
    }
    const double count = static_cast<double>(trials);
    const double mean_a = sum_a / count;
    const double mean_b = sum_b / count;
    EffectiveParams p;
    p.beta = beta;
    p.mu_a = mean_a;
    p.sigma_a2 = std::max(0.0, sum_a2 / count - mean_a * mean_a);
    p.sigma_b2 = std::max(0.0, sum_b2 / count - mean_b * mean_b);
    return p;
}

}  // namespace svshrink
