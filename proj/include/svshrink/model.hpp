#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace svshrink {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Rng = std::mt19937_64;

enum class ModeKind {
    additive_noise,
    multiplicative_noise,
    missing_at_random,
    outliers_at_random,
    corruption_at_random,
    composite,
};

std::string_view to_string(ModeKind kind);
ModeKind mode_kind_from_string(std::string_view name);

/// Declarative contamination mode.
///
/// Levels are shared by every term of a composite: `sigma` drives additive and
/// multiplicative noise, `tau` drives outliers and corruption, and `kappa` is
/// the probability that an entry is clean. At most one mask-based term
/// (missing, outliers, corruption) may appear in a composite, so all terms see
/// the same Bernoulli(kappa) mask.
///
/// The generative rule for an entry is
///
///     Y = M (G X + Z) + (1 - M) R
///
/// with G = 1 + sigma*xi for multiplicative noise (else 1), Z ~ N(0, sigma^2/n)
/// for additive noise (else 0), and R = 0 (missing), G X + W (outliers) or W
/// (corruption), W ~ N(0, tau^2/n). Without a mask term M is identically 1.
struct ModeDescriptor {
    ModeKind kind = ModeKind::additive_noise;
    std::vector<ModeKind> components;
    double sigma = 0.0;
    double tau = 0.0;
    double kappa = 1.0;

    static ModeDescriptor additive(double sigma);
    static ModeDescriptor multiplicative(double sigma);
    static ModeDescriptor missing(double kappa);
    static ModeDescriptor outliers(double kappa, double tau);
    static ModeDescriptor corruption(double kappa, double tau);
    static ModeDescriptor make_composite(std::vector<ModeKind> parts, double sigma, double tau,
                                         double kappa);

    /// Throws std::invalid_argument when levels or composition are invalid.
    void validate() const;

    /// Primitive terms in play; a primitive mode yields itself.
    std::vector<ModeKind> terms() const;

    bool operator==(const ModeDescriptor&) const = default;
};

void to_json(nlohmann::json& j, const ModeDescriptor& mode);
void from_json(const nlohmann::json& j, ModeDescriptor& mode);

/// Asymptotic parameters consumed by every downstream formula.
///
/// sigma_b2 is in spectral units: entries of B have standard deviation
/// sqrt(sigma_b2 / n), which puts the noise bulk edge at sigma_b (1 + sqrt(beta))
/// for every n.
struct EffectiveParams {
    double mu_a = 1.0;
    double sigma_a2 = 0.0;  // diagnostic only
    double sigma_b2 = 0.0;
    double beta = 1.0;

    double sigma_b() const;
    bool noiseless() const { return sigma_b2 == 0.0; }

    /// Checks mu_a != 0, sigma_b2 >= 0 and beta in (0, 1].
    void validate() const;
};

EffectiveParams compile_mode(const ModeDescriptor& mode, double beta);

/// Draws Y from X under the mode. The spectral scale uses n = max(rows, cols).
Matrix contaminate(const Matrix& signal, const ModeDescriptor& mode, Rng& rng);

/// Monte Carlo moments of the A and B fields, sampled directly (no signal).
/// sigma_b2 is reported in spectral units (n = 1 scaling).
EffectiveParams empirical_params(const ModeDescriptor& mode, std::size_t trials, Rng& rng,
                                 double beta = 1.0);

}  // namespace svshrink
