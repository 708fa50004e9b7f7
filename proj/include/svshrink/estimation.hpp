#pragma once

#include "svshrink/model.hpp"

#include <optional>
#include <string>

namespace svshrink {

struct EstimationReport {
    double sigma_b_hat = 0.0;
    std::optional<double> mu_a_hat;
    std::string method;
    Eigen::Index n = 0;  // long side
    Eigen::Index m = 0;  // short side
    double median_singular_value = 0.0;
};

void to_json(nlohmann::json& j, const EstimationReport& report);

/// Median matching: sigma_b = y_med / mp_median(beta, 1). Under the spectral
/// convention the sqrt(n) of the per-entry formula cancels, so `n` only feeds
/// the report. The median of an even-length spectrum is the lower one (1-based
/// index ceil(m/2) in descending order).
double estimate_sigma_b(const Vector& singular_values, Eigen::Index n, double beta);

/// Fraction of nonzero entries; the mean of the mask for the missing family.
double estimate_mu_a_missing(const Matrix& y);

/// sigma_b always; mu_a only when `mask_family` says zeros mark missing entries.
EstimationReport estimate_parameters(const Matrix& y, bool mask_family);

}  // namespace svshrink
