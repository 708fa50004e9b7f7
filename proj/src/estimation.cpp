#include "svshrink/estimation.hpp"

#include "svshrink/spectrum.hpp"
#include "svshrink/svd.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <vector>

namespace svshrink {

namespace {

double lower_median_descending(const Vector& values) {
    std::vector<double> sorted(values.data(), values.data() + values.size());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const std::size_t m = sorted.size();
    return sorted[(m + 1) / 2 - 1];
}

}  // namespace

void to_json(nlohmann::json& j, const EstimationReport& report) {
    j = nlohmann::json{{"sigma_b_hat", report.sigma_b_hat},
                       {"method", report.method},
                       {"inputs",
                        {{"n", report.n},
                         {"m", report.m},
                         {"median_singular_value", report.median_singular_value}}}};
    if (report.mu_a_hat) {
        j["mu_a_hat"] = *report.mu_a_hat;
    } else {
        j["mu_a_hat"] = nullptr;
    }
}

double estimate_sigma_b(const Vector& singular_values, Eigen::Index n, double beta) {
    (void)n;
    if (singular_values.size() < 3) {
        throw std::invalid_argument("median matching needs at least 3 singular values");
    }
    if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in (0, 1]");
    if (singular_values.cwiseAbs().maxCoeff() == 0.0) throw std::invalid_argument("no spectrum");
    return lower_median_descending(singular_values) / mp_median(MpLaw{beta, 1.0});
}

double estimate_mu_a_missing(const Matrix& y) {
    if (y.size() == 0) return 0.0;
    const auto nonzero = (y.array() != 0.0).count();
    return static_cast<double>(nonzero) / static_cast<double>(y.size());
}

EstimationReport estimate_parameters(const Matrix& y, bool mask_family) {
    EstimationReport report;
    report.m = std::min(y.rows(), y.cols());
    report.n = std::max(y.rows(), y.cols());
    const double beta = static_cast<double>(report.m) / static_cast<double>(report.n);
    const Vector s = singular_values(y);
    report.sigma_b_hat = estimate_sigma_b(s, report.n, beta);
    report.median_singular_value = lower_median_descending(s);
    report.method = "median_matching";
    if (mask_family) {
        report.mu_a_hat = estimate_mu_a_missing(y);
        report.method += "+missing_fraction";
    }
    return report;
}

}  // namespace svshrink
