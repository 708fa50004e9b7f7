#pragma once

#include "svshrink/model.hpp"

namespace svshrink {

/// Marchenko-Pastur law of the singular values of an m x n noise matrix with
/// entries of variance sigma^2 / n, beta = m / n.
struct MpLaw {
    double beta = 1.0;
    double sigma = 1.0;

    double lower_edge() const;
    double upper_edge() const;
    void validate() const;
};

double mp_density(double t, const MpLaw& law);

/// P(s <= t), by adaptive Gauss-Kronrod quadrature on the sin^2 substitution
/// t = a + (b - a) sin^2(theta), which removes the square-root edge behavior.
double mp_cdf(double t, const MpLaw& law);

/// Median of the law, found by bisection on mp_cdf to 1e-9 absolute.
double mp_median(const MpLaw& law);

/// sigma_b (1 + sqrt(beta)); 0 for a noiseless model (see EffectiveParams::noiseless).
double bulk_edge(const EffectiveParams& params);

/// sigma_b beta^(1/4) / mu_a: the signal level at which a spike leaves the bulk.
double detection_level(const EffectiveParams& params);

/// Limit of the data singular value carrying a signal singular value x.
double displace(double x, const EffectiveParams& params);

/// Signal singular value x whose displaced value is y; 0 at or below the bulk edge.
double inverse_displace(double y, const EffectiveParams& params);

/// Limiting squared cosine between the true and empirical left singular vectors.
double cos2_left(double x, const EffectiveParams& params);
/// Same for the right singular vectors.
double cos2_right(double x, const EffectiveParams& params);

}  // namespace svshrink
