#include "svshrink/spectrum.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace svshrink {

namespace {

constexpr double kQuadTolerance = 1e-12;

// Density pulled back to theta, where t = a + (b - a) sin^2(theta). The
// radicand factors as (t - a)(b - t)(t + a)(b + t), and the first two factors
// combine with dt/dtheta into a smooth expression.
double mp_theta_integrand(double theta, const MpLaw& law) {
    const double a = law.lower_edge();
    const double b = law.upper_edge();
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    const double t = a + (b - a) * s * s;
    if (t <= 0.0) return 0.0;
    const double width = (b - a) * s * c;
    const double outer = std::sqrt((t + a) * (b + t));
    return 2.0 * width * width * outer /
           (std::numbers::pi * law.sigma * law.sigma * law.beta * t);
}

double integrate_theta(double theta_hi, const MpLaw& law) {
    using boost::math::quadrature::gauss_kronrod;
    auto f = [&law](double theta) { return mp_theta_integrand(theta, law); };
    return gauss_kronrod<double, 61>::integrate(f, 0.0, theta_hi, 15, kQuadTolerance);
}

double clamp_radicand(double v) { return v < 0.0 ? 0.0 : v; }

}  // namespace

double MpLaw::lower_edge() const { return sigma * (1.0 - std::sqrt(beta)); }
double MpLaw::upper_edge() const { return sigma * (1.0 + std::sqrt(beta)); }

void MpLaw::validate() const {
    if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in (0, 1]");
    if (!(sigma > 0.0 && std::isfinite(sigma))) throw std::invalid_argument("sigma must be > 0");
}

double mp_density(double t, const MpLaw& law) {
    law.validate();
    if (t <= 0.0 || t <= law.lower_edge() || t >= law.upper_edge()) return 0.0;
    const double s2 = law.sigma * law.sigma;
    const double centered = t * t - s2 - s2 * law.beta;
    const double radicand = clamp_radicand(4.0 * s2 * s2 * law.beta - centered * centered);
    return std::sqrt(radicand) / (std::numbers::pi * s2 * law.beta * t);
}

double mp_cdf(double t, const MpLaw& law) {
    law.validate();
    const double a = law.lower_edge();
    const double b = law.upper_edge();
    if (t <= a) return 0.0;
    if (t >= b) return 1.0;
    const double theta = std::asin(std::sqrt((t - a) / (b - a)));
    return integrate_theta(theta, law);
}

double mp_median(const MpLaw& law) {
    law.validate();
    double lo = law.lower_edge();
    double hi = law.upper_edge();
    // Bisect in theta: the cdf is smooth there and the bracket is scale free.
    double th_lo = 0.0;
    double th_hi = std::numbers::pi / 2.0;
    for (int it = 0; it < 200 && (hi - lo) > 1e-13 * law.sigma; ++it) {
        const double mid = 0.5 * (th_lo + th_hi);
        if (integrate_theta(mid, law) < 0.5) {
            th_lo = mid;
        } else {
            th_hi = mid;
        }
        const double a = law.lower_edge();
        const double w = law.upper_edge() - a;
        lo = a + w * std::sin(th_lo) * std::sin(th_lo);
        hi = a + w * std::sin(th_hi) * std::sin(th_hi);
    }
    return 0.5 * (lo + hi);
}

double bulk_edge(const EffectiveParams& params) {
    return params.sigma_b() * (1.0 + std::sqrt(params.beta));
}

double detection_level(const EffectiveParams& params) {
    return params.sigma_b() * std::pow(params.beta, 0.25) / std::abs(params.mu_a);
}

double displace(double x, const EffectiveParams& params) {
    const double xbar = std::abs(params.mu_a) * x;
    if (params.noiseless()) return xbar;
    const double sb = params.sigma_b();
    const double t = xbar / sb;
    if (t * t * t * t <= params.beta) return bulk_edge(params);
    return sb * std::sqrt((t + 1.0 / t) * (t + params.beta / t));
}

double inverse_displace(double y, const EffectiveParams& params) {
    if (params.noiseless()) return y / std::abs(params.mu_a);
    if (y <= bulk_edge(params)) return 0.0;
    const double sb = params.sigma_b();
    const double beta = params.beta;
    const double u = (y / sb) * (y / sb);
    const double gap = 1.0 + beta - u;
    const double inner = clamp_radicand(gap * gap - 4.0 * beta);
    const double outer = clamp_radicand(u - beta - 1.0 + std::sqrt(inner));
    return sb / (std::numbers::sqrt2 * std::abs(params.mu_a)) * std::sqrt(outer);
}

double cos2_left(double x, const EffectiveParams& params) {
    if (params.noiseless()) return 1.0;
    const double t = std::abs(params.mu_a) * x / params.sigma_b();
    const double t2 = t * t;
    const double t4 = t2 * t2;
    if (t4 <= params.beta) return 0.0;
    return (t4 - params.beta) / (t4 + params.beta * t2);
}

double cos2_right(double x, const EffectiveParams& params) {
    if (params.noiseless()) return 1.0;
    const double t = std::abs(params.mu_a) * x / params.sigma_b();
    const double t2 = t * t;
    const double t4 = t2 * t2;
    if (t4 <= params.beta) return 0.0;
    return (t4 - params.beta) / (t4 + t2);
}

}  // namespace svshrink
