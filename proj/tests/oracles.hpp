#pragma once

// Test-only reference formulas, written independently of the library code
// paths they check: literal transcriptions, brute-force loops and plain
// quadrature.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

// Marchenko-Pastur density of the eigenvalues l of Z Z' (entries variance
// sigma^2/n), aspect ratio beta.
inline double mp_eigen_density(double l, double beta, double sigma) {
    const double s2 = sigma * sigma;
    const double lp = s2 * (1 + std::sqrt(beta)) * (1 + std::sqrt(beta));
    const double lm = s2 * (1 - std::sqrt(beta)) * (1 - std::sqrt(beta));
    if (l <= lm || l >= lp) return 0.0;
    return std::sqrt((lp - l) * (l - lm)) / (2 * std::numbers::pi * s2 * beta * l);
}

// Same law pushed to singular values s = sqrt(l).
inline double mp_singular_density(double s, double beta, double sigma) {
    return 2 * s * mp_eigen_density(s * s, beta, sigma);
}

// Composite Simpson on [a, b] with `intervals` (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int intervals) {
    const double h = (b - a) / intervals;
    double sum = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

// Integral of f over [a, b] after t = a + (b - a) sin^2(theta).
inline double simpson_sin2(const std::function<double(double)>& f, double a, double b,
                           int intervals) {
    auto g = [&](double th) {
        const double s = std::sin(th);
        const double c = std::cos(th);
        return f(a + (b - a) * s * s) * 2 * (b - a) * s * c;
    };
    return simpson(g, 0.0, std::numbers::pi / 2, intervals);
}

// Displacement map transcribed with x_bar / sigma_b written out.
inline double displace(double x, double mu_a, double sigma_b, double beta) {
    const double xb = mu_a * x;
    if (xb <= sigma_b * std::pow(beta, 0.25)) return sigma_b * (1 + std::sqrt(beta));
    return sigma_b * std::sqrt((xb / sigma_b + sigma_b / xb) * (xb / sigma_b + beta * sigma_b / xb));
}

// Per-component AMSE of the optimal shrinker, unsimplified.
inline double shrinker_amse(double x, double mu_a, double sigma_b, double beta) {
    const double t = mu_a * x / sigma_b;
    if (t < std::pow(beta, 0.25)) return x * x;
    const double t2 = t * t, t4 = t2 * t2;
    return x * x * (1 - (t4 - beta) * (t4 - beta) / ((t4 + beta * t2) * (t4 + t2)));
}

// Keep branch of the hard-threshold AMSE, unsimplified.
inline double threshold_keep(double x, double mu_a, double sigma_b, double beta) {
    const double xb = mu_a * x;
    const double r = sigma_b / mu_a;
    return r * r *
           ((xb / sigma_b + sigma_b / xb) * (xb / sigma_b + beta * sigma_b / xb) -
            (xb * xb / (sigma_b * sigma_b) - 2 * beta * sigma_b * sigma_b / (xb * xb)));
}

// Squared Frobenius distance by explicit double loop.
inline double frobenius2(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            const double d = a(i, j) - b(i, j);
            s += d * d;
        }
    }
    return s;
}

// Median of the singular-value MP law for sigma = 1, computed once with
// 30-digit quadrature of the eigenvalue density and a root finder.
inline constexpr double kMpMedianBeta1 = 0.80794550659903441864;
inline constexpr double kMpMedianBeta05 = 0.91129900778030234289;
inline constexpr double kMpMedianBeta025 = 0.95708101573827701215;
inline constexpr double kMpMedianBeta01 = 0.98314045151383246887;

}  // namespace oracle
