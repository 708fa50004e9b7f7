#pragma once

#include "svshrink/model.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace svshrink {

/// Rank-r signal of size m x n (r <= m <= n) with strictly decreasing singular
/// values x and Haar-distributed singular frames.
struct SignalSpec {
    Eigen::Index m = 0;
    Eigen::Index n = 0;
    std::vector<double> x;

    void validate() const;
};

struct Signal {
    Matrix matrix;
    Matrix left;   // m x r
    Vector values;
    Matrix right;  // n x r
};

/// Haar frames by QR of Gaussian blocks; each column is sign-fixed so its first
/// nonzero entry is positive.
Signal make_signal(const SignalSpec& spec, Rng& rng);

/// Per-trial seed: splitmix64 of (master + (index + 1) * 0x9E3779B97F4A7C15).
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index);

/// Runs body(i) for i in [0, count) on `workers` threads (0 = hardware
/// concurrency). The first exception thrown by any trial is rethrown.
void run_trials(std::size_t count, std::size_t workers,
                const std::function<void(std::size_t)>& body);

double empirical_mse(const Matrix& truth, const Matrix& estimate);

struct RunConfig {
    std::uint64_t master_seed = 12345;
    std::size_t trials = 20;
    std::size_t workers = 0;
};

struct ExperimentRecord {
    std::uint64_t seed = 0;
    ModeDescriptor mode;
    SignalSpec spec;
    std::vector<double> top_singular_values;  // leading r + 1
    std::vector<double> cos2_left;            // |<u~_i, u_i>|^2, i < r
    std::vector<double> cos2_right;
    double mse_shrinker = 0.0;
    double mse_threshold = 0.0;
    double mse_tsvd = 0.0;  // keeps the top r components
    double mse_zero = 0.0;
    // Asymptotic predictions for the same setup.
    std::vector<double> predicted_y;
    std::vector<double> predicted_cos2_left;
    std::vector<double> predicted_cos2_right;
    double predicted_mse_shrinker = 0.0;
    double predicted_mse_threshold = 0.0;
};

/// Contaminate, decompose and score every rule, one record per trial.
std::vector<ExperimentRecord> run_displacement_check(const SignalSpec& spec,
                                                     const ModeDescriptor& mode,
                                                     const RunConfig& run);

/// Columns: seed,x,kappa,y1,cos2_left,cos2_right,mse_shrinker,mse_threshold,mse_tsvd,mse_zero
/// (x, y1 and the cosines refer to the leading component).
std::string records_csv(const std::vector<ExperimentRecord>& records);

// Detectable-count sweep over kappa for additive noise plus missing-at-random.
struct CriticalSweepConfig {
    std::vector<double> x{6.0, 5.0, 4.0, 3.0, 2.0};
    double sigma = 1.0;
    Eigen::Index m = 1000;
    Eigen::Index n = 1000;
    std::vector<double> kappas;  // empty -> 0.01, 0.02, ..., 1.00
    std::size_t seeds_per_kappa = 3;
    std::uint64_t master_seed = 12345;
    std::size_t workers = 0;

    std::vector<double> kappa_grid() const;
};

struct SweepPoint {
    double kappa = 0.0;
    std::vector<std::uint64_t> seeds;
    std::vector<int> counts;
    int median_count = 0;
    int predicted_count = 0;
};

struct CriticalSweepResult {
    std::vector<SweepPoint> points;
    std::vector<double> predicted_cutoffs;  // kappa_i = (sigma c / x_i)^2, x descending
    std::vector<double> empirical_cutoffs;  // NaN when the count never settles
};

CriticalSweepResult run_critical_sweep(const CriticalSweepConfig& config);

/// Columns: kappa,seed,count,predicted_count
std::string sweep_csv(const CriticalSweepResult& result);

struct PhasePlaneConfig {
    std::vector<double> x;       // empty -> 0.25, 0.5, ..., 6
    std::vector<double> kappas;  // empty -> 0.05, 0.10, ..., 1
    std::size_t monte = 5;
    Eigen::Index m = 600;
    Eigen::Index n = 600;
    double sigma = 1.0;
    std::uint64_t master_seed = 12345;
    std::size_t workers = 0;

    std::vector<double> x_grid() const;
    std::vector<double> kappa_grid() const;
};

struct PhaseCell {
    double x = 0.0;
    double kappa = 0.0;
    double frac_shrinker = 0.0;   // share of trials with y1 above the bulk edge
    double frac_threshold = 0.0;  // share of trials with y1 above lambda*
    double crit_shrinker = 0.0;
    double crit_threshold = 0.0;
};

std::vector<PhaseCell> run_phase_plane(const PhasePlaneConfig& config);

/// Columns: x,kappa,frac_shrinker,frac_threshold,crit_shrinker,crit_threshold
std::string phase_plane_csv(const std::vector<PhaseCell>& cells);

struct BruteShrinkerConfig {
    Eigen::Index m = 250;
    Eigen::Index n = 250;
    double sigma = 1.0;
    double kappa = 0.7;
    std::vector<double> x;  // empty -> 0, 0.25, ..., 6
    std::size_t seeds_per_x = 20;
    double eta_max = 8.0;
    double eta_step = 1e-3;
    std::uint64_t master_seed = 12345;
    std::size_t workers = 0;

    std::vector<double> x_grid() const;
};

struct BrutePoint {
    double x = 0.0;
    double y1 = 0.0;        // mean leading data singular value
    double eta_hat = 0.0;   // grid minimizer of the seed-averaged squared error
    double eta_star = 0.0;  // optimal_shrinker(y1)
};

/// For each x, scans eta on [0, eta_max] and keeps the value minimizing the
/// mean over seeds of ||eta u1 v1' - X||_F^2.
std::vector<BrutePoint> brute_force_shrinker(const BruteShrinkerConfig& config);

/// Columns: x,y1,eta_hat,eta_star
std::string brute_csv(const std::vector<BrutePoint>& points);

void from_json(const nlohmann::json& j, CriticalSweepConfig& config);
void from_json(const nlohmann::json& j, PhasePlaneConfig& config);
void from_json(const nlohmann::json& j, BruteShrinkerConfig& config);
void to_json(nlohmann::json& j, const CriticalSweepConfig& config);
void to_json(nlohmann::json& j, const PhasePlaneConfig& config);
void to_json(nlohmann::json& j, const BruteShrinkerConfig& config);

}  // namespace svshrink
