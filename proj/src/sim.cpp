#include "svshrink/sim.hpp"

#include "svshrink/risk.hpp"
#include "svshrink/shrink.hpp"
#include "svshrink/spectrum.hpp"
#include "svshrink/svd.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace svshrink {

namespace {

Matrix haar_frame(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix g(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = normal(rng);
    }
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            if (q(i, j) != 0.0) {
                if (q(i, j) < 0.0) q.col(j) *= -1.0;
                break;
            }
        }
    }
    return q;
}

std::vector<double> regular_grid(double first, double step, int count) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back(first + step * i);
    return out;
}

// Leading triplets covering every singular value above `floor` (plus at least
// `min_k`), growing k until the smallest retrieved value is at or below it.
SvdFactorization leading_above(const Matrix& y, Eigen::Index min_k, double floor) {
    const Eigen::Index full = std::min(y.rows(), y.cols());
    Eigen::Index k = std::min(full, min_k);
    for (;;) {
        SvdFactorization f = leading_triplets(y, k);
        if (k == full || f.singular_values(k - 1) <= floor) return f;
        k = std::min(full, 2 * k);
    }
}

Matrix estimate_from(const SvdFactorization& f, const ShrinkageRule& rule) {
    Matrix scaled = f.left_vectors;
    for (Eigen::Index i = 0; i < f.singular_values.size(); ++i) {
        scaled.col(i) *= rule.coefficient(f.singular_values(i), i);
    }
    return scaled * f.right_vectors.transpose();
}

int lower_median(std::vector<int> values) {
    std::sort(values.begin(), values.end());
    return values[(values.size() + 1) / 2 - 1];
}

ModeDescriptor additive_missing(double sigma, double kappa) {
    return ModeDescriptor::make_composite(
        {ModeKind::additive_noise, ModeKind::missing_at_random}, sigma, 0.0, kappa);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <typename T>
void read_optional(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void SignalSpec::validate() const {
    const auto r = static_cast<Eigen::Index>(x.size());
    if (r < 1 || r > m || m > n) throw std::invalid_argument("signal spec needs 1 <= r <= m <= n");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !std::isfinite(x[i]) || (i > 0 && !(x[i] < x[i - 1]))) {
            throw std::invalid_argument("signal values must be positive and strictly decreasing");
        }
    }
}

Signal make_signal(const SignalSpec& spec, Rng& rng) {
    spec.validate();
    const auto r = static_cast<Eigen::Index>(spec.x.size());
    Signal s;
    s.left = haar_frame(spec.m, r, rng);
    s.right = haar_frame(spec.n, r, rng);
    s.values = Eigen::Map<const Vector>(spec.x.data(), r);
    s.matrix.noalias() = s.left * s.values.asDiagonal() * s.right.transpose();
    return s;
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

void run_trials(std::size_t count, std::size_t workers,
                const std::function<void(std::size_t)>& body) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, std::max<std::size_t>(count, 1));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_lock);
                if (!failure) failure = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
}

double empirical_mse(const Matrix& truth, const Matrix& estimate) {
    if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols()) {
        throw std::invalid_argument("empirical_mse: shape mismatch");
    }
    return (estimate - truth).squaredNorm();
}

std::vector<ExperimentRecord> run_displacement_check(const SignalSpec& spec,
                                                     const ModeDescriptor& mode,
                                                     const RunConfig& run) {
    spec.validate();
    const double beta = static_cast<double>(spec.m) / static_cast<double>(spec.n);
    const EffectiveParams params = compile_mode(mode, beta);
    const auto r = static_cast<Eigen::Index>(spec.x.size());

    const auto shrinker = ShrinkageRule::optimal(params);
    const auto threshold = ShrinkageRule::optimal_hard_threshold(params);
    const auto truncated = ShrinkageRule::truncated(r, params);

    ExperimentRecord theory;
    for (double xi : spec.x) {
        theory.predicted_y.push_back(displace(xi, params));
        theory.predicted_cos2_left.push_back(cos2_left(xi, params));
        theory.predicted_cos2_right.push_back(cos2_right(xi, params));
        if (!params.noiseless()) {
            theory.predicted_mse_shrinker += shrinker_amse(xi, params);
            theory.predicted_mse_threshold += rule_amse(xi, AmseRule::optimal_threshold, params);
        }
    }

    std::vector<ExperimentRecord> records(run.trials);
    run_trials(run.trials, run.workers, [&](std::size_t i) {
        ExperimentRecord rec = theory;
        rec.seed = trial_seed(run.master_seed, i);
        rec.mode = mode;
        rec.spec = spec;
        Rng rng(rec.seed);
        const Signal signal = make_signal(spec, rng);
        const Matrix y = contaminate(signal.matrix, mode, rng);

        const double floor = params.noiseless() ? 0.0 : bulk_edge(params);
        const SvdFactorization f = leading_above(y, r + 1, floor);
        for (Eigen::Index k = 0; k < std::min<Eigen::Index>(r + 1, f.singular_values.size()); ++k) {
            rec.top_singular_values.push_back(f.singular_values(k));
        }
        for (Eigen::Index k = 0; k < r; ++k) {
            const double cl = signal.left.col(k).dot(f.left_vectors.col(k));
            const double cr = signal.right.col(k).dot(f.right_vectors.col(k));
            rec.cos2_left.push_back(cl * cl);
            rec.cos2_right.push_back(cr * cr);
        }
        rec.mse_shrinker = empirical_mse(signal.matrix, estimate_from(f, shrinker));
        rec.mse_threshold = empirical_mse(signal.matrix, estimate_from(f, threshold));
        rec.mse_tsvd = empirical_mse(signal.matrix, estimate_from(f, truncated));
        rec.mse_zero = signal.matrix.squaredNorm();
        records[i] = std::move(rec);
    });
    return records;
}

std::string records_csv(const std::vector<ExperimentRecord>& records) {
    std::string out =
        "seed,x,kappa,y1,cos2_left,cos2_right,mse_shrinker,mse_threshold,mse_tsvd,mse_zero\n";
    for (const auto& rec : records) {
        out += std::to_string(rec.seed) + ',' + fmt(rec.spec.x.front()) + ',' +
               fmt(rec.mode.kappa) + ',' + fmt(rec.top_singular_values.front()) + ',' +
               fmt(rec.cos2_left.front()) + ',' + fmt(rec.cos2_right.front()) + ',' +
               fmt(rec.mse_shrinker) + ',' + fmt(rec.mse_threshold) + ',' + fmt(rec.mse_tsvd) +
               ',' + fmt(rec.mse_zero) + '\n';
    }
    return out;
}

std::vector<double> CriticalSweepConfig::kappa_grid() const {
    return kappas.empty() ? regular_grid(0.01, 0.01, 100) : kappas;
}

CriticalSweepResult run_critical_sweep(const CriticalSweepConfig& config) {
    std::vector<double> x = config.x;
    std::sort(x.begin(), x.end(), std::greater<>());
    const SignalSpec spec{config.m, config.n, x};
    spec.validate();
    if (config.seeds_per_kappa == 0) throw std::invalid_argument("seeds_per_kappa must be >= 1");
    const double beta = static_cast<double>(config.m) / static_cast<double>(config.n);
    const std::vector<double> grid = config.kappa_grid();
    const std::size_t per = config.seeds_per_kappa;

    CriticalSweepResult result;
    const double c = crossover_ratio(beta);
    for (double xi : x) result.predicted_cutoffs.push_back(std::pow(config.sigma * c / xi, 2));

    result.points.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        SweepPoint& p = result.points[k];
        p.kappa = grid[k];
        p.seeds.resize(per);
        p.counts.resize(per);
        for (double cut : result.predicted_cutoffs) p.predicted_count += grid[k] > cut ? 1 : 0;
    }
    const auto r = static_cast<Eigen::Index>(x.size());
    run_trials(grid.size() * per, config.workers, [&](std::size_t trial) {
        const std::size_t k = trial / per;
        const std::size_t s = trial % per;
        const std::uint64_t seed = trial_seed(config.master_seed, trial);
        const ModeDescriptor mode = additive_missing(config.sigma, grid[k]);
        const EffectiveParams params = compile_mode(mode, beta);
        const double lambda = optimal_threshold(params);
        Rng rng(seed);
        const Signal signal = make_signal(spec, rng);
        const Matrix y = contaminate(signal.matrix, mode, rng);
        const SvdFactorization f = leading_above(y, r + 1, lambda);
        result.points[k].seeds[s] = seed;
        result.points[k].counts[s] = static_cast<int>((f.singular_values.array() > lambda).count());
    });
    for (SweepPoint& p : result.points) p.median_count = lower_median(p.counts);

    for (std::size_t i = 1; i <= x.size(); ++i) {
        double cutoff = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t k = result.points.size(); k-- > 0;) {
            if (result.points[k].median_count < static_cast<int>(i)) break;
            cutoff = result.points[k].kappa;
        }
        result.empirical_cutoffs.push_back(cutoff);
    }
    return result;
}

std::string sweep_csv(const CriticalSweepResult& result) {
    std::string out = "kappa,seed,count,predicted_count\n";
    for (const SweepPoint& p : result.points) {
        for (std::size_t s = 0; s < p.counts.size(); ++s) {
            out += fmt(p.kappa) + ',' + std::to_string(p.seeds[s]) + ',' +
                   std::to_string(p.counts[s]) + ',' + std::to_string(p.predicted_count) + '\n';
        }
    }
    return out;
}

std::vector<double> PhasePlaneConfig::x_grid() const {
    return x.empty() ? regular_grid(0.25, 0.25, 24) : x;
}

std::vector<double> PhasePlaneConfig::kappa_grid() const {
    return kappas.empty() ? regular_grid(0.05, 0.05, 20) : kappas;
}

std::vector<PhaseCell> run_phase_plane(const PhasePlaneConfig& config) {
    const std::vector<double> xs = config.x_grid();
    const std::vector<double> ks = config.kappa_grid();
    if (config.monte == 0) throw std::invalid_argument("monte must be >= 1");
    const double beta = static_cast<double>(config.m) / static_cast<double>(config.n);

    std::vector<PhaseCell> cells(xs.size() * ks.size());
    std::vector<int> above_edge(cells.size() * config.monte);
    std::vector<int> above_lambda(cells.size() * config.monte);
    run_trials(cells.size() * config.monte, config.workers, [&](std::size_t trial) {
        const std::size_t cell = trial / config.monte;
        const double x = xs[cell / ks.size()];
        const double kappa = ks[cell % ks.size()];
        const ModeDescriptor mode = additive_missing(config.sigma, kappa);
        const EffectiveParams params = compile_mode(mode, beta);
        Rng rng(trial_seed(config.master_seed, trial));
        const Signal signal = make_signal({config.m, config.n, {x}}, rng);
        const Matrix y = contaminate(signal.matrix, mode, rng);
        const double y1 = leading_triplets(y, 1).singular_values(0);
        above_edge[trial] = y1 > bulk_edge(params) ? 1 : 0;
        above_lambda[trial] = y1 > optimal_threshold(params) ? 1 : 0;
    });
    for (std::size_t cell = 0; cell < cells.size(); ++cell) {
        PhaseCell& pc = cells[cell];
        pc.x = xs[cell / ks.size()];
        pc.kappa = ks[cell % ks.size()];
        int edge_hits = 0;
        int lambda_hits = 0;
        for (std::size_t s = 0; s < config.monte; ++s) {
            edge_hits += above_edge[cell * config.monte + s];
            lambda_hits += above_lambda[cell * config.monte + s];
        }
        pc.frac_shrinker = static_cast<double>(edge_hits) / static_cast<double>(config.monte);
        pc.frac_threshold = static_cast<double>(lambda_hits) / static_cast<double>(config.monte);
        const EffectiveParams params = compile_mode(additive_missing(config.sigma, pc.kappa), beta);
        pc.crit_shrinker = detection_level(params);
        pc.crit_threshold = params.sigma_b() * crossover_ratio(beta) / params.mu_a;
    }
    return cells;
}

std::string phase_plane_csv(const std::vector<PhaseCell>& cells) {
    std::string out = "x,kappa,frac_shrinker,frac_threshold,crit_shrinker,crit_threshold\n";
    for (const PhaseCell& c : cells) {
        out += fmt(c.x) + ',' + fmt(c.kappa) + ',' + fmt(c.frac_shrinker) + ',' +
               fmt(c.frac_threshold) + ',' + fmt(c.crit_shrinker) + ',' + fmt(c.crit_threshold) +
               '\n';
    }
    return out;
}

std::vector<double> BruteShrinkerConfig::x_grid() const {
    return x.empty() ? regular_grid(0.0, 0.25, 25) : x;
}

std::vector<BrutePoint> brute_force_shrinker(const BruteShrinkerConfig& config) {
    const std::vector<double> xs = config.x_grid();
    if (config.seeds_per_x == 0) throw std::invalid_argument("seeds_per_x must be >= 1");
    if (!(config.eta_step > 0.0) || !(config.eta_max > 0.0)) {
        throw std::invalid_argument("eta grid must be positive");
    }
    if (config.m > config.n) throw std::invalid_argument("brute shrinker needs m <= n");
    const double beta = static_cast<double>(config.m) / static_cast<double>(config.n);
    const ModeDescriptor mode = additive_missing(config.sigma, config.kappa);
    const EffectiveParams params = compile_mode(mode, beta);

    const std::size_t per = config.seeds_per_x;
    std::vector<double> y1(xs.size() * per);
    std::vector<double> overlap(xs.size() * per);  // u1' X v1
    std::vector<double> energy(xs.size() * per);   // ||X||_F^2
    run_trials(xs.size() * per, config.workers, [&](std::size_t trial) {
        const double x = xs[trial / per];
        Rng rng(trial_seed(config.master_seed, trial));
        Matrix truth = Matrix::Zero(config.m, config.n);
        if (x > 0.0) truth = make_signal({config.m, config.n, {x}}, rng).matrix;
        const Matrix y = contaminate(truth, mode, rng);
        const SvdFactorization f = leading_triplets(y, 1);
        y1[trial] = f.singular_values(0);
        overlap[trial] = f.left_vectors.col(0).dot(truth * f.right_vectors.col(0));
        energy[trial] = truth.squaredNorm();
    });

    std::vector<BrutePoint> points;
    const auto steps = static_cast<std::size_t>(std::floor(config.eta_max / config.eta_step));
    for (std::size_t ix = 0; ix < xs.size(); ++ix) {
        double mean_y = 0.0, mean_overlap = 0.0, mean_energy = 0.0;
        for (std::size_t s = 0; s < per; ++s) {
            mean_y += y1[ix * per + s];
            mean_overlap += overlap[ix * per + s];
            mean_energy += energy[ix * per + s];
        }
        mean_y /= static_cast<double>(per);
        mean_overlap /= static_cast<double>(per);
        mean_energy /= static_cast<double>(per);

        // Seed-averaged ||eta u1 v1' - X||^2 = eta^2 - 2 eta <u1 v1', X> + ||X||^2.
        BrutePoint p{xs[ix], mean_y, 0.0, optimal_shrinker(mean_y, params)};
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k <= steps; ++k) {
            const double eta = config.eta_step * static_cast<double>(k);
            const double loss = eta * eta - 2.0 * eta * mean_overlap + mean_energy;
            if (loss < best) {
                best = loss;
                p.eta_hat = eta;
            }
        }
        points.push_back(p);
    }
    return points;
}

std::string brute_csv(const std::vector<BrutePoint>& points) {
    std::string out = "x,y1,eta_hat,eta_star\n";
    for (const BrutePoint& p : points) {
        out += fmt(p.x) + ',' + fmt(p.y1) + ',' + fmt(p.eta_hat) + ',' + fmt(p.eta_star) + '\n';
    }
    return out;
}

void from_json(const nlohmann::json& j, CriticalSweepConfig& c) {
    read_optional(j, "x", c.x);
    read_optional(j, "sigma", c.sigma);
    read_optional(j, "m", c.m);
    read_optional(j, "n", c.n);
    read_optional(j, "kappas", c.kappas);
    read_optional(j, "seeds_per_kappa", c.seeds_per_kappa);
    read_optional(j, "seed", c.master_seed);
    read_optional(j, "workers", c.workers);
}

void from_json(const nlohmann::json& j, PhasePlaneConfig& c) {
    read_optional(j, "x", c.x);
    read_optional(j, "kappas", c.kappas);
    read_optional(j, "monte", c.monte);
    read_optional(j, "m", c.m);
    read_optional(j, "n", c.n);
    read_optional(j, "sigma", c.sigma);
    read_optional(j, "seed", c.master_seed);
    read_optional(j, "workers", c.workers);
}

void from_json(const nlohmann::json& j, BruteShrinkerConfig& c) {
    read_optional(j, "m", c.m);
    read_optional(j, "n", c.n);
    read_optional(j, "sigma", c.sigma);
    read_optional(j, "kappa", c.kappa);
    read_optional(j, "x", c.x);
    read_optional(j, "seeds_per_x", c.seeds_per_x);
    read_optional(j, "eta_max", c.eta_max);
    read_optional(j, "eta_step", c.eta_step);
    read_optional(j, "seed", c.master_seed);
    read_optional(j, "workers", c.workers);
}

void to_json(nlohmann::json& j, const CriticalSweepConfig& c) {
    j = {{"x", c.x},         {"sigma", c.sigma}, {"m", c.m}, {"n", c.n},
         {"kappas", c.kappa_grid()}, {"seeds_per_kappa", c.seeds_per_kappa},
         {"seed", c.master_seed}};
}

void to_json(nlohmann::json& j, const PhasePlaneConfig& c) {
    j = {{"x", c.x_grid()}, {"kappas", c.kappa_grid()}, {"monte", c.monte}, {"m", c.m},
         {"n", c.n},        {"sigma", c.sigma},         {"seed", c.master_seed}};
}

void to_json(nlohmann::json& j, const BruteShrinkerConfig& c) {
    j = {{"m", c.m},         {"n", c.n},
         {"sigma", c.sigma}, {"kappa", c.kappa},
         {"x", c.x_grid()},  {"seeds_per_x", c.seeds_per_x},
         {"eta_max", c.eta_max}, {"eta_step", c.eta_step},
         {"seed", c.master_seed}};
}

}  // namespace svshrink
