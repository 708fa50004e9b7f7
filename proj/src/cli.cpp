#include "svshrink/cli.hpp"

#include "svshrink/estimation.hpp"
#include "svshrink/matrix_io.hpp"
#include "svshrink/risk.hpp"
#include "svshrink/shrink.hpp"
#include "svshrink/sim.hpp"
#include "svshrink/spectrum.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

namespace svshrink {

namespace {

using nlohmann::json;

constexpr std::uint64_t kDefaultSeed = 12345;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Writes through a temporary file so a failed run never leaves a partial artifact.
void write_artifact(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << content;
        return;
    }
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw IoError("cannot write " + path);
        f << content;
        if (!f.flush()) throw IoError("cannot write " + path);
    }
    std::filesystem::rename(tmp, path);
}

Matrix load_matrix(const std::string& path, bool header) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return read_csv_matrix(in, header);
}

json parse_inline_or_file(const std::string& text) {
    if (!text.empty() && text.front() == '@') return json::parse(slurp(text.substr(1)));
    return json::parse(text);
}

json version_block() { return {{"name", "svshrink"}, {"version", SVSHRINK_VERSION}}; }

json vector_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

// --------------------------------------------------------------------------
// denoise

struct DenoiseOptions {
    std::string input;
    std::string output;
    std::string report;
    std::string mode;
    std::optional<double> mu_a;
    std::optional<double> sigma_b;
    bool estimate = false;
    bool mask_family = false;
    bool header = false;
    std::string rule = "shrink";
};

ShrinkageRule parse_rule(const std::string& text, const EffectiveParams& params) {
    if (text == "shrink") return ShrinkageRule::optimal(params);
    if (text == "threshold") return ShrinkageRule::optimal_hard_threshold(params);
    if (text.rfind("tsvd:", 0) == 0) {
        const std::string digits = text.substr(5);
        std::size_t used = 0;
        long r = -1;
        try {
            r = std::stol(digits, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != digits.size() || digits.empty() || r < 0) {
            throw UsageError("bad rule '" + text + "': expected tsvd:<rank>");
        }
        return ShrinkageRule::truncated(r, params);
    }
    throw UsageError("unknown rule '" + text + "' (shrink, threshold, tsvd:<r>)");
}

int run_denoise(const DenoiseOptions& opt, std::ostream& out) {
    const Matrix y = load_matrix(opt.input, opt.header);
    const Eigen::Index m = std::min(y.rows(), y.cols());
    const Eigen::Index n = std::max(y.rows(), y.cols());
    const double beta = static_cast<double>(m) / static_cast<double>(n);

    json resolved = {{"input", opt.input}, {"output", opt.output}, {"rule", opt.rule},
                     {"estimate", opt.estimate}, {"mask_family", opt.mask_family},
                     {"header", opt.header}};
    EffectiveParams params;
    params.beta = beta;
    bool mask_family = opt.mask_family;
    std::optional<ModeDescriptor> mode;
    if (!opt.mode.empty()) {
        mode = parse_inline_or_file(opt.mode).get<ModeDescriptor>();
        resolved["mode"] = *mode;
        for (ModeKind k : mode->terms()) {
            if (k == ModeKind::missing_at_random || k == ModeKind::corruption_at_random) {
                mask_family = true;
            }
        }
        if (!opt.estimate) params = compile_mode(*mode, beta);
    }
    std::optional<EstimationReport> estimation;
    if (opt.estimate) {
        estimation = estimate_parameters(y, mask_family);
        params.sigma_b2 = estimation->sigma_b_hat * estimation->sigma_b_hat;
        if (estimation->mu_a_hat) params.mu_a = *estimation->mu_a_hat;
    }
    if (opt.mu_a) params.mu_a = *opt.mu_a;
    if (opt.sigma_b) {
        if (*opt.sigma_b < 0.0) throw std::invalid_argument("sigma_b must be >= 0");
        params.sigma_b2 = *opt.sigma_b * *opt.sigma_b;
    }
    params.validate();

    const ShrinkageRule rule = parse_rule(opt.rule, params);
    const ShrinkOutput result = shrink_matrix(y, rule);

    json report;
    report["tool"] = version_block();
    report["config"] = resolved;
    report["params"] = {{"mu_a", params.mu_a},
                        {"sigma_b", params.sigma_b()},
                        {"beta", params.beta},
                        {"rows", y.rows()},
                        {"cols", y.cols()}};
    if (estimation) report["estimation"] = *estimation;
    report["bulk_edge"] = bulk_edge(params);
    report["spectrum_before"] = vector_json(result.singular_values);
    report["spectrum_after"] = vector_json(result.coefficients.cwiseAbs());
    report["kept_rank"] = result.kept_rank;
    if (rule.kind == RuleKind::hard_threshold) report["lambda_star"] = rule.lambda;
    if (rule.kind == RuleKind::optimal_shrinker) {
        json curve = json::array();
        const double top = result.singular_values.size() > 0
                               ? std::max(result.singular_values(0), 2.0 * bulk_edge(params))
                               : 1.0;
        for (int i = 0; i <= 20; ++i) {
            const double yy = top * i / 20.0;
            curve.push_back({{"y", yy}, {"eta", optimal_shrinker(yy, params)}});
        }
        report["shrinker_curve"] = curve;
    }
    if (!params.noiseless()) {
        // Implied signal spectrum from the kept data singular values above the bulk.
        std::vector<double> implied;
        for (Eigen::Index i = 0; i < result.singular_values.size(); ++i) {
            if (result.coefficients(i) == 0.0) continue;
            const double x = inverse_displace(result.singular_values(i), params);
            if (x > 0.0 && (implied.empty() || x < implied.back())) implied.push_back(x);
        }
        json predicted = {{"implied_x", implied}};
        if (rule.kind == RuleKind::optimal_shrinker) {
            predicted["amse"] = total_amse(implied, AmseRule::optimal_shrinker, params).total;
        } else if (rule.kind == RuleKind::hard_threshold) {
            predicted["amse"] = total_amse_threshold(implied, rule.lambda, params).total;
        } else {
            predicted["amse"] = total_amse(implied, AmseRule::tsvd, params).total;
        }
        report["predicted"] = predicted;
    }

    std::ostringstream matrix_text;
    write_csv_matrix(matrix_text, result.estimate);
    write_artifact(opt.output, matrix_text.str(), out);
    write_artifact(opt.report, report.dump(2) + "\n", out);
    return 0;
}

// --------------------------------------------------------------------------
// analyze

struct AnalyzeOptions {
    double beta = 1.0;
    double sigma_b = 1.0;
    double mu_a = 1.0;
    std::vector<double> x;
    std::string output;
    std::string curve;
    double curve_max = 0.0;
    int curve_points = 301;
};

int run_analyze(const AnalyzeOptions& opt, std::ostream& out) {
    if (!(opt.beta > 0.0 && opt.beta <= 1.0)) throw std::invalid_argument("beta must lie in (0, 1]");
    if (!(opt.sigma_b > 0.0)) throw std::invalid_argument("analyze needs sigma_b > 0");
    EffectiveParams params{opt.mu_a, 0.0, opt.sigma_b * opt.sigma_b, opt.beta};
    params.validate();
    std::vector<double> x = opt.x;
    std::sort(x.begin(), x.end(), std::greater<>());

    json report;
    report["tool"] = version_block();
    report["config"] = {{"beta", opt.beta}, {"sigma_b", opt.sigma_b}, {"mu_a", opt.mu_a},
                        {"x", x}};
    report["lambda_star"] = optimal_threshold(params);
    report["bulk_edge"] = bulk_edge(params);
    report["critical_level"] = {
        {"optimal_shrinker", critical_level(AmseRule::optimal_shrinker, params)},
        {"optimal_threshold", critical_level(AmseRule::optimal_threshold, params)}};
    report["risk"] = {{"optimal_shrinker", total_amse(x, AmseRule::optimal_shrinker, params)},
                      {"optimal_threshold", total_amse(x, AmseRule::optimal_threshold, params)},
                      {"tsvd", total_amse(x, AmseRule::tsvd, params)}};
    json flags = json::array();
    const double crit = critical_level(AmseRule::optimal_shrinker, params);
    const double crit_threshold = critical_level(AmseRule::optimal_threshold, params);
    for (double xi : x) {
        json entry = {{"x", xi}};
        if (xi <= crit) {
            entry["status"] = "below critical, set to zero by every shrinker";
        } else if (xi <= crit_threshold) {
            entry["status"] = "below the hard-threshold critical level";
        } else {
            entry["status"] = "recoverable";
        }
        flags.push_back(entry);
    }
    report["flags"] = flags;
    if (opt.beta == 1.0) {
        const int r = std::max<int>(1, static_cast<int>(x.size()));
        report["worst_case"] = {{"rank", r},
                                {"tsvd", worst_case_mse(AmseRule::tsvd, r, params)},
                                {"optimal_shrinker", worst_case_mse(AmseRule::optimal_shrinker, r, params)},
                                {"optimal_threshold", worst_case_mse(AmseRule::optimal_threshold, r, params)}};
    }
    if (!opt.curve.empty()) {
        if (opt.curve_points < 2) throw std::invalid_argument("curve-points must be >= 2");
        const double hi = opt.curve_max > 0.0 ? opt.curve_max : 3.0 * crit_threshold;
        std::vector<double> grid;
        for (int i = 1; i <= opt.curve_points; ++i) grid.push_back(hi * i / opt.curve_points);
        write_artifact(opt.curve, risk_curve_csv(grid, params), out);
    }
    write_artifact(opt.output, report.dump(2) + "\n", out);
    return 0;
}

// --------------------------------------------------------------------------
// estimate

struct EstimateOptions {
    std::string input;
    std::string output;
    bool header = false;
    bool mask_family = false;
};

int run_estimate(const EstimateOptions& opt, std::ostream& out) {
    const Matrix y = load_matrix(opt.input, opt.header);
    json report = estimate_parameters(y, opt.mask_family);
    report["tool"] = version_block();
    report["config"] = {{"input", opt.input}, {"mask_family", opt.mask_family},
                        {"header", opt.header}};
    write_artifact(opt.output, report.dump(2) + "\n", out);
    return 0;
}

// --------------------------------------------------------------------------
// simulate

struct SimulateOptions {
    std::string name;
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::string output;
    std::string manifest;
};

std::string simulate_displacement(const json& cfg, std::uint64_t seed, std::size_t workers,
                                  json& resolved) {
    SignalSpec spec{cfg.value("m", Eigen::Index{1000}), cfg.value("n", Eigen::Index{1000}),
                    cfg.value("x", std::vector<double>{2.5})};
    std::sort(spec.x.begin(), spec.x.end(), std::greater<>());
    ModeDescriptor mode = ModeDescriptor::additive(1.0);
    if (cfg.contains("mode")) mode = cfg.at("mode").get<ModeDescriptor>();
    RunConfig run{seed, cfg.value("trials", std::size_t{20}), workers};
    resolved = {{"m", spec.m}, {"n", spec.n}, {"x", spec.x}, {"mode", mode},
                {"trials", run.trials}, {"seed", seed}};
    return records_csv(run_displacement_check(spec, mode, run));
}

int run_simulate(const SimulateOptions& opt, std::ostream& out) {
    json cfg = opt.config.empty() ? json::object() : parse_inline_or_file(opt.config);
    if (!cfg.is_object()) throw std::invalid_argument("simulation config must be a JSON object");
    if (opt.seed) cfg["seed"] = *opt.seed;
    if (opt.workers) cfg["workers"] = *opt.workers;
    const std::uint64_t seed = cfg.value("seed", kDefaultSeed);
    const std::size_t workers = cfg.value("workers", std::size_t{0});

    std::string csv;
    json resolved;
    if (opt.name == "displacement") {
        csv = simulate_displacement(cfg, seed, workers, resolved);
    } else if (opt.name == "critical-sweep") {
        auto c = cfg.get<CriticalSweepConfig>();
        c.master_seed = seed;
        resolved = c;
        const CriticalSweepResult result = run_critical_sweep(c);
        resolved["predicted_cutoffs"] = result.predicted_cutoffs;
        json empirical = json::array();
        for (double k : result.empirical_cutoffs) {
            empirical.push_back(std::isnan(k) ? json(nullptr) : json(k));
        }
        resolved["empirical_cutoffs"] = empirical;
        csv = sweep_csv(result);
    } else if (opt.name == "phase-plane") {
        auto c = cfg.get<PhasePlaneConfig>();
        c.master_seed = seed;
        resolved = c;
        csv = phase_plane_csv(run_phase_plane(c));
    } else if (opt.name == "brute-shrinker") {
        auto c = cfg.get<BruteShrinkerConfig>();
        c.master_seed = seed;
        resolved = c;
        csv = brute_csv(brute_force_shrinker(c));
    } else {
        throw UsageError("unknown experiment '" + opt.name +
                         "' (displacement, critical-sweep, phase-plane, brute-shrinker)");
    }
    write_artifact(opt.output, csv, out);
    if (!opt.manifest.empty()) {
        json manifest = {{"tool", version_block()}, {"experiment", opt.name}, {"config", resolved}};
        write_artifact(opt.manifest, manifest.dump(2) + "\n", out);
    }
    return 0;
}

void emit_error(std::ostream& err, const std::string& kind, const std::string& message,
                std::optional<std::pair<std::size_t, std::size_t>> where = std::nullopt) {
    json e = {{"error", message}, {"kind", kind}};
    if (where) {
        e["row"] = where->first;
        e["column"] = where->second;
    }
    err << e.dump() << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Low-rank matrix reconstruction by optimal singular value shrinkage",
                 "svshrink"};
    app.require_subcommand(1);

    DenoiseOptions dn;
    auto* denoise = app.add_subcommand("denoise", "Reconstruct a low-rank matrix from a CSV file");
    denoise->add_option("--input,-i", dn.input, "Data matrix (CSV)")->required();
    denoise->add_option("--output,-o", dn.output, "Estimate (CSV)")->required();
    denoise->add_option("--report", dn.report, "JSON report path (default: stdout)");
    denoise->add_option("--mode", dn.mode, "Mode JSON, inline or @file");
    denoise->add_option("--mu-a", dn.mu_a, "Mean of the multiplicative field");
    denoise->add_option("--sigma-b", dn.sigma_b, "Noise level in spectral units");
    denoise->add_flag("--estimate", dn.estimate, "Estimate sigma_b (and mu_a for mask modes)");
    denoise->add_flag("--mask-family", dn.mask_family, "Zeros mark missing entries");
    denoise->add_option("--rule", dn.rule, "shrink | threshold | tsvd:<r>");
    denoise->add_flag("--header", dn.header, "Skip the first CSV line");

    AnalyzeOptions an;
    auto* analyze = app.add_subcommand("analyze", "Closed-form risk for a hypothetical setup");
    analyze->add_option("--beta", an.beta, "Aspect ratio m/n in (0, 1]")->required();
    analyze->add_option("--sigma-b", an.sigma_b, "Noise level")->required();
    analyze->add_option("--mu-a", an.mu_a, "Mean of the multiplicative field");
    analyze->add_option("--x", an.x, "Signal singular values")->delimiter(',');
    analyze->add_option("--output,-o", an.output, "JSON report path (default: stdout)");
    analyze->add_option("--curve", an.curve, "Write a risk-vs-x CSV here");
    analyze->add_option("--curve-max", an.curve_max, "Largest x on the curve");
    analyze->add_option("--curve-points", an.curve_points, "Curve resolution");

    EstimateOptions es;
    auto* estimate = app.add_subcommand("estimate", "Estimate model parameters from data");
    estimate->add_option("--input,-i", es.input, "Data matrix (CSV)")->required();
    estimate->add_option("--output,-o", es.output, "JSON report path (default: stdout)");
    estimate->add_flag("--header", es.header, "Skip the first CSV line");
    estimate->add_flag("--mask-family", es.mask_family, "Zeros mark missing entries");

    SimulateOptions sm;
    auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo experiment");
    simulate->add_option("name", sm.name,
                         "displacement | critical-sweep | phase-plane | brute-shrinker")
        ->required();
    simulate->add_option("--config", sm.config, "Config JSON, inline or @file");
    simulate->add_option("--seed", sm.seed, "Master seed (default 12345)");
    simulate->add_option("--workers", sm.workers, "Worker threads (0 = all cores)");
    simulate->add_option("--output,-o", sm.output, "CSV path (default: stdout)");
    simulate->add_option("--manifest", sm.manifest, "Write the resolved config as JSON");

    std::vector<std::string> storage{"svshrink"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : storage) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        emit_error(err, "usage", e.what());
        return 2;
    }

    try {
        if (denoise->parsed()) return run_denoise(dn, out);
        if (analyze->parsed()) return run_analyze(an, out);
        if (estimate->parsed()) return run_estimate(es, out);
        if (simulate->parsed()) return run_simulate(sm, out);
    } catch (const CsvError& e) {
        emit_error(err, "csv", e.what(), std::pair{e.row(), e.column()});
        return 1;
    } catch (const UsageError& e) {
        emit_error(err, "usage", e.what());
        return 2;
    } catch (const NumericalError& e) {
        emit_error(err, "numerical", e.what());
        return 1;
    } catch (const json::exception& e) {
        emit_error(err, "json", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        emit_error(err, "invalid_argument", e.what());
        return 1;
    } catch (const std::exception& e) {
        emit_error(err, "io", e.what());
        return 1;
    }
    return 2;
}

}  // namespace svshrink
