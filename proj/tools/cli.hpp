#pragma once

// Command-line front end: detect, simulate, bench, estimate, convert-eta.
// Exit codes: 0 success, 1 usage error, 2 data error.

#include "rccat/rccat.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace rccat::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

namespace detail {

// Splices `key = value` entries from --config FILE into the argument list as
// --key=value tokens placed before the user's own, skipping keys the user
// already passed so that explicit flags always win.
inline std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
        }
        if (args[i].starts_with("--config=")) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (!path) return args;

    std::set<std::string> given;
    for (const auto& a : args) {
        if (!a.starts_with("--")) continue;
        given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
    }
    std::vector<std::string> injected;
    for (const auto& [key, value] : load_config(*path)) {
        if (given.count(key)) continue;
        injected.push_back("--" + key + "=" + value);
    }
    // Subcommand name is the first token that is not an option.
    auto sub = std::find_if(args.begin(), args.end(), [](const std::string& a) { return !a.starts_with("-"); });
    const auto at = sub == args.end() ? args.end() : sub + 1;
    args.insert(at, injected.begin(), injected.end());
    return args;
}

struct EstimatorFlags {
    double A = kLn2;
    double M = 10.0;
    double eta = 0.1;
    double delta = 0.01;
    double B = 2.0;
    std::optional<double> V;

    void attach(CLI::App* app, double default_M, bool with_eta = true) {
        M = default_M;
        if (with_eta) app->add_option("--eta", eta, "Contamination rate")->capture_default_str();
        app->add_option("--M", M, "Bound on the conditional second moment")->capture_default_str();
        app->add_option("--delta", delta, "Confidence parameter")->capture_default_str();
        app->add_option("--A", A, "Bound on the influence function")->capture_default_str();
        app->add_option("--B", B, "Bias-bound constant (> 1)")->capture_default_str();
        app->add_option("--V", V, "Bound on the conditional variance (enables the shifting device)");
    }

    EstimatorConfig config() const {
        EstimatorConfig cfg{A, M, V, eta, delta, B};
        cfg.validate();
        return cfg;
    }
};

inline std::ostream& open_or(const std::string& path, std::ofstream& file, std::ostream& fallback) {
    if (path.empty() || path == "-") return fallback;
    file.open(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open " + path + " for writing");
    return file;
}

} // namespace detail

struct DetectArgs {
    std::string input, output = "-", trace, truth;
    std::size_t w = 100;
    std::optional<double> b, alpha;
    bool practical = false;
    double lambda = 2.0;
    std::string method = "rccat", alpha_mode = "thm1", split = "interleaved";
    std::uint64_t split_seed = 0;
    std::optional<std::size_t> top_k;
    detail::EstimatorFlags est;
};

struct SimulateArgs {
    std::size_t n = 1500;
    std::vector<std::size_t> tau;
    std::vector<double> means;
    double mean_lo = -3.0, mean_hi = 3.0;
    std::string noise = "t";
    double df = 3.0, sigma = 1.0, garch_omega = 0.5, garch_a = 0.3, garch_cap = 4.0;
    int setting = 0;
    std::string outlier = "none";
    double outlier_value = 100.0, pareto_shape = 2.0, eta = 0.0;
    std::size_t k0 = 50;
    std::string placement = "bernoulli";
    std::uint64_t seed = 0;
    std::string output = "-", truth;
};

struct BenchArgs {
    int setting = 1;
    std::size_t n = 1500, reps = 100, workers = 1, k0 = 50;
    std::vector<double> eta{0.05, 0.1, 0.2, 0.3, 0.4};
    std::vector<std::size_t> w{80, 100, 120};
    std::vector<double> means{-1.0, 1.0, -1.0};
    std::string method = "both", placement = "bernoulli", csv, table = "-";
    std::uint64_t seed = 0;
    double lambda = 2.0;
    detail::EstimatorFlags est;
};

struct EstimateArgs {
    std::string input;
    std::optional<std::size_t> k;
    detail::EstimatorFlags est;
};

struct ConvertArgs {
    double epsilon = 0.0, beta = 0.1;
    std::size_t n = 1000, k0 = 100;
    bool strict = false;
};

inline Placement parse_placement(const std::string& s) {
    return s == "block" ? Placement::BlockExact : Placement::Bernoulli;
}

inline SplitRule parse_split(const std::string& s) {
    if (s == "contiguous") return SplitRule::Contiguous;
    if (s == "random") return SplitRule::Random;
    return SplitRule::Interleaved;
}

inline int run_detect(const DetectArgs& a, std::ostream& out, std::ostream& err) {
    const EstimatorConfig est = a.est.config();
    const TimeSeries series = load_csv(a.input);

    DetectorConfig cfg{a.w, a.b.value_or(default_threshold(est, a.practical)), a.lambda,
                       a.alpha.value_or(select_alpha(est, a.w))};
    cfg.validate();

    DetectionReport report;
    if (a.method == "arc") {
        if (!(est.eta > 0.0)) throw ConfigError("arc needs eta > 0");
        report = arc_detect(series, cfg, RumeConfig{est.eta, parse_split(a.split), a.split_seed});
    } else if (a.alpha_mode == "shifted") {
        if (!est.V) throw ConfigError("--alpha-mode shifted needs --V");
        report = select_change_points(compute_trace_shifted(series, a.w, est), cfg, "rccat-shifted");
    } else {
        report = detect(series, cfg);
    }

    if (a.top_k) {
        const auto scored = scored_candidates(report);
        report.change_points = top_k(scored, *a.top_k);
    }

    std::vector<std::size_t> truth;
    if (!a.truth.empty()) {
        std::ifstream in(a.truth);
        if (!in) throw ParseError("cannot open " + a.truth, 0);
        try {
            truth = truth_from_json(Json::parse(in)).tau;
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(std::string("malformed truth file: ") + e.what(), 0);
        }
    }

    Json meta;
    meta["input"] = a.input;
    meta["alpha_mode"] = a.alpha_mode;
    meta["estimator"] = estimator_to_json(est);
    meta["threshold_mode"] = a.b ? "explicit" : (a.practical ? "practical" : "theory");
    meta["selection"] = a.top_k ? "top-k" : "threshold";
    if (!truth.empty()) meta["truth"] = truth;

    std::ofstream file;
    write_report(report, detail::open_or(a.output, file, out), meta);
    if (!a.trace.empty()) {
        std::ofstream trace_out(a.trace, std::ios::binary);
        if (!trace_out) throw std::runtime_error("cannot open " + a.trace + " for writing");
        write_trace_csv(report, trace_out, truth);
    }
    err << "detected " << report.change_points.size() << " change point(s) among " << report.candidates.size()
        << " candidate(s)\n";
    return kExitOk;
}

inline int run_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
    SignalSpec spec;
    spec.n = a.n;
    spec.tau = a.tau;
    if (spec.tau.empty() && a.means.size() != 1) {
        const std::size_t k = a.means.empty() ? 2 : a.means.size() - 1;
        for (std::size_t i = 1; i <= k; ++i) spec.tau.push_back(i * a.n / (k + 1));
    }
    spec.segment_means = a.means;
    if (spec.segment_means.empty()) {
        spec.segment_means.assign(spec.tau.size() + 1, 0.0);
        for (std::size_t i = 1; i < spec.segment_means.size(); i += 2) spec.segment_means[i] = 2.0;
    }
    spec.mean_lo = a.mean_lo;
    spec.mean_hi = a.mean_hi;
    if (a.noise == "gaussian") spec.noise = GaussianNoise{a.sigma};
    else if (a.noise == "garch") spec.noise = GarchNoise{a.garch_omega, a.garch_a, a.garch_cap};
    else spec.noise = StudentTNoise{a.df};

    const auto signal = gen_signal(spec, derive_seed(a.seed, {1}));
    ContaminatedSeries data{signal.series, std::vector<bool>(signal.series.size(), false)};

    std::optional<OutlierModel> outliers;
    if (a.setting != 0) outliers = setting_outliers(a.setting);
    else if (a.outlier == "pareto") outliers = ParetoOutliers{a.pareto_shape};
    else if (a.outlier == "fixed") outliers = FixedOutliers{a.outlier_value};
    else if (a.outlier == "symmetric") outliers = SymmetricOutliers{a.outlier_value};
    if (outliers && a.eta > 0.0) {
        ContaminationSpec cont{a.eta, a.k0, *outliers, parse_placement(a.placement)};
        if (cont.k0_too_small(a.n)) err << "warning: k0 = " << a.k0 << " is below log(n)\n";
        data = apply_contamination(signal.series, cont, derive_seed(a.seed, {2}));
    }

    std::ofstream file;
    write_csv(data.series, detail::open_or(a.output, file, out));
    if (!a.truth.empty()) {
        Json j = truth_to_json(signal.truth, data.mask);
        j["seed"] = a.seed;
        std::ofstream truth_out(a.truth, std::ios::binary);
        if (!truth_out) throw std::runtime_error("cannot open " + a.truth + " for writing");
        truth_out << j.dump(2) << '\n';
    }
    return kExitOk;
}

inline int run_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
    BenchmarkScenario s;
    s.setting = a.setting;
    s.n = a.n;
    s.eta_grid = a.eta;
    s.w_grid = a.w;
    s.replications = a.reps;
    s.method = a.method == "rccat" ? Method::RcCat : a.method == "arc" ? Method::Arc : Method::Both;
    s.master_seed = a.seed;
    EstimatorConfig est{a.est.A, a.est.M, std::nullopt, 0.1, a.est.delta, a.est.B};
    est.validate();
    s.estimator = est;
    s.lambda = a.lambda;
    s.segment_means = a.means;
    s.changes = a.means.size() - 1;
    s.placement = parse_placement(a.placement);
    s.k0 = a.k0;
    s.workers = a.workers;

    const BenchmarkResult result = run_benchmark(s);
    std::ofstream file;
    write_bench_table(result, detail::open_or(a.table, file, out));
    if (!a.csv.empty()) {
        std::ofstream csv(a.csv, std::ios::binary);
        if (!csv) throw std::runtime_error("cannot open " + a.csv + " for writing");
        write_bench_csv(result, csv);
    }
    double seconds[2] = {0.0, 0.0};
    for (const auto& c : result.cells) seconds[c.method == Method::Arc ? 1 : 0] += c.runtime_seconds;
    err << "detector time: rccat " << seconds[0] << " s, arc " << seconds[1] << " s\n";
    return kExitOk;
}

inline int run_estimate(const EstimateArgs& a, std::ostream& out, std::ostream& err) {
    const EstimatorConfig cfg = a.est.config();
    const TimeSeries series = load_csv(a.input);
    const std::size_t n = series.size();
    Json j;
    j["n"] = n;
    if (cfg.V) {
        const std::size_t k = a.k.value_or(n / 2);
        j["method"] = "shifting-device";
        j["k"] = k;
        j["estimate"] = shifting_device_estimate(series.values(), cfg, k);
        const DeviationBound bound = shifted_deviation_radius(cfg, n, k);
        j["radius"] = bound.radius;
        j["confidence"] = bound.confidence;
        j["alpha"] = bound.alpha_used;
    } else {
        const DeviationBound bound = deviation_radius(cfg, n);
        j["method"] = "catoni";
        j["estimate"] = catoni_estimate(series.values(), bound.alpha_used);
        j["radius"] = bound.radius;
        j["confidence"] = bound.confidence;
        j["alpha"] = bound.alpha_used;
    }
    j["bias_bound"] = asymptotic_bias(cfg);
    if (cfg.eta > 0.0 && static_cast<double>(n) < bias_min_samples(cfg))
        err << "warning: n = " << n << " is below " << bias_min_samples(cfg)
            << "; bias_bound is not yet guaranteed at this sample size\n";
    j["estimator"] = estimator_to_json(cfg);
    out << j.dump(2) << '\n';
    return kExitOk;
}

inline int run_convert(const ConvertArgs& a, std::ostream& out, std::ostream& err) {
    HuberConversion r;
    try {
        r = huber_to_eta(a.epsilon, a.beta, a.n, a.k0, a.strict);
    } catch (const std::domain_error& e) {
        throw ConfigError(e.what());
    }
    if (r.clamped) err << "warning: implied eta exceeds 1; clamped to " << format_double(kMaxEta) << '\n';
    out << format_double(r.eta) << '\n';
    return kExitOk;
}

inline int cli_main(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Robust offline change-point detection under contamination", "rccat"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.footer("All subcommands accept --config FILE with one `key = value` per line; command-line flags win.");

    const std::vector<std::string> methods{"rccat", "arc"};

    DetectArgs d;
    auto* det = app.add_subcommand("detect", "Detect change points in a CSV series and write a JSON report");
    det->add_option("-i,--input", d.input, "Input CSV (value or t,value)")->required();
    det->add_option("-o,--output", d.output, "JSON report path (- for stdout)")->capture_default_str();
    det->add_option("--trace", d.trace, "Write the per-index score trace as CSV");
    det->add_option("--truth", d.truth, "Truth JSON from `simulate` (adds a truth column to the trace)");
    det->add_option("--w", d.w, "Half-window length")->capture_default_str()->check(CLI::PositiveNumber);
    det->add_option("--b", d.b, "Threshold (default 2 c0 sqrt(M eta))");
    det->add_flag("--practical", d.practical, "Use the practical threshold c0 sqrt(M eta) / 2");
    det->add_option("--lambda", d.lambda, "Neighbourhood factor")->capture_default_str();
    det->add_option("--alpha", d.alpha, "Override the estimator scale");
    det->add_option("--method", d.method, "Detector")->check(CLI::IsMember(methods))->capture_default_str();
    det->add_option("--alpha-mode", d.alpha_mode, "Window estimator scale")
        ->check(CLI::IsMember({"thm1", "shifted"}))
        ->capture_default_str();
    det->add_option("--split", d.split, "ARC half-split rule")
        ->check(CLI::IsMember({"interleaved", "contiguous", "random"}))
        ->capture_default_str();
    det->add_option("--split-seed", d.split_seed, "Seed for --split random");
    det->add_option("--top-k", d.top_k, "Report the K highest-scoring candidates instead of thresholding");
    d.est.attach(det, 10.0);

    SimulateArgs s;
    auto* sim = app.add_subcommand("simulate", "Generate a contaminated piecewise-constant series");
    sim->add_option("--n", s.n, "Series length")->capture_default_str();
    sim->add_option("--tau", s.tau, "Change points (1-based last index of each segment)")->delimiter(',');
    sim->add_option("--means", s.means, "Segment means")->delimiter(',');
    sim->add_option("--mean-lo", s.mean_lo, "Lower end of the allowed mean range")->capture_default_str();
    sim->add_option("--mean-hi", s.mean_hi, "Upper end of the allowed mean range")->capture_default_str();
    sim->add_option("--noise", s.noise, "Inlier noise")->check(CLI::IsMember({"t", "gaussian", "garch"}))->capture_default_str();
    sim->add_option("--df", s.df, "Student t degrees of freedom")->capture_default_str();
    sim->add_option("--sigma", s.sigma, "Gaussian noise scale")->capture_default_str();
    sim->add_option("--garch-omega", s.garch_omega)->capture_default_str();
    sim->add_option("--garch-a", s.garch_a)->capture_default_str();
    sim->add_option("--garch-cap", s.garch_cap)->capture_default_str();
    sim->add_option("--setting", s.setting, "Benchmark setting 1-3 (sets the outlier model)")->check(CLI::Range(0, 3));
    sim->add_option("--outlier", s.outlier, "Outlier model when no setting is given")
        ->check(CLI::IsMember({"none", "pareto", "fixed", "symmetric"}))
        ->capture_default_str();
    sim->add_option("--outlier-value", s.outlier_value)->capture_default_str();
    sim->add_option("--pareto-shape", s.pareto_shape)->capture_default_str();
    sim->add_option("--eta", s.eta, "Contamination rate")->capture_default_str();
    sim->add_option("--k0", s.k0, "Minimum budget window")->capture_default_str();
    sim->add_option("--placement", s.placement)->check(CLI::IsMember({"bernoulli", "block"}))->capture_default_str();
    sim->add_option("--seed", s.seed, "Master seed")->envname("RCCAT_SEED");
    sim->add_option("-o,--output", s.output, "CSV path (- for stdout)")->capture_default_str();
    sim->add_option("--truth", s.truth, "Write ground truth and corruption mask as JSON");

    BenchArgs b;
    auto* ben = app.add_subcommand("bench", "Run the detection-error benchmark");
    ben->add_option("--setting", b.setting, "Contamination setting")->check(CLI::Range(1, 3))->capture_default_str();
    ben->add_option("--n", b.n)->capture_default_str();
    ben->add_option("--eta", b.eta, "Contamination-rate grid")->delimiter(',');
    ben->add_option("--w", b.w, "Window grid")->delimiter(',');
    ben->add_option("--reps", b.reps, "Replications per cell")->capture_default_str()->check(CLI::PositiveNumber);
    ben->add_option("--method", b.method)->check(CLI::IsMember({"rccat", "arc", "both"}))->capture_default_str();
    ben->add_option("--seed", b.seed, "Master seed")->envname("RCCAT_SEED");
    ben->add_option("--workers", b.workers)->capture_default_str()->check(CLI::PositiveNumber);
    ben->add_option("--lambda", b.lambda)->capture_default_str();
    ben->add_option("--means", b.means, "Segment means (K + 1 values)")->delimiter(',');
    ben->add_option("--placement", b.placement)->check(CLI::IsMember({"bernoulli", "block"}))->capture_default_str();
    ben->add_option("--k0", b.k0)->capture_default_str();
    ben->add_option("--csv", b.csv, "Write the long-form result table as CSV");
    ben->add_option("--table", b.table, "Aligned text table path (- for stdout)")->capture_default_str();
    b.est.attach(ben, 5.0, false);

    EstimateArgs e;
    auto* estc = app.add_subcommand("estimate", "Robust mean of a CSV series with its deviation radius");
    estc->add_option("-i,--input", e.input, "Input CSV")->required();
    estc->add_option("--k", e.k, "Shifting-device split (default n/2; needs --V)");
    e.est.attach(estc, 10.0);

    ConvertArgs c;
    auto* conv = app.add_subcommand("convert-eta", "Convert a Huber contamination rate to a window budget eta");
    conv->add_option("--epsilon", c.epsilon)->required();
    conv->add_option("--beta", c.beta)->capture_default_str();
    conv->add_option("--n", c.n)->capture_default_str();
    conv->add_option("--k0", c.k0)->capture_default_str();
    conv->add_flag("--strict", c.strict, "Fail instead of clamping when eta would exceed 1");

    try {
        args = detail::expand_config(std::move(args));
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& ex) {
        err << "error: " << ex.what() << "\n\n" << app.help();
        return kExitUsage;
    } catch (const ParseError& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitUsage;
    }

    try {
        if (*det) return run_detect(d, out, err);
        if (*sim) return run_simulate(s, out, err);
        if (*ben) return run_bench(b, out, err);
        if (*estc) return run_estimate(e, out, err);
        if (*conv) return run_convert(c, out, err);
    } catch (const ConfigError& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return cli_main(std::move(args), out, err);
}

} // namespace rccat::cli
