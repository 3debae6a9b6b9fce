#pragma once

// Monte-Carlo benchmark: for every (w, eta) cell, simulate two-change series
// under one of the three contamination settings, run RC-Cat and/or ARC, keep
// the top-K local maximizers by score, and average |detected - true|.

#include "rccat/baseline.hpp"
#include "rccat/datagen.hpp"
#include "rccat/detector.hpp"
#include "rccat/estimators.hpp"
#include "rccat/metrics.hpp"
#include "rccat/random.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace rccat {

enum class Method { RcCat, Arc, Both };

inline const char* method_name(Method m) {
    switch (m) {
    case Method::RcCat: return "rccat";
    case Method::Arc: return "arc";
    case Method::Both: return "both";
    }
    return "?";
}

struct BenchmarkScenario {
    int setting = 1;                      ///< 1, 2, 3; 0 = custom outliers
    std::size_t n = 1500;
    std::vector<double> eta_grid{0.05, 0.1, 0.2, 0.3, 0.4};
    std::vector<std::size_t> w_grid{80, 100, 120};
    std::size_t replications = 100;
    Method method = Method::Both;
    std::uint64_t master_seed = 0;

    EstimatorConfig estimator{kLn2, 5.0, std::nullopt, 0.1, 0.01, 2.0};  ///< eta is overridden per cell
    double lambda = 2.0;
    std::size_t changes = 2;                  ///< equally spaced in (0, n)
    std::vector<double> segment_means{-1.0, 1.0, -1.0};
    NoiseModel noise = StudentTNoise{3.0};
    std::optional<OutlierModel> custom_outliers;  ///< used when setting == 0
    Placement placement = Placement::Bernoulli;
    std::size_t k0 = 50;
    SplitRule arc_split = SplitRule::Interleaved;
    std::size_t workers = 1;

    void validate() const {
        if (eta_grid.empty() || w_grid.empty()) throw ConfigError("benchmark: grids must be non-empty");
        if (replications == 0) throw ConfigError("benchmark: replications must be >= 1");
        if (changes == 0) throw ConfigError("benchmark: need at least one change point");
        if (segment_means.size() != changes + 1) throw ConfigError("benchmark: need changes + 1 segment means");
        if (setting == 0 && !custom_outliers) throw ConfigError("benchmark: custom setting needs an outlier model");
        if (setting < 0 || setting > 3) throw ConfigError("benchmark: setting must be 0..3");
        for (double eta : eta_grid)
            if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("benchmark: eta grid values must lie in (0, 1)");
        for (std::size_t w : w_grid)
            if (static_cast<double>(n) <= 2.0 * lambda * static_cast<double>(w))
                throw ConfigError("benchmark: n too small for w = " + std::to_string(w));
    }

    std::vector<std::size_t> change_points() const {
        std::vector<std::size_t> tau;
        for (std::size_t k = 1; k <= changes; ++k) tau.push_back(k * n / (changes + 1));
        return tau;
    }

    OutlierModel outliers() const { return setting == 0 ? *custom_outliers : setting_outliers(setting); }

    /// FNV-1a over every field that influences results (workers excluded).
    std::uint64_t config_hash() const {
        std::ostringstream os;
        os.precision(17);
        os << "setting=" << setting << ";n=" << n << ";reps=" << replications << ";method=" << method_name(method)
           << ";seed=" << master_seed << ";A=" << estimator.A << ";M=" << estimator.M << ";delta=" << estimator.delta
           << ";B=" << estimator.B << ";lambda=" << lambda << ";changes=" << changes << ";placement=" << int(placement)
           << ";k0=" << k0 << ";split=" << int(arc_split) << ";noise=" << noise.index() << ";eta=";
        for (double e : eta_grid) os << e << ',';
        os << ";w=";
        for (std::size_t w : w_grid) os << w << ',';
        os << ";means=";
        for (double m : segment_means) os << m << ',';
        std::visit([&os](const auto& nm) {
            using T = std::decay_t<decltype(nm)>;
            if constexpr (std::is_same_v<T, StudentTNoise>) os << ";df=" << nm.df;
            else if constexpr (std::is_same_v<T, GaussianNoise>) os << ";sigma=" << nm.sigma;
            else os << ";garch=" << nm.omega << ',' << nm.a << ',' << nm.cap;
        }, noise);
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : os.str()) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }
};

struct BenchmarkCell {
    std::size_t w = 0;
    double eta = 0.0;
    Method method = Method::RcCat;
    std::size_t replications = 0;
    double mean_error = 0.0;
    double std_error = 0.0;
    std::size_t flagged = 0;        ///< replications with fewer than K candidates
    std::size_t exact_count = 0;    ///< replications whose thresholded detections number exactly K
    double runtime_seconds = 0.0;   ///< detector time summed over replications (not part of the tables)
    std::vector<double> errors;     ///< per-replication errors, index = replication
};

struct BenchmarkResult {
    BenchmarkScenario scenario;
    std::uint64_t config_hash = 0;
    std::vector<BenchmarkCell> cells;  ///< ordered by w, then eta, then method (rccat before arc)

    const BenchmarkCell* find(std::size_t w, double eta, Method m) const {
        for (const auto& c : cells)
            if (c.w == w && c.eta == eta && c.method == m) return &c;
        return nullptr;
    }
};

namespace detail {

inline constexpr std::uint64_t kSignalStream = 1;
inline constexpr std::uint64_t kContaminationStream = 2;

} // namespace detail

/// Seeds of replication `rep` at contamination rate `eta`. Data depend on
/// (setting, eta, rep) only, so every w and both methods see the same series.
inline std::pair<std::uint64_t, std::uint64_t> replication_seeds(const BenchmarkScenario& s, double eta, std::size_t rep) {
    const auto eta_bits = std::bit_cast<std::uint64_t>(eta);
    const auto setting = static_cast<std::uint64_t>(s.setting);
    return {derive_seed(s.master_seed, {detail::kSignalStream, setting, eta_bits, rep}),
            derive_seed(s.master_seed, {detail::kContaminationStream, setting, eta_bits, rep})};
}

/// One simulated, contaminated replication of the scenario.
inline std::pair<ContaminatedSeries, GroundTruth> simulate_replication(const BenchmarkScenario& s, double eta, std::size_t rep) {
    const auto [signal_seed, contamination_seed] = replication_seeds(s, eta, rep);
    SignalSpec spec;
    spec.n = s.n;
    spec.tau = s.change_points();
    spec.segment_means = s.segment_means;
    spec.noise = s.noise;
    spec.mean_lo = -std::numeric_limits<double>::infinity();
    spec.mean_hi = std::numeric_limits<double>::infinity();
    auto signal = gen_signal(spec, signal_seed);
    ContaminationSpec cont{eta, s.k0, s.outliers(), s.placement};
    return {apply_contamination(signal.series, cont, contamination_seed), std::move(signal.truth)};
}

inline BenchmarkResult run_benchmark(const BenchmarkScenario& scenario) {
    scenario.validate();
    const std::vector<std::size_t> truth = scenario.change_points();
    std::vector<Method> methods;
    if (scenario.method != Method::Arc) methods.push_back(Method::RcCat);
    if (scenario.method != Method::RcCat) methods.push_back(Method::Arc);

    BenchmarkResult result{scenario, scenario.config_hash(), {}};
    for (std::size_t w : scenario.w_grid)
        for (double eta : scenario.eta_grid)
            for (Method m : methods) {
                BenchmarkCell cell;
                cell.w = w;
                cell.eta = eta;
                cell.method = m;
                cell.replications = scenario.replications;
                cell.errors.assign(scenario.replications, 0.0);
                result.cells.push_back(std::move(cell));
            }

    // Task = (w index, eta index, rep); each writes only its own slots.
    const std::size_t n_eta = scenario.eta_grid.size();
    const std::size_t reps = scenario.replications;
    const std::size_t total = scenario.w_grid.size() * n_eta * reps;
    std::vector<std::vector<char>> flags(result.cells.size(), std::vector<char>(reps, 0));
    std::vector<std::vector<char>> exact(result.cells.size(), std::vector<char>(reps, 0));
    std::vector<std::vector<double>> seconds(result.cells.size(), std::vector<double>(reps, 0.0));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t task = next.fetch_add(1);
            if (task >= total) return;
            const std::size_t rep = task % reps;
            const std::size_t ei = (task / reps) % n_eta;
            const std::size_t wi = task / (reps * n_eta);
            try {
                const double eta = scenario.eta_grid[ei];
                const std::size_t w = scenario.w_grid[wi];
                const auto [data, gt] = simulate_replication(scenario, eta, rep);
                EstimatorConfig est = scenario.estimator;
                est.eta = eta;
                const DetectorConfig cfg = make_detector_config(est, w, scenario.lambda);
                for (std::size_t mi = 0; mi < methods.size(); ++mi) {
                    const std::size_t ci = (wi * n_eta + ei) * methods.size() + mi;
                    const auto t0 = std::chrono::steady_clock::now();
                    const DetectionReport report = methods[mi] == Method::RcCat
                                                       ? detect(data.series, cfg)
                                                       : arc_detect(data.series, cfg, RumeConfig{eta, scenario.arc_split, 0});
                    seconds[ci][rep] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                    const DetectionError err = detection_error_topk(report, truth);
                    result.cells[ci].errors[rep] = err.error;
                    flags[ci][rep] = err.count_mismatch;
                    exact[ci][rep] = report.change_points.size() == truth.size();
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(total);
                return;
            }
        }
    };

    const std::size_t n_workers = std::max<std::size_t>(1, std::min(scenario.workers, total));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    for (std::size_t ci = 0; ci < result.cells.size(); ++ci) {
        BenchmarkCell& cell = result.cells[ci];
        double sum = 0.0;
        for (double e : cell.errors) sum += e;
        cell.mean_error = sum / static_cast<double>(reps);
        double ss = 0.0;
        for (double e : cell.errors) ss += (e - cell.mean_error) * (e - cell.mean_error);
        cell.std_error = reps > 1 ? std::sqrt(ss / static_cast<double>(reps - 1) / static_cast<double>(reps)) : 0.0;
        for (std::size_t r = 0; r < reps; ++r) {
            cell.flagged += flags[ci][r] ? 1 : 0;
            cell.exact_count += exact[ci][r] ? 1 : 0;
            cell.runtime_seconds += seconds[ci][r];
        }
    }
    return result;
}

namespace detail {

inline std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

} // namespace detail

/// Long-form table, one row per (w, eta, method). Runtime is deliberately absent
/// so that identical scenarios produce byte-identical files.
inline void write_bench_csv(const BenchmarkResult& r, std::ostream& out) {
    out << "setting,w,eta,method,replications,mean_error,std_error,flagged,exact_count,master_seed,config_hash\n";
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(r.config_hash));
    for (const auto& c : r.cells) {
        out << r.scenario.setting << ',' << c.w << ',' << detail::fixed(c.eta, 4) << ',' << method_name(c.method) << ','
            << c.replications << ',' << detail::fixed(c.mean_error, 4) << ',' << detail::fixed(c.std_error, 4) << ','
            << c.flagged << ',' << c.exact_count << ',' << r.scenario.master_seed << ',' << hash << '\n';
    }
}

/// Block layout: one block per w, one row per method, one column per eta.
inline void write_bench_table(const BenchmarkResult& r, std::ostream& out) {
    const auto& s = r.scenario;
    out << "Setting " << (s.setting == 0 ? std::string("custom") : std::to_string(s.setting)) << "  (n = " << s.n
        << ", replications = " << s.replications << ", seed = " << s.master_seed << ")\n";
    auto pad = [](std::string text, std::size_t width) {
        if (text.size() < width) text.insert(0, width - text.size(), ' ');
        return text;
    };
    std::vector<Method> methods;
    if (s.method != Method::Arc) methods.push_back(Method::RcCat);
    if (s.method != Method::RcCat) methods.push_back(Method::Arc);
    for (std::size_t w : s.w_grid) {
        out << "\nw = " << w << '\n' << "eta     ";
        for (double eta : s.eta_grid) out << pad(detail::fixed(eta, 2), 9);
        out << '\n';
        for (Method m : methods) {
            out << (m == Method::RcCat ? "RC-Cat  " : "ARC     ");
            for (double eta : s.eta_grid) {
                const BenchmarkCell* c = r.find(w, eta, m);
                std::string v = detail::fixed(c->mean_error, 1);
                if (c->flagged > 0) v += '*';
                out << pad(v, 9);
            }
            out << '\n';
        }
    }
    bool any_flagged = false;
    for (const auto& c : r.cells) any_flagged = any_flagged || c.flagged > 0;
    if (any_flagged) out << "\n* some replications produced fewer than K candidates (penalised n/K each)\n";
}

} // namespace rccat
