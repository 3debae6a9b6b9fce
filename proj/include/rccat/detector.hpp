#pragma once

// Robust offline change detection by scanning the difference of soft-truncated
// means over the w observations on either side of each index, then keeping
// scores that are local maxima over a neighbourhood of lambda*w and exceed b.

#include "rccat/detail/exact_sum.hpp"
#include "rccat/estimators.hpp"
#include "rccat/time_series.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rccat {

struct DetectorConfig {
    std::size_t w = 100;   ///< half-window length
    double b = 1.0;        ///< detection threshold (strict: score > b)
    double lambda = 1.0;   ///< neighbourhood factor
    double alpha = 1.0;    ///< scale of the window estimator

    void validate() const {
        if (w == 0) throw ConfigError("detector config: w must be positive");
        if (!(b >= 0.0) || !std::isfinite(b)) throw ConfigError("detector config: b must be non-negative");
        if (!(lambda >= 1.0) || !std::isfinite(lambda)) throw ConfigError("detector config: lambda must be >= 1");
        if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("detector config: alpha must be positive");
    }

    /// Integer neighbourhood h = ceil(lambda * w): |k - j| < lambda*w  <=>  |k - j| < h.
    std::size_t neighborhood() const {
        return static_cast<std::size_t>(std::ceil(lambda * static_cast<double>(w) - 1e-9));
    }

    friend bool operator==(const DetectorConfig&, const DetectorConfig&) = default;
};

/// Scores S_w(j) for j = w+1 .. n-w (1-based).
struct ScanTrace {
    std::size_t w = 0;
    std::vector<double> scores;

    std::size_t first_index() const noexcept { return w + 1; }
    std::size_t last_index() const noexcept { return w + scores.size(); }
    std::size_t series_length() const noexcept { return scores.size() + 2 * w; }
    bool contains(std::size_t j) const noexcept { return !scores.empty() && j >= first_index() && j <= last_index(); }

    double score(std::size_t j) const {
        if (!contains(j)) throw std::out_of_range("ScanTrace::score: index " + std::to_string(j) + " outside trace");
        return scores[j - first_index()];
    }

    friend bool operator==(const ScanTrace&, const ScanTrace&) = default;
};

struct DetectionReport {
    std::string method = "rccat";
    std::vector<std::size_t> change_points;  ///< ascending
    std::vector<std::size_t> candidates;     ///< local maximizers before thresholding, ascending
    ScanTrace trace;
    DetectorConfig config_used;

    friend bool operator==(const DetectionReport&, const DetectionReport&) = default;
};

/// Change locations tau_1 < ... < tau_K: observations tau_{k-1}+1 .. tau_k share
/// segment_means[k-1] (tau_0 = 0, tau_{K+1} = n).
struct GroundTruth {
    std::size_t n = 0;
    std::vector<std::size_t> tau;
    std::vector<double> segment_means;

    void validate() const {
        if (segment_means.size() != tau.size() + 1)
            throw std::domain_error("ground truth: need exactly one more segment mean than change points");
        std::size_t prev = 0;
        for (std::size_t t : tau) {
            if (t <= prev || t >= n) throw std::domain_error("ground truth: change points must increase strictly inside (0, n)");
            prev = t;
        }
    }

    /// Smallest gap between consecutive boundaries including 0 and n.
    std::size_t min_spacing() const {
        std::size_t best = n;
        std::size_t prev = 0;
        for (std::size_t t : tau) {
            best = std::min(best, t - prev);
            prev = t;
        }
        return std::min(best, n - prev);
    }

    /// Smallest absolute mean shift across a change; +inf when K = 0.
    double min_jump() const {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k + 1 < segment_means.size(); ++k)
            best = std::min(best, std::fabs(segment_means[k + 1] - segment_means[k]));
        return best;
    }

    friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

namespace detail {

inline void require_scannable(std::size_t n, std::size_t w) {
    if (w == 0) throw std::domain_error("scan: window must be positive");
    if (n <= 2 * w)
        throw std::domain_error("scan: series of length " + std::to_string(n) + " too short for w = " + std::to_string(w));
}

inline std::vector<double> scaled_psi(std::span<const double> x, double alpha) {
    std::vector<double> out(x.size());
    std::transform(x.begin(), x.end(), out.begin(), [alpha](double v) { return psi(v / alpha); });
    return out;
}

} // namespace detail

/// |estimate(j+1..j+w) - estimate(j-w..j-1)|; observation j belongs to neither window.
/// Summed exactly, so it agrees bit for bit with compute_trace.
inline double scan_statistic(const TimeSeries& series, std::size_t j, std::size_t w, double alpha) {
    const std::size_t n = series.size();
    detail::require_scannable(n, w);
    if (j < w + 1 || j > n - w) throw std::domain_error("scan_statistic: index " + std::to_string(j) + " out of range");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::domain_error("scan_statistic: alpha must be positive");
    detail::ExactSum left, right;
    for (double v : series.slice(j - w, j - 1)) left.add(psi(v / alpha));
    for (double v : series.slice(j + 1, j + w)) right.add(psi(v / alpha));
    return std::fabs(alpha / static_cast<double>(w) * difference(right, left));
}

/// O(n) trace: psi(x/alpha) is evaluated once per observation and both window
/// sums slide by one exact add and one exact subtract per index.
inline ScanTrace compute_trace(const TimeSeries& series, const DetectorConfig& cfg) {
    cfg.validate();
    const std::size_t n = series.size();
    const std::size_t w = cfg.w;
    detail::require_scannable(n, w);

    const std::vector<double> p = detail::scaled_psi(series.values(), cfg.alpha);
    const double scale = cfg.alpha / static_cast<double>(w);

    // 0-based: left window of j covers p[j-w-1 .. j-2], right covers p[j .. j+w-1].
    detail::ExactSum left, right;
    for (std::size_t i = 0; i < w; ++i) {
        left.add(p[i]);
        right.add(p[w + 1 + i]);
    }

    ScanTrace trace{w, std::vector<double>(n - 2 * w)};
    for (std::size_t j = w + 1;; ++j) {
        trace.scores[j - w - 1] = std::fabs(scale * difference(right, left));
        if (j == n - w) break;
        left.sub(p[j - w - 1]);
        left.add(p[j - 1]);
        right.sub(p[j]);
        right.add(p[j + w]);
    }
    return trace;
}

/// O(n w) reference path: every window summed from scratch with the same exact
/// accumulator, so it matches compute_trace bit for bit.
inline ScanTrace compute_trace_bruteforce(const TimeSeries& series, const DetectorConfig& cfg) {
    cfg.validate();
    const std::size_t n = series.size();
    const std::size_t w = cfg.w;
    detail::require_scannable(n, w);

    const std::vector<double> p = detail::scaled_psi(series.values(), cfg.alpha);
    const double scale = cfg.alpha / static_cast<double>(w);
    ScanTrace trace{w, std::vector<double>(n - 2 * w)};
    for (std::size_t j = w + 1; j <= n - w; ++j) {
        detail::ExactSum left, right;
        for (std::size_t i = j - w; i <= j - 1; ++i) left.add(p[i - 1]);
        for (std::size_t i = j + 1; i <= j + w; ++i) right.add(p[i - 1]);
        trace.scores[j - w - 1] = std::fabs(scale * difference(right, left));
    }
    return trace;
}

/// Trace with an arbitrary window estimator (span of w observations -> location).
template <class WindowEstimator>
ScanTrace compute_trace_with(const TimeSeries& series, std::size_t w, WindowEstimator&& estimate) {
    const std::size_t n = series.size();
    detail::require_scannable(n, w);
    ScanTrace trace{w, std::vector<double>(n - 2 * w)};
    for (std::size_t j = w + 1; j <= n - w; ++j) {
        const double r = estimate(series.slice(j + 1, j + w));
        const double l = estimate(series.slice(j - w, j - 1));
        trace.scores[j - w - 1] = std::fabs(r - l);
    }
    return trace;
}

/// Trace whose window estimates use the two-stage shifting device (first half
/// of each window locates, second half estimates). O(n w).
inline ScanTrace compute_trace_shifted(const TimeSeries& series, std::size_t w, const EstimatorConfig& est) {
    if (w < 2) throw std::domain_error("compute_trace_shifted: w must be at least 2");
    return compute_trace_with(series, w, [&est](std::span<const double> win) { return shifting_device_estimate(win, est); });
}

/// Indices j in [first, last] whose score is >= every trace score within
/// distance < h (neighbours outside the trace are ignored). Maximizers closer
/// than h to one another necessarily tie; of those only the leftmost is kept,
/// scanning left to right, so returned indices are at least h apart.
inline std::vector<std::size_t> local_maximizers(const ScanTrace& trace, std::size_t h, std::size_t first, std::size_t last) {
    if (h == 0) throw std::domain_error("local_maximizers: h must be positive");
    std::vector<std::size_t> out;
    if (trace.scores.empty()) return out;
    first = std::max(first, trace.first_index());
    last = std::min(last, trace.last_index());
    if (first > last) return out;

    const std::vector<double>& s = trace.scores;
    const std::size_t m = s.size();
    const double neg_inf = -std::numeric_limits<double>::infinity();

    // ahead[i] = max s[i .. i+h-1], behind[i] = max s[i-h+1 .. i-1] (clipped).
    std::vector<double> ahead(m), behind(m, neg_inf);
    std::deque<std::size_t> dq;
    for (std::size_t i = m; i-- > 0;) {
        while (!dq.empty() && s[dq.back()] <= s[i]) dq.pop_back();
        dq.push_back(i);
        while (dq.front() >= i + h) dq.pop_front();
        ahead[i] = s[dq.front()];
    }
    dq.clear();
    for (std::size_t i = 0; i < m; ++i) {
        while (!dq.empty() && dq.front() + h <= i) dq.pop_front();
        if (!dq.empty()) behind[i] = s[dq.front()];
        while (!dq.empty() && s[dq.back()] <= s[i]) dq.pop_back();
        dq.push_back(i);
    }

    for (std::size_t j = first; j <= last; ++j) {
        const std::size_t i = j - trace.first_index();
        if (s[i] < ahead[i] || s[i] < behind[i]) continue;
        if (!out.empty() && j - out.back() < h) continue;
        out.push_back(j);
    }
    return out;
}

/// Neighbourhood search and thresholding over a precomputed trace.
inline DetectionReport select_change_points(ScanTrace trace, const DetectorConfig& cfg, std::string method = "rccat") {
    cfg.validate();
    const std::size_t n = trace.series_length();
    if (static_cast<double>(n) <= 2.0 * cfg.lambda * static_cast<double>(cfg.w))
        throw std::domain_error("detect: series of length " + std::to_string(n) + " too short for 2*lambda*w");
    if (trace.w != cfg.w) throw std::domain_error("detect: trace window does not match config");

    const std::size_t h = cfg.neighborhood();
    DetectionReport report;
    report.method = std::move(method);
    report.config_used = cfg;
    report.candidates = local_maximizers(trace, h, h + 1, n - h);
    for (std::size_t j : report.candidates)
        if (trace.score(j) > cfg.b) report.change_points.push_back(j);
    report.trace = std::move(trace);
    return report;
}

inline DetectionReport detect(const TimeSeries& series, const DetectorConfig& cfg) {
    cfg.validate();
    if (static_cast<double>(series.size()) <= 2.0 * cfg.lambda * static_cast<double>(cfg.w))
        throw std::domain_error("detect: series of length " + std::to_string(series.size()) + " too short for 2*lambda*w");
    return select_change_points(compute_trace(series, cfg), cfg);
}

/// 2 c0 sqrt(M eta), or c0 sqrt(M eta) / 2 when `practical`.
inline double default_threshold(const EstimatorConfig& cfg, bool practical = false) {
    const double bias = asymptotic_bias(cfg);
    return practical ? bias / 2.0 : 2.0 * bias;
}

/// Detector settings derived from the estimator constants: alpha from the
/// window size w, b from default_threshold.
inline DetectorConfig make_detector_config(const EstimatorConfig& est, std::size_t w, double lambda, bool practical = false) {
    DetectorConfig cfg{w, default_threshold(est, practical), lambda, select_alpha(est, w)};
    cfg.validate();
    return cfg;
}

struct AssumptionReport {
    std::size_t spacing = 0;          ///< minimal spacing including the series ends
    double spacing_required = 0.0;    ///< lambda * w
    bool spacing_ok = true;
    bool lambda_ok = true;            ///< lambda >= 2
    double jump = 0.0;                ///< +inf when there are no changes
    double jump_required = 0.0;       ///< sqrt(3 b)
    bool jump_ok = true;

    bool all_ok() const noexcept { return spacing_ok && lambda_ok && jump_ok; }
};

/// Checks the spacing (> lambda w, lambda >= 2) and jump-size (> sqrt(3b))
/// conditions under which the consistency guarantee applies.
/// Both are vacuous when there are no change points.
inline AssumptionReport validate_assumptions(const GroundTruth& gt, const DetectorConfig& cfg) {
    gt.validate();
    cfg.validate();
    AssumptionReport r;
    r.spacing = gt.min_spacing();
    r.spacing_required = cfg.lambda * static_cast<double>(cfg.w);
    r.jump = gt.min_jump();
    r.jump_required = std::sqrt(3.0 * cfg.b);
    if (!gt.tau.empty()) {
        r.lambda_ok = cfg.lambda >= 2.0;
        r.spacing_ok = static_cast<double>(r.spacing) > r.spacing_required;
        r.jump_ok = r.jump > r.jump_required;
    }
    return r;
}

} // namespace rccat
