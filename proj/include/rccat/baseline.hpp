#pragma once

// Shortest-interval robust mean (RUME) and the ARC scan detector built on it.
// Half of a window locates the shortest interval holding a (1 - eta) share of
// its points; the mean of the other half's points inside that interval is the
// estimate. ARC runs the same scan / local-maximum / threshold pipeline as
// detect() with this estimator in place of the soft-truncated mean.

#include "rccat/detector.hpp"
#include "rccat/random.hpp"
#include "rccat/time_series.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace rccat {

enum class SplitRule {
    Interleaved,  ///< odd offsets locate, even offsets estimate
    Contiguous,   ///< first floor(m/2) points locate, the rest estimate
    Random,       ///< seeded shuffle, first floor(m/2) shuffled points locate
};

struct RumeConfig {
    double eta = 0.1;
    SplitRule split = SplitRule::Interleaved;
    std::uint64_t split_seed = 0;

    void validate() const {
        if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("rume config: eta must lie in (0, 1)");
    }
};

struct RumeResult {
    double estimate = 0.0;
    double lo = 0.0;             ///< selected interval [lo, hi]
    double hi = 0.0;
    std::size_t covered = 0;     ///< locating points inside the interval
    std::size_t required = 0;    ///< ceil((1 - eta) h)
    std::size_t locating = 0;    ///< h
    std::size_t used = 0;        ///< estimating points averaged (0 -> midpoint fallback)
};

namespace detail {

inline void split_halves(std::span<const double> data, const RumeConfig& cfg, std::vector<double>& locate,
                         std::vector<double>& estimate) {
    const std::size_t m = data.size();
    const std::size_t h = m / 2;
    locate.clear();
    estimate.clear();
    switch (cfg.split) {
    case SplitRule::Interleaved:
        for (std::size_t i = 0; i < m; ++i) (i % 2 == 1 ? locate : estimate).push_back(data[i]);
        break;
    case SplitRule::Contiguous:
        locate.assign(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(h));
        estimate.assign(data.begin() + static_cast<std::ptrdiff_t>(h), data.end());
        break;
    case SplitRule::Random: {
        std::vector<std::size_t> order(m);
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng(cfg.split_seed);
        for (std::size_t i = m; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        for (std::size_t i = 0; i < m; ++i) (i < h ? locate : estimate).push_back(data[order[i]]);
        break;
    }
    }
}

} // namespace detail

/// Full RUME computation with the selected interval. Requires at least 4
/// points and ceil((1 - eta) floor(m/2)) >= 1.
inline RumeResult rume_detail(std::span<const double> data, const RumeConfig& cfg) {
    cfg.validate();
    if (data.size() < 4) throw std::domain_error("rume_estimate: need at least 4 points");

    std::vector<double> locate, estimate;
    detail::split_halves(data, cfg, locate, estimate);
    std::sort(locate.begin(), locate.end());

    RumeResult r;
    r.locating = locate.size();
    r.required = static_cast<std::size_t>(std::ceil((1.0 - cfg.eta) * static_cast<double>(r.locating) - 1e-9));
    if (r.required == 0) throw std::domain_error("rume_estimate: interval would cover no points");

    // Shortest run of `required` consecutive order statistics, leftmost on ties.
    std::size_t best = 0;
    double best_width = locate[r.required - 1] - locate[0];
    for (std::size_t i = 1; i + r.required <= locate.size(); ++i) {
        const double width = locate[i + r.required - 1] - locate[i];
        if (width < best_width) {
            best_width = width;
            best = i;
        }
    }
    r.lo = locate[best];
    r.hi = locate[best + r.required - 1];
    r.covered = static_cast<std::size_t>(std::count_if(locate.begin(), locate.end(),
                                                       [&r](double x) { return x >= r.lo && x <= r.hi; }));

    double sum = 0.0;
    for (double x : estimate) {
        if (x >= r.lo && x <= r.hi) {
            sum += x;
            ++r.used;
        }
    }
    r.estimate = r.used > 0 ? sum / static_cast<double>(r.used) : r.lo + (r.hi - r.lo) / 2.0;
    return r;
}

inline double rume_estimate(std::span<const double> data, const RumeConfig& cfg) {
    return rume_detail(data, cfg).estimate;
}

/// |rume(j+1..j+w) - rume(j-w..j-1)| for every j. O(n w log w).
inline ScanTrace compute_arc_trace(const TimeSeries& series, std::size_t w, const RumeConfig& rume) {
    rume.validate();
    return compute_trace_with(series, w, [&rume](std::span<const double> win) { return rume_estimate(win, rume); });
}

/// cfg.alpha is unused by the shortest-interval estimator.
inline DetectionReport arc_detect(const TimeSeries& series, const DetectorConfig& cfg, const RumeConfig& rume) {
    cfg.validate();
    if (static_cast<double>(series.size()) <= 2.0 * cfg.lambda * static_cast<double>(cfg.w))
        throw std::domain_error("arc_detect: series too short for 2*lambda*w");
    return select_change_points(compute_arc_trace(series, cfg.w, rume), cfg, "arc");
}

} // namespace rccat
