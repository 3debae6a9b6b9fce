#pragma once

#include "rccat/detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace rccat {

struct ScoredIndex {
    std::size_t index = 0;
    double score = 0.0;
};

struct DetectionError {
    double error = 0.0;
    bool count_mismatch = false;  ///< fewer top-k candidates than K, or unequal counts in matched mode
    std::size_t missing = 0;      ///< truths left unpaired in top-k mode
};

/// The k highest-scoring indices (ties to the lower index), returned ascending.
inline std::vector<std::size_t> top_k(std::span<const ScoredIndex> candidates, std::size_t k) {
    std::vector<ScoredIndex> sorted(candidates.begin(), candidates.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const ScoredIndex& a, const ScoredIndex& b) {
        return a.score != b.score ? a.score > b.score : a.index < b.index;
    });
    if (sorted.size() > k) sorted.resize(k);
    std::vector<std::size_t> out;
    out.reserve(sorted.size());
    for (const auto& c : sorted) out.push_back(c.index);
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<ScoredIndex> scored_candidates(const DetectionReport& report) {
    std::vector<ScoredIndex> out;
    out.reserve(report.candidates.size());
    for (std::size_t j : report.candidates) out.push_back({j, report.trace.score(j)});
    return out;
}

namespace detail {

inline double gap(std::size_t a, std::size_t b) { return a > b ? double(a - b) : double(b - a); }

// Minimum-cost order-preserving pairing of every detected index with a
// distinct truth (detected.size() <= truth.size()); returns the summed gap.
inline double ordered_pairing_cost(const std::vector<std::size_t>& detected, const std::vector<std::size_t>& truth) {
    const std::size_t d = detected.size(), k = truth.size();
    const double inf = std::numeric_limits<double>::infinity();
    // cost[i][j]: first i detections paired within the first j truths.
    std::vector<std::vector<double>> cost(d + 1, std::vector<double>(k + 1, inf));
    for (std::size_t j = 0; j <= k; ++j) cost[0][j] = 0.0;
    for (std::size_t i = 1; i <= d; ++i)
        for (std::size_t j = i; j <= k; ++j)
            cost[i][j] = std::min(cost[i][j - 1], cost[i - 1][j - 1] + gap(detected[i - 1], truth[j - 1]));
    return cost[d][k];
}

} // namespace detail

/// Benchmark error: the K = |truth| highest-scoring candidates, sorted and
/// paired with the sorted truth, averaged |detected - true|. Each truth left
/// without a candidate adds n/K and flags the result.
inline DetectionError detection_error_topk(std::span<const ScoredIndex> candidates, std::vector<std::size_t> truth,
                                           std::size_t n) {
    if (truth.empty()) throw std::domain_error("detection_error: top-k mode needs a non-empty truth");
    std::sort(truth.begin(), truth.end());
    const std::size_t k = truth.size();
    const std::vector<std::size_t> chosen = top_k(candidates, k);

    DetectionError r;
    r.missing = k - chosen.size();
    r.count_mismatch = r.missing > 0;
    const double penalty = static_cast<double>(n) / static_cast<double>(k);
    r.error = (detail::ordered_pairing_cost(chosen, truth) + static_cast<double>(r.missing) * penalty) /
              static_cast<double>(k);
    return r;
}

inline DetectionError detection_error_topk(const DetectionReport& report, const std::vector<std::size_t>& truth) {
    const auto scored = scored_candidates(report);
    return detection_error_topk(scored, truth, report.trace.series_length());
}

/// Equal counts: mean gap of the i-th sorted detection to the i-th sorted truth.
/// Otherwise the Hausdorff distance between the two sets with the mismatch
/// flag set (+inf when exactly one set is empty).
inline DetectionError detection_error_matched(std::vector<std::size_t> detected, std::vector<std::size_t> truth) {
    std::sort(detected.begin(), detected.end());
    std::sort(truth.begin(), truth.end());
    DetectionError r;
    if (detected.size() == truth.size()) {
        if (truth.empty()) return r;
        double sum = 0.0;
        for (std::size_t i = 0; i < truth.size(); ++i) sum += detail::gap(detected[i], truth[i]);
        r.error = sum / static_cast<double>(truth.size());
        return r;
    }
    r.count_mismatch = true;
    if (detected.empty() || truth.empty()) {
        r.error = std::numeric_limits<double>::infinity();
        return r;
    }
    auto directed = [](const std::vector<std::size_t>& from, const std::vector<std::size_t>& to) {
        double worst = 0.0;
        for (std::size_t a : from) {
            double nearest = std::numeric_limits<double>::infinity();
            for (std::size_t b : to) nearest = std::min(nearest, detail::gap(a, b));
            worst = std::max(worst, nearest);
        }
        return worst;
    };
    r.error = std::max(directed(detected, truth), directed(truth, detected));
    return r;
}

} // namespace rccat
