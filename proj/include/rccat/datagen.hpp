#pragma once

// Seeded synthetic data: piecewise-constant means plus martingale-difference
// noise, then oblivious contamination that replaces at most a fraction eta of
// any window of length >= k0.

#include "rccat/detector.hpp"
#include "rccat/random.hpp"
#include "rccat/time_series.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

namespace rccat {

struct StudentTNoise {
    double df = 3.0;
};

struct GaussianNoise {
    double sigma = 1.0;
};

/// zeta_t = sigma_t e_t, sigma_t^2 = min(omega + a zeta_{t-1}^2, cap), e_t ~ N(0,1).
/// Conditionally mean-zero and dependent; the cap bounds the conditional
/// second moment by mu_t^2 + cap.
struct GarchNoise {
    double omega = 0.5;
    double a = 0.3;
    double cap = 4.0;
};

using NoiseModel = std::variant<StudentTNoise, GaussianNoise, GarchNoise>;

struct SignalSpec {
    std::size_t n = 1500;
    std::vector<std::size_t> tau;          ///< change locations, 1-based last index of each segment
    std::vector<double> segment_means{0.0};
    NoiseModel noise = StudentTNoise{};
    double mean_lo = -3.0;                 ///< declared range for the segment means
    double mean_hi = 3.0;

    void validate() const {
        if (n == 0) throw std::domain_error("signal spec: n must be positive");
        GroundTruth{n, tau, segment_means}.validate();
        for (double m : segment_means) {
            if (!std::isfinite(m) || m < mean_lo || m > mean_hi)
                throw std::domain_error("signal spec: segment mean " + std::to_string(m) + " outside declared range");
        }
        std::visit(
            [](const auto& noise) {
                using T = std::decay_t<decltype(noise)>;
                if constexpr (std::is_same_v<T, StudentTNoise>) {
                    if (!(noise.df > 0.0)) throw std::domain_error("signal spec: t noise needs df > 0");
                } else if constexpr (std::is_same_v<T, GaussianNoise>) {
                    if (!(noise.sigma >= 0.0)) throw std::domain_error("signal spec: gaussian sigma must be >= 0");
                } else {
                    if (!(noise.omega > 0.0 && noise.a >= 0.0 && noise.cap >= noise.omega))
                        throw std::domain_error("signal spec: garch needs omega > 0, a >= 0, cap >= omega");
                }
            },
            noise);
    }
};

struct SimulatedSignal {
    TimeSeries series;
    GroundTruth truth;
};

/// Deterministic in (spec, seed).
inline SimulatedSignal gen_signal(const SignalSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    std::vector<double> values(spec.n);

    std::size_t segment = 0;
    double prev_noise = 0.0;
    for (std::size_t t = 1; t <= spec.n; ++t) {
        while (segment < spec.tau.size() && t > spec.tau[segment]) ++segment;
        const double noise = std::visit(
            [&](const auto& model) -> double {
                using T = std::decay_t<decltype(model)>;
                if constexpr (std::is_same_v<T, StudentTNoise>) {
                    return rng.student_t(model.df);
                } else if constexpr (std::is_same_v<T, GaussianNoise>) {
                    return model.sigma == 0.0 ? 0.0 : model.sigma * rng.normal();
                } else {
                    const double var = std::min(model.omega + model.a * prev_noise * prev_noise, model.cap);
                    return std::sqrt(var) * rng.normal();
                }
            },
            spec.noise);
        prev_noise = noise;
        values[t - 1] = spec.segment_means[segment] + noise;
    }
    return {TimeSeries(std::move(values)), GroundTruth{spec.n, spec.tau, spec.segment_means}};
}

/// Scale-1 Pareto draws, used raw.
struct ParetoOutliers {
    double shape = 2.0;
};

struct FixedOutliers {
    double value = 100.0;
};

/// +value or -value on a fair coin.
struct SymmetricOutliers {
    double value = 100.0;
};

struct CustomOutliers {
    std::function<double(Rng&)> draw;
};

using OutlierModel = std::variant<ParetoOutliers, FixedOutliers, SymmetricOutliers, CustomOutliers>;

enum class Placement {
    Bernoulli,   ///< each position independently with probability eta
    BlockExact,  ///< exactly floor(eta * k0) positions in every consecutive k0-block
};

struct ContaminationSpec {
    double eta = 0.1;
    std::size_t k0 = 50;
    OutlierModel outliers = ParetoOutliers{};
    Placement placement = Placement::Bernoulli;

    void validate() const {
        if (!(eta >= 0.0 && eta < 1.0)) throw std::domain_error("contamination spec: eta must lie in [0, 1)");
        if (k0 == 0) throw std::domain_error("contamination spec: k0 must be positive");
        if (const auto* c = std::get_if<CustomOutliers>(&outliers); c && !c->draw)
            throw std::domain_error("contamination spec: custom outlier model without a generator");
    }

    /// Soft check: the window budget is meaningful for k0 of order log n.
    bool k0_too_small(std::size_t n) const { return static_cast<double>(k0) < std::log(static_cast<double>(n)); }
};

/// Outlier model of the three benchmark settings: 1 Pareto(2), 2 fixed at 100,
/// 3 fixed at +-100. Inliers are Student t(3) in all three.
inline OutlierModel setting_outliers(int setting) {
    switch (setting) {
    case 1: return ParetoOutliers{2.0};
    case 2: return FixedOutliers{100.0};
    case 3: return SymmetricOutliers{100.0};
    default: throw std::domain_error("unknown setting " + std::to_string(setting) + " (expected 1, 2 or 3)");
    }
}

struct ContaminatedSeries {
    TimeSeries series;
    std::vector<bool> mask;  ///< mask[t-1] is true iff observation t was replaced
};

/// Contamination is oblivious: placement and values ignore the data.
inline ContaminatedSeries apply_contamination(const TimeSeries& series, const ContaminationSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    const std::size_t n = series.size();
    std::vector<bool> mask(n, false);

    if (spec.placement == Placement::Bernoulli) {
        for (std::size_t i = 0; i < n; ++i) mask[i] = rng.bernoulli(spec.eta);
    } else {
        std::vector<std::size_t> slots;
        for (std::size_t start = 0; start < n; start += spec.k0) {
            const std::size_t len = std::min(spec.k0, n - start);
            const auto count = static_cast<std::size_t>(std::floor(spec.eta * static_cast<double>(len) + 1e-12));
            slots.resize(len);
            std::iota(slots.begin(), slots.end(), start);
            for (std::size_t i = 0; i < count; ++i) {
                const std::size_t pick = i + static_cast<std::size_t>(rng.below(len - i));
                std::swap(slots[i], slots[pick]);
                mask[slots[i]] = true;
            }
        }
    }

    std::vector<double> values(series.values().begin(), series.values().end());
    for (std::size_t i = 0; i < n; ++i) {
        if (!mask[i]) continue;
        values[i] = std::visit(
            [&rng](const auto& model) -> double {
                using T = std::decay_t<decltype(model)>;
                if constexpr (std::is_same_v<T, ParetoOutliers>) return rng.pareto(model.shape);
                else if constexpr (std::is_same_v<T, FixedOutliers>) return model.value;
                else if constexpr (std::is_same_v<T, SymmetricOutliers>) return rng.coin() ? model.value : -model.value;
                else return model.draw(rng);
            },
            spec.outliers);
    }
    return {TimeSeries(std::move(values), series.timestamps()), std::move(mask)};
}

struct BudgetCheck {
    bool pass = true;
    double sup_fraction = 0.0;   ///< max over checked windows of corrupted / length
    std::size_t worst_start = 0; ///< 1-based first position of the maximizing window (0 if none)
    std::size_t worst_length = 0;
};

struct BudgetOptions {
    double slack = 1.0;   ///< pass iff sup_fraction <= slack * eta
    bool aligned = false; ///< only windows starting on k0-block boundaries with lengths that are multiples of k0
};

/// Largest corrupted fraction over every window of length >= k0, via prefix counts.
/// O(n^2) windows in the unaligned mode.
inline BudgetCheck check_budget(const std::vector<bool>& mask, double eta, std::size_t k0, BudgetOptions opts = {}) {
    if (k0 == 0) throw std::domain_error("check_budget: k0 must be positive");
    const std::size_t n = mask.size();
    std::vector<std::size_t> prefix(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + (mask[i] ? 1 : 0);

    BudgetCheck r;
    const std::size_t step = opts.aligned ? k0 : 1;
    for (std::size_t len = k0; len <= n; len += step) {
        for (std::size_t start = 0; start + len <= n; start += step) {
            const double frac = static_cast<double>(prefix[start + len] - prefix[start]) / static_cast<double>(len);
            if (frac > r.sup_fraction) {
                r.sup_fraction = frac;
                r.worst_start = start + 1;
                r.worst_length = len;
            }
        }
    }
    r.pass = r.sup_fraction <= opts.slack * eta + 1e-12;
    return r;
}

} // namespace rccat
