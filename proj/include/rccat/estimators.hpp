#pragma once

// Influence-function (soft truncation) mean estimation under contamination.
//
// The influence function is the narrowest bounded choice satisfying
//
//     -log(1 - x + x^2/2) <= psi(x) <= log(1 + x + x^2/2),   |psi(x)| <= log 2,
//
// and the estimator of a window of observations is (alpha/n) * sum psi(x_i/alpha).
// The scale alpha trades truncation bias against sensitivity to heavy tails
// and to the adversarially corrupted fraction eta of the sample.

#include "rccat/errors.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rccat {

inline constexpr double kLn2 = std::numbers::ln2;

/// Theory constants shared by every bound in this header.
struct EstimatorConfig {
    double A = kLn2;              ///< bound on |psi|
    double M = 10.0;              ///< bound on the conditional second moment
    std::optional<double> V;      ///< bound on the conditional variance (shifting device only)
    double eta = 0.1;             ///< contamination rate
    double delta = 0.01;          ///< confidence parameter
    double B = 2.0;               ///< constant of the contamination-only bias bound

    /// Throws ConfigError when an invariant is violated. V <= M is required:
    /// the variance cannot exceed the raw second moment it is centred from.
    void validate() const {
        auto fail = [](const std::string& msg) { throw ConfigError("estimator config: " + msg); };
        if (!(A > 0.0) || !std::isfinite(A)) fail("A must be positive and finite");
        if (!(M > 0.0) || !std::isfinite(M)) fail("M must be positive and finite");
        if (!(eta >= 0.0 && eta < 1.0)) fail("eta must lie in [0, 1)");
        if (!(delta > 0.0 && delta < 1.0)) fail("delta must lie in (0, 1)");
        if (!(B > 1.0) || !std::isfinite(B)) fail("B must be greater than 1");
        if (V) {
            if (!(*V > 0.0) || !std::isfinite(*V)) fail("V must be positive and finite");
            if (*V > M) fail("V must not exceed M");
        }
    }
};

// eta = 0 is accepted by validate(): it is the uncontaminated limit every
// bound below is continuous in, and the coverage tests rely on it.

struct DeviationBound {
    double radius = 0.0;
    double confidence = 0.0;
    double alpha_used = 0.0;
};

/// psi(x): -log(1 - x + x^2/2) on [0, 1], log 2 beyond, odd extension for x < 0.
inline double psi(double x) {
    if (!std::isfinite(x)) throw std::domain_error("psi: non-finite argument");
    const double y = std::fabs(x);
    const double v = y >= 1.0 ? kLn2 : -std::log1p(-y + y * y / 2.0);
    return x < 0.0 ? -v : v;
}

namespace detail {

inline void require_positive_n(std::size_t n, const char* who) {
    if (n == 0) throw std::domain_error(std::string(who) + ": sample size must be positive");
}

// log(c/delta)/n + 2*A*eta, the quantity under every square root below.
inline double confidence_term(const EstimatorConfig& cfg, double log_conf, std::size_t n) {
    return log_conf / static_cast<double>(n) + 2.0 * cfg.A * cfg.eta;
}

} // namespace detail

/// Scale that balances the uncontaminated deviation M/(2 alpha) + alpha log(2/delta)/n
/// against the contamination bias 2 A eta alpha.
inline double select_alpha(const EstimatorConfig& cfg, std::size_t n) {
    cfg.validate();
    detail::require_positive_n(n, "select_alpha");
    const double s = detail::confidence_term(cfg, std::log(2.0 / cfg.delta), n);
    return std::sqrt(cfg.M / (2.0 * s));
}

/// (alpha/n) * sum psi(x_i/alpha). Throws std::domain_error on empty input or
/// non-positive alpha.
inline double catoni_estimate(std::span<const double> data, double alpha) {
    if (data.empty()) throw std::domain_error("catoni_estimate: empty input");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::domain_error("catoni_estimate: alpha must be positive");
    double sum = 0.0;
    for (double x : data) sum += psi(x / alpha);
    return alpha * sum / static_cast<double>(data.size());
}

/// Radius that |estimate - mu| stays within with probability 1 - delta when
/// alpha = select_alpha(cfg, n).
inline DeviationBound deviation_radius(const EstimatorConfig& cfg, std::size_t n) {
    cfg.validate();
    detail::require_positive_n(n, "deviation_radius");
    const double s = detail::confidence_term(cfg, std::log(2.0 / cfg.delta), n);
    return {std::sqrt(2.0 * cfg.M * s), 1.0 - cfg.delta, select_alpha(cfg, n)};
}

/// c0 = sqrt(2 A (1/B + 2)).
inline double bias_constant(const EstimatorConfig& cfg) {
    cfg.validate();
    return std::sqrt(2.0 * cfg.A * (1.0 / cfg.B + 2.0));
}

/// Contamination-only deviation level c0 * sqrt(M eta). Holds with probability
/// at least 1 - 2 exp(-(A eta / B) n) once n >= bias_min_samples(cfg).
inline double asymptotic_bias(const EstimatorConfig& cfg) {
    return bias_constant(cfg) * std::sqrt(cfg.M * cfg.eta);
}

/// (B / (A eta)) * log(2/delta): the sample size from which the radius
/// collapses to asymptotic_bias(). Infinite when eta = 0.
inline double bias_min_samples(const EstimatorConfig& cfg) {
    cfg.validate();
    return cfg.B / (cfg.A * cfg.eta) * std::log(2.0 / cfg.delta);
}

/// Deviation of the first-stage estimate built on k points at confidence
/// delta/2: sqrt(2 M (log(4/delta)/k + 2 A eta)).
inline double shift_radius(const EstimatorConfig& cfg, std::size_t k) {
    cfg.validate();
    detail::require_positive_n(k, "shift_radius");
    return std::sqrt(2.0 * cfg.M * detail::confidence_term(cfg, std::log(4.0 / cfg.delta), k));
}

/// Two-stage bound for the shifting-device estimator on n points, the first k
/// of which locate the shift. Requires cfg.V.
inline DeviationBound shifted_deviation_radius(const EstimatorConfig& cfg, std::size_t n, std::size_t k) {
    cfg.validate();
    if (!cfg.V) throw ConfigError("shifting device: variance bound V is required");
    if (k == 0 || k >= n) throw std::domain_error("shifting device: need 0 < k < n");
    const double theta = shift_radius(cfg, k);
    const double second_moment = *cfg.V + theta * theta;
    const double s = detail::confidence_term(cfg, std::log(4.0 / cfg.delta), n - k);
    return {std::sqrt(2.0 * second_moment * s), 1.0 - cfg.delta, std::sqrt(second_moment / (2.0 * s))};
}

/// Centred estimate: locate the mean on the first k points, re-estimate on the
/// remaining n - k points shifted by that location with a scale driven by the
/// variance bound, and add the shift back. k defaults to n/2.
inline double shifting_device_estimate(std::span<const double> data, const EstimatorConfig& cfg,
                                       std::optional<std::size_t> k = std::nullopt) {
    const std::size_t n = data.size();
    const std::size_t split = k.value_or(n / 2);
    if (split == 0 || split >= n) throw std::domain_error("shifting_device_estimate: need 0 < k < n");
    if (!cfg.V) throw ConfigError("shifting_device_estimate: variance bound V is required");

    EstimatorConfig half = cfg;
    half.delta = cfg.delta / 2.0;
    const double coarse_alpha = select_alpha(half, split);
    const double coarse = catoni_estimate(data.first(split), coarse_alpha);

    const double fine_alpha = shifted_deviation_radius(cfg, n, split).alpha_used;
    std::vector<double> shifted(data.begin() + static_cast<std::ptrdiff_t>(split), data.end());
    for (double& x : shifted) x -= coarse;
    return catoni_estimate(shifted, fine_alpha) + coarse;
}

struct HuberConversion {
    double eta = 0.0;
    bool clamped = false;
};

inline constexpr double kMaxEta = 1.0 - 1e-9;

/// Window-budget contamination rate implied by Huber contamination epsilon:
/// eta = eps + 1.7 sqrt(eps (1 - eps)) sqrt((log log 2n + 0.72 log(10.4 n / beta)) / k0),
/// valid with probability 1 - beta for every window of length >= k0.
/// Results above 1 are clamped to kMaxEta and flagged, or rejected when `strict`.
inline HuberConversion huber_to_eta(double epsilon, double beta, std::size_t n, std::size_t k0, bool strict = false) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::domain_error("huber_to_eta: epsilon must lie in [0, 1]");
    if (!(beta > 0.0 && beta < 1.0)) throw std::domain_error("huber_to_eta: beta must lie in (0, 1)");
    if (n < 2) throw std::domain_error("huber_to_eta: n must be at least 2");
    if (k0 < 2) throw std::domain_error("huber_to_eta: k0 must be at least 2");

    const double nd = static_cast<double>(n);
    const double tail = std::log(std::log(2.0 * nd)) + 0.72 * std::log(10.4 * nd / beta);
    const double eta =
        epsilon + 1.7 * std::sqrt(epsilon * (1.0 - epsilon)) * std::sqrt(tail / static_cast<double>(k0));
    if (eta <= kMaxEta) return {eta, false};
    if (strict) throw std::domain_error("huber_to_eta: implied eta exceeds 1");
    return {kMaxEta, true};
}

} // namespace rccat
