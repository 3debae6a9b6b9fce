#pragma once

// Portable seeded randomness. The engine is std::mt19937_64, whose output
// sequence the standard fixes; every variate below is derived from raw engine
// output by explicit formulas so streams are identical across standard
// libraries (std::*_distribution is implementation-defined).

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <stdexcept>

namespace rccat {

/// SplitMix64 finaliser.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Counter-based stream derivation: seed = fold of splitmix64 over
/// (master, c1, c2, ...). Distinct counter tuples give independent streams
/// that can each be regenerated on their own.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> counters) noexcept {
    std::uint64_t s = splitmix64(master);
    for (std::uint64_t c : counters) s = splitmix64(s ^ splitmix64(c + 0x632BE59BD9B4E019ULL));
    return s;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1].
    double uniform_open0() { return 1.0 - uniform(); }

    /// Uniform integer in [0, bound) by rejection (no modulo bias).
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw std::domain_error("Rng::below: zero bound");
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t x;
        do x = engine_(); while (x >= limit);
        return x % bound;
    }

    bool coin() { return (engine_() >> 63) != 0; }

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal, Box-Muller with the second variate cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_open0()));
        const double theta = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    /// Gamma(shape, 1), Marsaglia-Tsang; shape < 1 boosted via U^(1/shape).
    double gamma(double shape) {
        if (!(shape > 0.0)) throw std::domain_error("Rng::gamma: shape must be positive");
        if (shape < 1.0) return gamma(shape + 1.0) * std::pow(uniform_open0(), 1.0 / shape);
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_open0();
            if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
        }
    }

    /// Student t with `df` degrees of freedom: Z / sqrt(G / df), G ~ chi^2(df).
    double student_t(double df) {
        if (!(df > 0.0)) throw std::domain_error("Rng::student_t: df must be positive");
        const double z = normal();
        const double g = 2.0 * gamma(df / 2.0);
        return z / std::sqrt(g / df);
    }

    /// Pareto with scale 1: U^(-1/shape), support [1, inf).
    double pareto(double shape) {
        if (!(shape > 0.0)) throw std::domain_error("Rng::pareto: shape must be positive");
        return std::pow(uniform_open0(), -1.0 / shape);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace rccat
