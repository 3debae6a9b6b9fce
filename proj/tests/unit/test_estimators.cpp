#include "oracles.hpp"

#include <rccat/estimators.hpp>
#include <rccat/random.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace rccat;

namespace {

EstimatorConfig base_config() { return EstimatorConfig{kLn2, 10.0, std::nullopt, 0.1, 0.01, 2.0}; }

} // namespace

TEST(Psi, KnownValues) {
    EXPECT_DOUBLE_EQ(psi(1.0), std::log(2.0));
    EXPECT_DOUBLE_EQ(psi(0.0), 0.0);
    EXPECT_NEAR(psi(0.5), 0.470003629245735553, 1e-15);
    EXPECT_DOUBLE_EQ(psi(-0.5), -psi(0.5));
    EXPECT_DOUBLE_EQ(psi(1e6), kLn2);
    EXPECT_DOUBLE_EQ(psi(-1e6), -kLn2);
}

TEST(Psi, RejectsNonFinite) {
    EXPECT_THROW(psi(std::nan("")), std::domain_error);
    EXPECT_THROW(psi(INFINITY), std::domain_error);
}

TEST(Psi, SandwichOddMonotoneOnGrid) {
    double prev = -INFINITY;
    for (int i = 0; i <= 200000; ++i) {
        const double x = -10.0 + 20.0 * i / 200000.0;
        const double v = psi(x);
        EXPECT_LE(-std::log(1.0 - x + x * x / 2.0), v + 1e-15) << x;
        EXPECT_LE(v, std::log(1.0 + x + x * x / 2.0) + 1e-15) << x;
        ASSERT_LE(std::fabs(v), kLn2);
        ASSERT_EQ(psi(-x), -v);
        ASSERT_GE(v, prev);
        ASSERT_DOUBLE_EQ(v, oracle::psi(x));
        prev = v;
    }
}

TEST(Config, Validation) {
    EXPECT_NO_THROW(base_config().validate());
    auto bad = base_config();
    bad.M = 0;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = base_config();
    bad.eta = 1.0;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = base_config();
    bad.delta = 1.0;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = base_config();
    bad.B = 1.0;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = base_config();
    bad.V = 11.0;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = base_config();
    bad.eta = 0.0;
    EXPECT_NO_THROW(bad.validate());
}

TEST(SelectAlpha, Values) {
    const auto cfg = base_config();
    EXPECT_NEAR(select_alpha(cfg, 100), 5.10825959175840923, 1e-12);
    auto four = cfg;
    four.M *= 4;
    EXPECT_NEAR(select_alpha(four, 100), 2.0 * select_alpha(cfg, 100), 1e-12);
    const double limit = std::sqrt(cfg.M / (4.0 * cfg.A * cfg.eta));
    EXPECT_NEAR(select_alpha(cfg, 1'000'000'000), limit, 1e-6);
    EXPECT_THROW(select_alpha(cfg, 0), std::domain_error);
}

TEST(Catoni, Examples) {
    const std::vector<double> zeros(17, 0.0);
    EXPECT_EQ(catoni_estimate(zeros, 3.0), 0.0);
    const std::vector<double> tens{10, 10, 10, 10};
    EXPECT_DOUBLE_EQ(catoni_estimate(tens, 1.0), kLn2);
    EXPECT_THROW(catoni_estimate(std::vector<double>{}, 1.0), std::domain_error);
    EXPECT_THROW(catoni_estimate(tens, 0.0), std::domain_error);
}

TEST(Catoni, SinglePointInfluenceIsBounded) {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> x(50);
        for (double& v : x) v = rng.student_t(3.0);
        const double alpha = 0.5 + 5.0 * rng.uniform();
        const double before = catoni_estimate(x, alpha);
        x[rng.below(x.size())] = (rng.coin() ? 1 : -1) * 1e9;
        const double after = catoni_estimate(x, alpha);
        EXPECT_LE(std::fabs(after - before), 2.0 * alpha * kLn2 / 50.0 + 1e-12);
    }
}

TEST(Catoni, ShiftEquivarianceInTheLinearRegime) {
    // psi(x) ~ x for small x, so a huge alpha reduces to the sample mean.
    std::vector<double> x{1.0, 2.0, 3.5, -0.5};
    EXPECT_NEAR(catoni_estimate(x, 1e6), 1.5, 1e-6);
}

TEST(Catoni, CoverageMonteCarlo) {
    const EstimatorConfig cfg{kLn2, 3.0 + 4.0, std::nullopt, 0.0, 0.05, 2.0};
    const std::size_t n = 500;
    const auto bound = deviation_radius(cfg, n);
    int misses = 0;
    for (std::uint64_t trial = 0; trial < 400; ++trial) {
        Rng rng(derive_seed(99, {trial}));
        std::vector<double> x(n);
        for (double& v : x) v = 2.0 + rng.student_t(3.0);
        if (std::fabs(catoni_estimate(x, bound.alpha_used) - 2.0) > bound.radius) ++misses;
    }
    EXPECT_LE(misses, 20);
}

TEST(DeviationRadius, Values) {
    const auto cfg = base_config();
    const auto b = deviation_radius(cfg, 100);
    EXPECT_NEAR(b.radius, 1.95761390359523871, 1e-12);
    EXPECT_DOUBLE_EQ(b.confidence, 1.0 - cfg.delta);
    EXPECT_DOUBLE_EQ(b.alpha_used, select_alpha(cfg, 100));
    auto twice = cfg;
    twice.M *= 2;
    EXPECT_NEAR(deviation_radius(twice, 100).radius, std::sqrt(2.0) * b.radius, 1e-12);
    auto clean = cfg;
    clean.eta = 0.0;
    EXPECT_LT(deviation_radius(clean, 10'000'000'000ULL).radius, 1e-3);
}

TEST(Bias, Values) {
    const auto cfg = base_config();
    EXPECT_NEAR(bias_constant(cfg), 1.86164870552951707, 1e-12);
    EXPECT_NEAR(asymptotic_bias(cfg), 1.86164870552951707, 1e-12);
    auto clean = cfg;
    clean.eta = 0.0;
    EXPECT_EQ(asymptotic_bias(clean), 0.0);
    EXPECT_GT(bias_min_samples(cfg), 0.0);
}

TEST(ShiftingDevice, RadiusValue) {
    auto cfg = base_config();
    cfg.eta = 0.05;
    EXPECT_NEAR(shift_radius(cfg, 100), 1.60766516120163748, 1e-12);
}

TEST(ShiftingDevice, ConstantDataWithinRadius) {
    auto cfg = base_config();
    cfg.V = 1.0;
    const std::vector<double> x(200, 0.7);
    const double est = shifting_device_estimate(x, cfg, 100);
    EXPECT_LE(std::fabs(est - 0.7), shifted_deviation_radius(cfg, 200, 100).radius);
}

TEST(ShiftingDevice, ShrinksWithN) {
    EstimatorConfig cfg{kLn2, 4.0, 3.0, 0.0, 0.01, 2.0};
    Rng rng(5);
    std::vector<double> x(200'000);
    for (double& v : x) v = rng.student_t(3.0);
    EXPECT_LT(std::fabs(shifting_device_estimate(x, cfg)), 0.05);
    EXPECT_LT(shifted_deviation_radius(cfg, 200'000, 100'000).radius, shifted_deviation_radius(cfg, 2'000, 1'000).radius);
}

TEST(ShiftingDevice, Errors) {
    auto cfg = base_config();
    const std::vector<double> x(10, 1.0);
    EXPECT_THROW(shifting_device_estimate(x, cfg, 5), ConfigError);
    cfg.V = 1.0;
    EXPECT_THROW(shifting_device_estimate(x, cfg, 0), std::domain_error);
    EXPECT_THROW(shifting_device_estimate(x, cfg, 10), std::domain_error);
}

TEST(Huber, Values) {
    EXPECT_NEAR(huber_to_eta(0.1, 0.1, 1000, 200).eta, 0.215994520600049288, 1e-12);
    EXPECT_EQ(huber_to_eta(0.0, 0.3, 50, 7).eta, 0.0);
    EXPECT_NEAR(huber_to_eta(0.1, 0.1, 1000, 100'000'000).eta, 0.1, 1e-3);
}

TEST(Huber, ClampAndErrors) {
    const auto r = huber_to_eta(0.5, 0.1, 1000, 2);
    EXPECT_TRUE(r.clamped);
    EXPECT_EQ(r.eta, kMaxEta);
    EXPECT_THROW(huber_to_eta(0.5, 0.1, 1000, 2, true), std::domain_error);
    EXPECT_THROW(huber_to_eta(0.1, 0.1, 1000, 1), std::domain_error);
    EXPECT_THROW(huber_to_eta(0.1, 0.1, 1, 10), std::domain_error);
    EXPECT_THROW(huber_to_eta(1.5, 0.1, 1000, 10), std::domain_error);
    EXPECT_THROW(huber_to_eta(0.1, 1.0, 1000, 10), std::domain_error);
}
