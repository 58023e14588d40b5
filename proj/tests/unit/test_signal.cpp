#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "srp/error.hpp"
#include "srp/signal.hpp"
#include "support/test_util.hpp"

using srp::DegradationSpec;
using srp::Domain;
using srp::ErrorCode;
using srp::TimeSeries;

namespace {

using testutil::code_of;

TimeSeries raw(std::vector<double> v, double fs = 1.0) { return TimeSeries(std::move(v), fs, Domain::Raw); }

}  // namespace

TEST(TimeSeries, RejectsEmptyAndNonPositiveRate) {
    EXPECT_EQ(code_of([] { TimeSeries({}, 1.0); }), ErrorCode::EmptyInput);
    EXPECT_EQ(code_of([] { TimeSeries({1.0}, 0.0); }), ErrorCode::InvalidArgument);
}

TEST(Preprocess, HandValues) {
    EXPECT_DOUBLE_EQ(srp::preprocess(raw({0.0}))[0], 0.0);
    EXPECT_NEAR(srp::preprocess(raw({0.099}))[0], 1.0, 1e-12);
    EXPECT_EQ(srp::preprocess(raw({0.0})).domain(), Domain::Preprocessed);
}

TEST(Preprocess, InverseHandValues) {
    const TimeSeries p({0.0, 1.0, 2.0}, 10.0, Domain::Preprocessed);
    const TimeSeries r = srp::inverse_preprocess(p);
    EXPECT_DOUBLE_EQ(r[0], 0.0);
    EXPECT_NEAR(r[1], 0.099, 1e-12);
    EXPECT_NEAR(r[2], 9.999, 1e-12);
    EXPECT_EQ(r.domain(), Domain::Raw);
    EXPECT_EQ(r.sample_rate_hz(), 10.0);
}

TEST(Preprocess, RoundTripOverDynamicRange) {
    for (double x : {1e-3, 1.0, 1e3, 1e6}) {
        const double back = srp::inverse_preprocess_value(srp::preprocess_value(x));
        EXPECT_LE(std::abs(back - x) / x, 1e-9) << x;
    }
}

TEST(Preprocess, StrictlyMonotone) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-9e-4, 1e6);
    for (int i = 0; i < 2000; ++i) {
        double a = u(rng), b = u(rng);
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        EXPECT_LT(srp::preprocess_value(a), srp::preprocess_value(b));
    }
}

TEST(Preprocess, RejectsCorruptRawPower) {
    EXPECT_EQ(code_of([] { srp::preprocess(raw({0.5, -0.001})); }), ErrorCode::NonPositiveArgument);
    EXPECT_EQ(code_of([] { srp::preprocess(raw({-2.0})); }), ErrorCode::NonPositiveArgument);
}

TEST(Preprocess, DomainTagsAreChecked) {
    const TimeSeries p({0.0}, 1.0, Domain::Preprocessed);
    EXPECT_EQ(code_of([&] { srp::preprocess(p); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { srp::inverse_preprocess(raw({0.0})); }), ErrorCode::InvalidArgument);
}

TEST(Degrade, PhaseZeroAndOne) {
    const TimeSeries h = raw({5, 6, 7, 8}, 4.0);
    const TimeSeries l0 = srp::degrade(h, {.alpha = 2, .phase = 0});
    const TimeSeries l1 = srp::degrade(h, {.alpha = 2, .phase = 1});
    EXPECT_EQ(l0.values(), (std::vector<double>{5, 7}));
    EXPECT_EQ(l1.values(), (std::vector<double>{6, 8}));
    EXPECT_DOUBLE_EQ(l0.sample_rate_hz(), 2.0);
}

TEST(Degrade, AlphaOneNoNoiseIsIdentity) {
    const TimeSeries h = raw({1.5, -0.25, 3.0});
    EXPECT_EQ(srp::degrade(h, {.alpha = 1}), h);
}

TEST(Degrade, NoiseStatistics) {
    const std::size_t n = 100000;
    const TimeSeries zeros(std::vector<double>(n, 0.0), 1.0, Domain::Preprocessed);
    const TimeSeries l = srp::degrade(zeros, {.alpha = 1, .noise_sigma = 0.01, .rng_seed = 42});
    const double mean = std::accumulate(l.values().begin(), l.values().end(), 0.0) / n;
    double sq = 0.0;
    for (double v : l.values()) sq += (v - mean) * (v - mean);
    const double sd = std::sqrt(sq / (n - 1));
    EXPECT_LE(std::abs(mean), 3.0 * 0.01 / std::sqrt(static_cast<double>(n)));
    EXPECT_LE(std::abs(sd - 0.01), 0.05 * 0.01);
}

TEST(Degrade, SameSeedBitIdenticalDifferentSeedDiffers) {
    const TimeSeries h(std::vector<double>(200, 1.0), 10.0, Domain::Preprocessed);
    const DegradationSpec a{.alpha = 10, .noise_sigma = 0.01, .rng_seed = 3};
    DegradationSpec b = a;
    b.rng_seed = 4;
    EXPECT_EQ(srp::degrade(h, a), srp::degrade(h, a));
    EXPECT_NE(srp::degrade(h, a), srp::degrade(h, b));
}

TEST(Degrade, CommutesWithPreprocessWithoutNoise) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    std::vector<double> v(60);
    for (auto& x : v) x = u(rng);
    const TimeSeries h = raw(v, 60.0);
    const DegradationSpec spec{.alpha = 3, .phase = 2};
    EXPECT_EQ(srp::degrade(srp::preprocess(h), spec), srp::preprocess(srp::degrade(h, spec)));
}

TEST(Degrade, Errors) {
    const TimeSeries h = raw({1, 2, 3, 4, 5});
    EXPECT_EQ(code_of([&] { srp::degrade(h, {.alpha = 2}); }), ErrorCode::LengthNotDivisible);
    EXPECT_EQ(code_of([&] { srp::degrade(h, {.alpha = 0}); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([&] { srp::degrade(h, {.alpha = 5, .phase = 5}); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([&] { srp::degrade(h, {.alpha = 1, .noise_sigma = -1.0}); }), ErrorCode::InvalidArgument);
}

TEST(Window, Offsets) {
    EXPECT_EQ(srp::window_offsets(10, 4, 3), (std::vector<std::size_t>{0, 3, 6}));
    EXPECT_EQ(srp::window_offsets(10, 4, 4), (std::vector<std::size_t>{0, 4}));
    EXPECT_EQ(srp::window_offsets(10, 10, 1), (std::vector<std::size_t>{0}));
}

TEST(Window, ContentsAndErrors) {
    std::vector<double> v(10);
    std::iota(v.begin(), v.end(), 0.0);
    const auto w = srp::window(raw(v, 5.0), 4, 3);
    ASSERT_EQ(w.size(), 3U);
    EXPECT_EQ(w[2].values(), (std::vector<double>{6, 7, 8, 9}));
    EXPECT_EQ(w[1].sample_rate_hz(), 5.0);
    EXPECT_EQ(code_of([&] { srp::window(raw(v), 11, 1); }), ErrorCode::WindowTooLong);
    EXPECT_EQ(code_of([&] { srp::window(raw(v), 0, 1); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([&] { srp::window(raw(v), 2, 0); }), ErrorCode::InvalidArgument);
}

TEST(Slice, BoundsChecked) {
    const TimeSeries s = raw({1, 2, 3, 4});
    EXPECT_EQ(srp::slice(s, 1, 2).values(), (std::vector<double>{2, 3}));
    EXPECT_THROW(srp::slice(s, 3, 2), srp::Error);
}
