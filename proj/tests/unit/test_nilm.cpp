#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "srp/metrics.hpp"
#include "srp/nilm.hpp"
#include "support/oracles.hpp"
#include "support/test_util.hpp"

namespace nilm = srp::nilm;
using srp::Domain;
using srp::ErrorCode;
using srp::TimeSeries;
using testutil::code_of;

namespace {

nilm::FeatureVector point(std::vector<double> v, int label) { return {std::move(v), label}; }

TimeSeries tone(double fs, double seconds, std::vector<std::pair<double, double>> harmonics, double offset = 1.0) {
    const auto n = static_cast<std::size_t>(std::lround(fs * seconds));
    std::vector<double> v(n);
    for (std::size_t t = 0; t < n; ++t) {
        v[t] = offset;
        for (auto [f, a] : harmonics) v[t] += a * std::sin(2.0 * std::numbers::pi * f * static_cast<double>(t) / fs);
    }
    return {std::move(v), fs};
}

nilm::Samples blobs(std::size_t n, std::uint64_t seed, double sep) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    nilm::Samples out;
    for (std::size_t i = 0; i < n; ++i) {
        const int label = static_cast<int>(i % 2);
        const double c = label == 0 ? -sep : sep;
        out.push_back(point({c + g(rng), c + g(rng), g(rng)}, label));
    }
    return out;
}

std::vector<int> labels_of(const nilm::Samples& s) {
    std::vector<int> y;
    for (const auto& f : s) y.push_back(f.label);
    return y;
}

}  // namespace

TEST(Featurize, ZeroWindowGivesZeros) {
    const auto f = nilm::featurize(TimeSeries(std::vector<double>(400, 0.0), 1000.0), 32);
    ASSERT_EQ(f.values.size(), 32U);
    for (double v : f.values) EXPECT_EQ(v, 0.0);
}

TEST(Featurize, ScaleInvariant) {
    const TimeSeries w = tone(1000.0, 0.4, {{50.0, 0.5}, {150.0, 0.2}});
    const auto base = nilm::featurize(w, 32);
    for (double c : {2.0, 1e-3, 7.5e4, -3.0}) {
        std::vector<double> scaled = w.values();
        for (double& v : scaled) v *= c;
        const auto f = nilm::featurize(TimeSeries(scaled, 1000.0), 32);
        for (std::size_t i = 0; i < base.values.size(); ++i) EXPECT_NEAR(f.values[i], base.values[i], 1e-12) << c;
    }
}

TEST(Featurize, PureMainsToneHasFundamentalMaximum) {
    const auto f = nilm::featurize(tone(1000.0, 0.4, {{50.0, 1.0}}, 0.0), 32);
    const auto spectral = std::vector<double>(f.values.begin() + 16, f.values.end());
    EXPECT_EQ(std::max_element(spectral.begin(), spectral.end()) - spectral.begin(), 0);
    EXPECT_DOUBLE_EQ(spectral[0], 1.0);
    for (std::size_t k = 1; k < spectral.size(); ++k) EXPECT_LT(spectral[k], 1e-9);
}

TEST(Featurize, OddHarmonicRatiosMatchDft) {
    const TimeSeries w = tone(1000.0, 0.4, {{50.0, 0.8}, {100.0, 0.4}, {150.0, 0.3}, {250.0, 0.1}});
    const auto f = nilm::featurize(w, 32);
    const double fund = oracle::dft_magnitude(w.values(), 50.0, 1000.0);
    for (int k = 1; k <= 5; ++k) {
        EXPECT_NEAR(f.values[15 + static_cast<std::size_t>(k)],
                    oracle::dft_magnitude(w.values(), 50.0 * (2 * k - 1), 1000.0) / fund, 1e-9)
            << k;
    }
    EXPECT_NEAR(f.values[17], 0.3 / 0.8, 1e-9);  // the 100 Hz component is not a feature
    for (std::size_t k = 6; k <= 16; ++k) EXPECT_EQ(f.values[15 + k], 0.0);  // at or above Nyquist
}

TEST(Featurize, SampleBlockMeansAndErrors) {
    const TimeSeries w({1, 1, 2, 2, 3, 3, 4, 4}, 8.0);
    const auto f = nilm::featurize(w, 8);
    EXPECT_EQ(std::vector<double>(f.values.begin(), f.values.begin() + 4), (std::vector<double>{0.25, 0.5, 0.75, 1.0}));
    EXPECT_EQ(code_of([&] { nilm::featurize(w, 18); }), ErrorCode::TooShort);
    EXPECT_EQ(code_of([&] { nilm::featurize(w, 5); }), ErrorCode::InvalidArgument);
}

TEST(Knn, TrainingPointAndUniformLabels) {
    const nilm::Samples train{point({0, 0}, 2), point({1, 0}, 0), point({5, 5}, 1)};
    nilm::Knn one(1);
    one.fit(train);
    for (const auto& p : train) EXPECT_EQ(one.predict(p.values), p.label);
    const nilm::Samples same{point({0, 0}, 4), point({3, 1}, 4), point({9, 9}, 4)};
    nilm::Knn all(3);
    all.fit(same);
    EXPECT_EQ(all.predict({100, -3}), 4);
}

TEST(Knn, ToySetMatchesExhaustiveVote) {
    const nilm::Samples train{point({0, 0}, 0), point({1, 0}, 0), point({0, 1}, 1),
                              point({3, 3}, 1), point({4, 3}, 2), point({3, 4}, 2)};
    nilm::Knn knn(3);
    knn.fit(train);
    for (double x = -1.0; x <= 5.0; x += 0.5) {
        for (double y = -1.0; y <= 5.0; y += 0.5) {
            std::vector<std::pair<double, int>> d;
            for (const auto& p : train) d.emplace_back(std::hypot(p.values[0] - x, p.values[1] - y), p.label);
            std::stable_sort(d.begin(), d.end(), [](auto& a, auto& b) { return a.first < b.first; });
            std::vector<int> votes(3, 0);
            std::vector<double> sum(3, 0.0);
            for (int i = 0; i < 3; ++i) {
                ++votes[static_cast<std::size_t>(d[static_cast<std::size_t>(i)].second)];
                sum[static_cast<std::size_t>(d[static_cast<std::size_t>(i)].second)] += d[static_cast<std::size_t>(i)].first;
            }
            int best = 0;
            for (int c = 1; c < 3; ++c) {
                const auto uc = static_cast<std::size_t>(c), ub = static_cast<std::size_t>(best);
                if (votes[uc] > votes[ub] || (votes[uc] == votes[ub] && sum[uc] < sum[ub])) best = c;
            }
            // Skip queries where the third neighbour is ambiguous.
            if (std::abs(d[2].first - d[3].first) < 1e-12) continue;
            EXPECT_EQ(knn.predict({x, y}), best) << x << "," << y;
        }
    }
}

TEST(Knn, TieBreaking) {
    nilm::Knn knn(2);
    knn.fit({point({0.0}, 1), point({3.0}, 0)});
    EXPECT_EQ(knn.predict({1.0}), 1);  // nearer summed distance
    EXPECT_EQ(knn.predict({1.5}), 0);  // full tie goes to the lowest label
    EXPECT_EQ(code_of([] { nilm::Knn(1).fit({}); }), ErrorCode::EmptyTrainingSet);
    EXPECT_EQ(code_of([] { (void)nilm::Knn(1).predict({0.0}); }), ErrorCode::EmptyTrainingSet);
}

TEST(Tree, SeparableOneDimensionalNeedsOneSplit) {
    const nilm::Samples train{point({0.1}, 0), point({0.4}, 0), point({0.5}, 0), point({2.0}, 1), point({3.0}, 1)};
    nilm::DecisionTree tree({.max_depth = 1});
    tree.fit(train);
    EXPECT_EQ(tree.depth(), 1);
    EXPECT_EQ(tree.nodes()[0].threshold, 1.25);
    EXPECT_EQ(srp::metrics::accuracy(tree.predict_all(train), labels_of(train)), 1.0);
}

TEST(Tree, PureLabelsGiveSingleLeaf) {
    nilm::DecisionTree tree;
    tree.fit({point({1, 2}, 3), point({4, 0}, 3), point({-1, 7}, 3)});
    ASSERT_EQ(tree.nodes().size(), 1U);
    EXPECT_EQ(tree.nodes()[0].feature, -1);
    EXPECT_EQ(tree.predict({0, 0}), 3);
}

TEST(Tree, RootSplitMatchesExhaustiveGini) {
    const std::vector<std::vector<double>> X{{2.0, 7.0}, {1.0, 3.0}, {4.0, 1.0}, {3.5, 6.0},
                                             {0.5, 2.0}, {5.0, 5.5}, {2.5, 0.5}, {4.5, 4.0}};
    const std::vector<int> y{0, 0, 1, 2, 0, 2, 1, 1};
    nilm::Samples train;
    for (std::size_t i = 0; i < X.size(); ++i) train.push_back(point(X[i], y[i]));
    nilm::DecisionTree tree;
    tree.fit(train);
    const auto ref = oracle::exhaustive_gini_split(X, y, 3);
    EXPECT_EQ(tree.nodes()[0].feature, ref.feature);
    EXPECT_DOUBLE_EQ(tree.nodes()[0].threshold, ref.threshold);
    EXPECT_EQ(srp::metrics::accuracy(tree.predict_all(train), y), 1.0);
}

TEST(Tree, DepthAndLeafLimits) {
    const auto train = blobs(60, 4, 0.3);
    nilm::DecisionTree shallow({.max_depth = 2});
    shallow.fit(train);
    EXPECT_LE(shallow.depth(), 2);
    nilm::DecisionTree coarse({.max_depth = 10, .min_leaf = 30});
    coarse.fit(train);
    EXPECT_LE(coarse.nodes().size(), 3U);
    EXPECT_EQ(code_of([] { nilm::DecisionTree().fit({}); }), ErrorCode::EmptyTrainingSet);
}

TEST(Svm, SeparatesGaussianBlobs) {
    nilm::LinearSvm svm;
    svm.fit(blobs(200, 5, 2.5));
    const auto test = blobs(400, 6, 2.5);
    EXPECT_GE(srp::metrics::accuracy(svm.predict_all(test), labels_of(test)), 0.95);
}

TEST(Svm, InvariantToDuplicatingTrainingSet) {
    const auto train = blobs(80, 7, 1.0);
    nilm::Samples doubled = train;
    doubled.insert(doubled.end(), train.begin(), train.end());
    nilm::LinearSvm a, b;
    a.fit(train);
    b.fit(doubled);
    const auto grid = blobs(300, 8, 1.0);
    EXPECT_EQ(a.predict_all(grid), b.predict_all(grid));
    for (std::size_t c = 0; c < a.weights().size(); ++c) {
        for (std::size_t j = 0; j < a.weights()[c].size(); ++j) {
            EXPECT_NEAR(a.weights()[c][j], b.weights()[c][j], 1e-9);
        }
    }
}

TEST(Svm, DeterministicAndNeedsTwoClasses) {
    const auto train = blobs(50, 9, 1.0);
    nilm::LinearSvm a, b;
    a.fit(train);
    b.fit(train);
    EXPECT_EQ(a.weights(), b.weights());
    EXPECT_EQ(a.biases(), b.biases());
    EXPECT_EQ(code_of([] { nilm::LinearSvm().fit({point({1.0}, 0), point({2.0}, 0)}); }), ErrorCode::SingleClass);
}

TEST(ActivationSet, BalancedDeterministicAndPaired) {
    nilm::ActivationConfig cfg;
    cfg.n_train = 33;
    cfg.n_test = 22;
    cfg.f_high_hz = 1000.0;
    cfg.seed = 4;
    const auto a = nilm::build_activation_set(cfg);
    const auto b = nilm::build_activation_set(cfg);
    ASSERT_EQ(a.train.size(), 33U);
    ASSERT_EQ(a.test.size(), 22U);
    std::vector<int> counts(a.vocabulary.size(), 0);
    for (const auto& x : a.train) ++counts[static_cast<std::size_t>(x.label)];
    for (int c : counts) EXPECT_EQ(c, 3);
    for (std::size_t i = 0; i < a.test.size(); ++i) {
        EXPECT_EQ(a.test[i].high_res, b.test[i].high_res);
        EXPECT_EQ(a.test[i].low_res, b.test[i].low_res);
        EXPECT_EQ(a.test[i].high_res.size(), 2000U);
        EXPECT_EQ(a.test[i].low_res.size(), 200U);
        EXPECT_EQ(a.test[i].high_res.domain(), Domain::Preprocessed);
    }
}

namespace {

// Two appliance classes that differ in their third harmonic only.
nilm::ActivationSet separable_set() {
    nilm::ActivationSet set;
    set.vocabulary = {"plain", "distorted"};
    for (int i = 0; i < 20; ++i) {
        const int label = i % 2;
        const double level = 0.5 + 0.05 * i;
        const TimeSeries raw = tone(1000.0, 1.0, {{50.0, 0.3 * level}, {150.0, label == 1 ? 0.2 * level : 0.0}}, level);
        const TimeSeries high = srp::preprocess(raw);
        const TimeSeries low = srp::degrade(high, {.alpha = 10});
        (i < 12 ? set.train : set.test).push_back({high, low, label});
    }
    return set;
}

}  // namespace

TEST(Protocol, SeparableCatalogIsPerfectOnHighRes) {
    const auto set = separable_set();
    for (auto kind : {nilm::ClassifierKind::Knn, nilm::ClassifierKind::DecisionTree, nilm::ClassifierKind::Svm}) {
        nilm::ProtocolOptions opts;
        opts.classifiers.knn_k = 1;
        const nilm::NilmProtocol p{.train_source = nilm::Source::HF, .test_source = nilm::Source::HF, .classifier = kind};
        EXPECT_EQ(nilm::run_protocol(set, nullptr, p, opts), 1.0) << nilm::to_string(kind);
    }
}

TEST(Protocol, SameSourcesAndDataGiveResubstitutionAccuracy) {
    auto set = nilm::build_activation_set({.n_train = 44, .n_test = 11, .seed = 2});
    set.test = set.train;
    const nilm::ProtocolOptions opts;
    nilm::Samples features;
    for (const auto& x : set.train) {
        auto f = nilm::featurize(srp::inverse_preprocess(x.low_res), opts.feature_dim, opts.mains_hz);
        f.label = x.label;
        features.push_back(f);
    }
    auto clf = nilm::make_classifier(nilm::ClassifierKind::Knn, opts.classifiers);
    clf->fit(features);
    const double resub = srp::metrics::accuracy(clf->predict_all(features), labels_of(features));
    const nilm::NilmProtocol p{.train_source = nilm::Source::LF, .test_source = nilm::Source::LF};
    EXPECT_EQ(nilm::run_protocol(set, nullptr, p, opts), resub);
}

TEST(Protocol, SrpWithoutModelIsMissingArtifact) {
    const auto set = separable_set();
    const nilm::NilmProtocol p{.train_source = nilm::Source::HF, .test_source = nilm::Source::SRP};
    EXPECT_EQ(code_of([&] { nilm::run_protocol(set, nullptr, p); }), ErrorCode::MissingArtifact);
}

TEST(Protocol, RowGainAndDeterminism) {
    const auto set = separable_set();
    const srp::nn::SrpModel model({.alpha = 10, .n_blocks = 1, .channels = 2}, 3);
    const nilm::ProtocolOptions opts;
    const auto features = nilm::compute_source_features(set, &model, opts);
    const auto row = nilm::run_row(features, nilm::ClassifierKind::Svm, 100.0, 10, opts);
    EXPECT_EQ(row.method, "svm");
    EXPECT_DOUBLE_EQ(row.gain(), row.hf_srp - row.lf_lf);
    const auto again = nilm::run_row(nilm::compute_source_features(set, &model, opts), nilm::ClassifierKind::Svm,
                                     100.0, 10, opts);
    EXPECT_EQ(row.lf_lf, again.lf_lf);
    EXPECT_EQ(row.hf_srp, again.hf_srp);
    EXPECT_EQ(row.hf_hf, again.hf_hf);
}
