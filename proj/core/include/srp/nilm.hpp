#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "srp/datagen.hpp"
#include "srp/signal.hpp"
#include "srp/srpnet.hpp"

namespace srp::nilm {

struct FeatureVector {
    std::vector<double> values;
    int label = -1;
};

/// dim/2 segment means normalized by their signed max-abs value, followed by
/// dim/2 DFT magnitudes at the odd mains harmonics (2k-1)*f0, k = 1..dim/2,
/// normalized by the fundamental. Harmonics at or above Nyquist are zero.
FeatureVector featurize(const TimeSeries& window, std::size_t dim, double mains_hz = 50.0);

using Samples = std::vector<FeatureVector>;

class Classifier {
public:
    virtual ~Classifier() = default;
    virtual void fit(const Samples& train) = 0;
    [[nodiscard]] virtual int predict(const std::vector<double>& x) const = 0;
    [[nodiscard]] virtual std::string_view name() const noexcept = 0;

    [[nodiscard]] std::vector<int> predict_all(const Samples& xs) const;
};

/// Majority vote among the k nearest (Euclidean) neighbours. Ties go to the
/// label with the smallest summed distance, then the lowest label index.
class Knn final : public Classifier {
public:
    explicit Knn(int k = 5);
    void fit(const Samples& train) override;
    [[nodiscard]] int predict(const std::vector<double>& x) const override;
    [[nodiscard]] std::string_view name() const noexcept override { return "knn"; }

private:
    int k_;
    Samples train_;
};

struct TreeConfig {
    int max_depth = 10;
    int min_leaf = 1;
};

/// CART with Gini impurity and axis-aligned thresholds at midpoints between
/// consecutive distinct values. Equal-impurity splits resolve to the lowest
/// feature index, then the lowest threshold.
class DecisionTree final : public Classifier {
public:
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        int left = -1, right = -1;
        int label = 0;
    };

    explicit DecisionTree(TreeConfig cfg = {});
    void fit(const Samples& train) override;
    [[nodiscard]] int predict(const std::vector<double>& x) const override;
    [[nodiscard]] std::string_view name() const noexcept override { return "decision_tree"; }

    [[nodiscard]] const std::vector<Node>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] int depth() const;

private:
    int build(const Samples& train, std::vector<std::size_t>& idx, int depth);

    TreeConfig cfg_;
    int n_classes_ = 0;
    std::vector<Node> nodes_;
};

struct SvmConfig {
    double lambda = 1e-3;
    int iterations = 400;
};

/// One-vs-rest linear SVM on standardized features. Each margin minimizes
/// lambda/2 |w|^2 + mean hinge loss by full-batch sub-gradient descent with
/// step 1/(lambda t), so the fit is deterministic.
class LinearSvm final : public Classifier {
public:
    explicit LinearSvm(SvmConfig cfg = {});
    void fit(const Samples& train) override;
    [[nodiscard]] int predict(const std::vector<double>& x) const override;
    [[nodiscard]] std::string_view name() const noexcept override { return "svm"; }

    [[nodiscard]] const std::vector<std::vector<double>>& weights() const noexcept { return w_; }
    [[nodiscard]] const std::vector<double>& biases() const noexcept { return b_; }

private:
    [[nodiscard]] std::vector<double> standardize(const std::vector<double>& x) const;

    SvmConfig cfg_;
    std::vector<double> mean_, scale_;
    std::vector<std::vector<double>> w_;
    std::vector<double> b_;
};

enum class ClassifierKind { Knn, DecisionTree, Svm };
std::string_view to_string(ClassifierKind kind) noexcept;

struct ClassifierSettings {
    int knn_k = 5;
    TreeConfig tree{};
    SvmConfig svm{};
};

std::unique_ptr<Classifier> make_classifier(ClassifierKind kind, const ClassifierSettings& settings = {});

// ---------------------------------------------------------------------------
// Appliance-activation benchmark and the train/test source protocol.

struct ActivationConfig {
    std::size_t n_train = 330;
    std::size_t n_test = 220;
    double window_s = 2.0;
    double lead_s = 0.1;  // appliance switches on this long after the window starts
    double f_high_hz = 1000.0;
    DegradationSpec spec{.alpha = 10, .phase = 0, .noise_sigma = 0.01, .rng_seed = 0};
    std::uint64_t seed = 0;          // event sampling and noise
    std::uint64_t catalog_seed = 0;  // must match the SRP training dataset's seed
    int instances_per_type = 4;
    std::vector<std::string> types = datagen::default_types();
    datagen::SynthConfig synth{};
};

struct ActivationExample {
    TimeSeries high_res;  // preprocessed
    TimeSeries low_res;   // preprocessed, degraded
    int label = -1;
};

struct ActivationSet {
    std::vector<std::string> vocabulary;
    std::vector<ActivationExample> train, test;
};

/// One window per activation event; label cycles through the types so the
/// classes are balanced.
ActivationSet build_activation_set(const ActivationConfig& cfg);

enum class Source { LF, HF, SRP };
std::string_view to_string(Source source) noexcept;

struct NilmProtocol {
    Source train_source = Source::HF;
    Source test_source = Source::HF;
    ClassifierKind classifier = ClassifierKind::Knn;
    double f_low_hz = 100.0;
    int alpha = 10;
};

struct ProtocolOptions {
    std::size_t feature_dim = 32;
    double mains_hz = 50.0;
    ClassifierSettings classifiers{};
};

/// Feature matrices for every source, computed once and reused across protocols.
struct SourceFeatures {
    Samples lf_train, lf_test, hf_train, hf_test, srp_test;
    bool has_srp = false;
};

SourceFeatures compute_source_features(const ActivationSet& set, const nn::SrpModel* model,
                                       const ProtocolOptions& opts);

double run_protocol(const SourceFeatures& features, const NilmProtocol& protocol, const ProtocolOptions& opts);
double run_protocol(const ActivationSet& set, const nn::SrpModel* model, const NilmProtocol& protocol,
                    const ProtocolOptions& opts = {});

struct NilmRow {
    std::string method;
    double f_low_hz = 0.0;
    int alpha = 0;
    double lf_lf = 0.0;
    double hf_srp = 0.0;
    double hf_hf = 0.0;
    [[nodiscard]] double gain() const noexcept { return hf_srp - lf_lf; }
};

/// The three protocol columns for one classifier and setting.
NilmRow run_row(const SourceFeatures& features, ClassifierKind kind, double f_low_hz, int alpha,
                const ProtocolOptions& opts);

}  // namespace srp::nilm
