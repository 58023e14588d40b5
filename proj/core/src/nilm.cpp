#include "srp/nilm.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>

#include "srp/metrics.hpp"

namespace srp::nilm {

namespace {

double sq_distance(const std::vector<double>& a, const std::vector<double>& b) {
    require(a.size() == b.size(), ErrorCode::ShapeMismatch, "feature dimensions differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

int count_classes(const Samples& xs) {
    int n = 0;
    for (const auto& x : xs) {
        require(x.label >= 0, ErrorCode::InvalidArgument, "training sample without a label");
        n = std::max(n, x.label + 1);
    }
    return n;
}

void check_training_set(const Samples& xs) {
    require(!xs.empty(), ErrorCode::EmptyTrainingSet, "training set is empty");
    const std::size_t dim = xs.front().values.size();
    for (const auto& x : xs) {
        require(x.values.size() == dim, ErrorCode::ShapeMismatch, "training features differ in dimension");
    }
}

int majority(const std::vector<int>& counts) {
    int best = 0;
    for (int c = 1; c < static_cast<int>(counts.size()); ++c) {
        if (counts[c] > counts[best]) best = c;
    }
    return best;
}

double gini(const std::vector<int>& counts, int total) {
    if (total == 0) return 0.0;
    double s = 0.0;
    for (int c : counts) {
        const double p = static_cast<double>(c) / total;
        s += p * p;
    }
    return 1.0 - s;
}

}  // namespace

FeatureVector featurize(const TimeSeries& window, std::size_t dim, double mains_hz) {
    require(dim >= 2 && dim % 2 == 0, ErrorCode::InvalidArgument, "feature dim must be even and >= 2");
    require(mains_hz > 0.0, ErrorCode::NonPositiveArgument, "mains frequency must be positive");
    const std::size_t half = dim / 2;
    const std::size_t n = window.size();
    if (n < half) {
        raise(ErrorCode::TooShort, "window of " + std::to_string(n) + " samples is shorter than dim/2 = " +
                                       std::to_string(half));
    }
    FeatureVector fv;
    fv.values.assign(dim, 0.0);

    for (std::size_t j = 0; j < half; ++j) {
        const std::size_t a = j * n / half, b = (j + 1) * n / half;
        double s = 0.0;
        for (std::size_t i = a; i < b; ++i) s += window[i];
        fv.values[j] = s / static_cast<double>(b - a);
    }
    double peak = 0.0;
    for (std::size_t j = 0; j < half; ++j) {
        if (std::abs(fv.values[j]) > std::abs(peak)) peak = fv.values[j];
    }
    for (std::size_t j = 0; j < half; ++j) fv.values[j] = peak != 0.0 ? fv.values[j] / peak : 0.0;

    const double fs = window.sample_rate_hz();
    std::vector<double> mag(half, 0.0);
    for (std::size_t k = 1; k <= half; ++k) {
        const double f = static_cast<double>(2 * k - 1) * mains_hz;
        if (f >= fs / 2.0) break;
        const double w = -2.0 * std::numbers::pi * f / fs;
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t t = 0; t < n; ++t) acc += window[t] * std::polar(1.0, w * static_cast<double>(t));
        mag[k - 1] = std::abs(acc) / static_cast<double>(n);
    }
    const double fundamental = mag[0];
    const bool usable = fundamental > 1e-12 * std::max(1.0, *std::max_element(mag.begin(), mag.end()));
    for (std::size_t k = 0; k < half; ++k) fv.values[half + k] = usable ? mag[k] / fundamental : 0.0;
    return fv;
}

std::vector<int> Classifier::predict_all(const Samples& xs) const {
    std::vector<int> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(predict(x.values));
    return out;
}

// --- kNN -------------------------------------------------------------------

Knn::Knn(int k) : k_(k) { require(k >= 1, ErrorCode::InvalidArgument, "k must be >= 1"); }

void Knn::fit(const Samples& train) {
    check_training_set(train);
    require(static_cast<std::size_t>(k_) <= train.size(), ErrorCode::InvalidArgument,
            "k exceeds the training set size");
    count_classes(train);
    train_ = train;
}

int Knn::predict(const std::vector<double>& x) const {
    require(!train_.empty(), ErrorCode::EmptyTrainingSet, "kNN used before fit");
    std::vector<std::pair<double, std::size_t>> d;
    d.reserve(train_.size());
    for (std::size_t i = 0; i < train_.size(); ++i) d.emplace_back(sq_distance(x, train_[i].values), i);
    const auto k = static_cast<std::size_t>(k_);
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());

    std::map<int, std::pair<int, double>> votes;  // label -> (count, summed distance)
    for (std::size_t j = 0; j < k; ++j) {
        auto& v = votes[train_[d[j].second].label];
        v.first += 1;
        v.second += std::sqrt(d[j].first);
    }
    int best = -1;
    std::pair<int, double> best_v{0, 0.0};
    for (const auto& [label, v] : votes) {
        if (best < 0 || v.first > best_v.first || (v.first == best_v.first && v.second < best_v.second)) {
            best = label;
            best_v = v;
        }
    }
    return best;
}

// --- CART ------------------------------------------------------------------

DecisionTree::DecisionTree(TreeConfig cfg) : cfg_(cfg) {
    require(cfg.max_depth >= 0, ErrorCode::InvalidArgument, "max_depth must be >= 0");
    require(cfg.min_leaf >= 1, ErrorCode::InvalidArgument, "min_leaf must be >= 1");
}

void DecisionTree::fit(const Samples& train) {
    check_training_set(train);
    n_classes_ = count_classes(train);
    nodes_.clear();
    std::vector<std::size_t> idx(train.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    build(train, idx, 0);
}

int DecisionTree::build(const Samples& train, std::vector<std::size_t>& idx, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    std::vector<int> counts(static_cast<std::size_t>(n_classes_), 0);
    for (std::size_t i : idx) ++counts[static_cast<std::size_t>(train[i].label)];
    nodes_[id].label = majority(counts);

    const int total = static_cast<int>(idx.size());
    const double parent = gini(counts, total);
    if (depth >= cfg_.max_depth || parent == 0.0 || total < 2 * cfg_.min_leaf) return id;

    const std::size_t dim = train.front().values.size();
    double best_score = parent;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::size_t> order = idx;
    for (std::size_t f = 0; f < dim; ++f) {
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return train[a].values[f] < train[b].values[f] || (train[a].values[f] == train[b].values[f] && a < b);
        });
        std::vector<int> left(counts.size(), 0), right = counts;
        for (int j = 0; j + 1 < total; ++j) {
            const auto& s = train[order[static_cast<std::size_t>(j)]];
            ++left[static_cast<std::size_t>(s.label)];
            --right[static_cast<std::size_t>(s.label)];
            const double v = s.values[f];
            const double next = train[order[static_cast<std::size_t>(j + 1)]].values[f];
            if (!(v < next)) continue;
            const int nl = j + 1, nr = total - nl;
            if (nl < cfg_.min_leaf || nr < cfg_.min_leaf) continue;
            const double score = (nl * gini(left, nl) + nr * gini(right, nr)) / total;
            if (score < best_score - 1e-15) {
                best_score = score;
                best_feature = static_cast<int>(f);
                best_threshold = v + (next - v) / 2.0;
            }
        }
    }
    if (best_feature < 0) return id;

    std::vector<std::size_t> li, ri;
    for (std::size_t i : idx) {
        (train[i].values[static_cast<std::size_t>(best_feature)] <= best_threshold ? li : ri).push_back(i);
    }
    nodes_[id].feature = best_feature;
    nodes_[id].threshold = best_threshold;
    const int l = build(train, li, depth + 1);
    const int r = build(train, ri, depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
}

int DecisionTree::predict(const std::vector<double>& x) const {
    require(!nodes_.empty(), ErrorCode::EmptyTrainingSet, "decision tree used before fit");
    int n = 0;
    while (nodes_[n].feature >= 0) {
        const auto f = static_cast<std::size_t>(nodes_[n].feature);
        require(f < x.size(), ErrorCode::ShapeMismatch, "feature vector too short for the tree");
        n = x[f] <= nodes_[n].threshold ? nodes_[n].left : nodes_[n].right;
    }
    return nodes_[n].label;
}

int DecisionTree::depth() const {
    if (nodes_.empty()) return 0;
    std::vector<std::pair<int, int>> stack{{0, 0}};
    int best = 0;
    while (!stack.empty()) {
        auto [n, d] = stack.back();
        stack.pop_back();
        best = std::max(best, d);
        if (nodes_[n].feature >= 0) {
            stack.emplace_back(nodes_[n].left, d + 1);
            stack.emplace_back(nodes_[n].right, d + 1);
        }
    }
    return best;
}

// --- linear SVM --------------------------------------------------------------

LinearSvm::LinearSvm(SvmConfig cfg) : cfg_(cfg) {
    require(cfg.lambda > 0.0, ErrorCode::NonPositiveArgument, "svm lambda must be positive");
    require(cfg.iterations >= 1, ErrorCode::InvalidArgument, "svm iterations must be >= 1");
}

std::vector<double> LinearSvm::standardize(const std::vector<double>& x) const {
    require(x.size() == mean_.size(), ErrorCode::ShapeMismatch, "feature dimension differs from training");
    std::vector<double> z(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) z[j] = (x[j] - mean_[j]) * scale_[j];
    return z;
}

void LinearSvm::fit(const Samples& train) {
    check_training_set(train);
    const int n_classes = count_classes(train);
    {
        std::vector<bool> seen(static_cast<std::size_t>(n_classes), false);
        for (const auto& s : train) seen[static_cast<std::size_t>(s.label)] = true;
        require(std::count(seen.begin(), seen.end(), true) >= 2, ErrorCode::SingleClass,
                "svm needs at least two classes");
    }
    const std::size_t dim = train.front().values.size();
    const auto n = static_cast<double>(train.size());
    mean_.assign(dim, 0.0);
    scale_.assign(dim, 1.0);
    for (const auto& s : train)
        for (std::size_t j = 0; j < dim; ++j) mean_[j] += s.values[j] / n;
    std::vector<double> var(dim, 0.0);
    for (const auto& s : train)
        for (std::size_t j = 0; j < dim; ++j) var[j] += (s.values[j] - mean_[j]) * (s.values[j] - mean_[j]) / n;
    for (std::size_t j = 0; j < dim; ++j) scale_[j] = var[j] > 1e-24 ? 1.0 / std::sqrt(var[j]) : 0.0;

    std::vector<std::vector<double>> z;
    z.reserve(train.size());
    for (const auto& s : train) z.push_back(standardize(s.values));

    const double radius = 1.0 / std::sqrt(cfg_.lambda);
    w_.assign(static_cast<std::size_t>(n_classes), std::vector<double>(dim, 0.0));
    b_.assign(static_cast<std::size_t>(n_classes), 0.0);
    for (int c = 0; c < n_classes; ++c) {
        auto& w = w_[static_cast<std::size_t>(c)];
        double& b = b_[static_cast<std::size_t>(c)];
        std::vector<double> w_avg(dim, 0.0), g(dim);
        double b_avg = 0.0;
        int averaged = 0;
        for (int t = 1; t <= cfg_.iterations; ++t) {
            std::fill(g.begin(), g.end(), 0.0);
            double gb = 0.0;
            for (std::size_t i = 0; i < z.size(); ++i) {
                const double y = train[i].label == c ? 1.0 : -1.0;
                double m = b;
                for (std::size_t j = 0; j < dim; ++j) m += w[j] * z[i][j];
                if (y * m < 1.0) {
                    for (std::size_t j = 0; j < dim; ++j) g[j] -= y * z[i][j] / n;
                    gb -= y / n;
                }
            }
            const double eta = 1.0 / (cfg_.lambda * t);
            double norm = 0.0;
            for (std::size_t j = 0; j < dim; ++j) {
                w[j] -= eta * (cfg_.lambda * w[j] + g[j]);
                norm += w[j] * w[j];
            }
            b -= eta * gb * cfg_.lambda;  // unregularized bias, step 1/t
            norm = std::sqrt(norm);
            if (norm > radius) {
                for (double& v : w) v *= radius / norm;
            }
            if (2 * t > cfg_.iterations) {
                for (std::size_t j = 0; j < dim; ++j) w_avg[j] += w[j];
                b_avg += b;
                ++averaged;
            }
        }
        for (std::size_t j = 0; j < dim; ++j) w[j] = w_avg[j] / averaged;
        b = b_avg / averaged;
    }
}

int LinearSvm::predict(const std::vector<double>& x) const {
    require(!w_.empty(), ErrorCode::EmptyTrainingSet, "svm used before fit");
    const std::vector<double> z = standardize(x);
    int best = 0;
    double best_m = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < w_.size(); ++c) {
        double m = b_[c];
        for (std::size_t j = 0; j < z.size(); ++j) m += w_[c][j] * z[j];
        if (m > best_m) {
            best_m = m;
            best = static_cast<int>(c);
        }
    }
    return best;
}

std::string_view to_string(ClassifierKind kind) noexcept {
    switch (kind) {
        case ClassifierKind::Knn: return "knn";
        case ClassifierKind::DecisionTree: return "decision_tree";
        case ClassifierKind::Svm: return "svm";
    }
    return "?";
}

std::unique_ptr<Classifier> make_classifier(ClassifierKind kind, const ClassifierSettings& settings) {
    switch (kind) {
        case ClassifierKind::Knn: return std::make_unique<Knn>(settings.knn_k);
        case ClassifierKind::DecisionTree: return std::make_unique<DecisionTree>(settings.tree);
        case ClassifierKind::Svm: return std::make_unique<LinearSvm>(settings.svm);
    }
    raise(ErrorCode::InvalidArgument, "unknown classifier");
}

// --- activation benchmark ----------------------------------------------------

ActivationSet build_activation_set(const ActivationConfig& cfg) {
    cfg.spec.validate();
    require(cfg.window_s > 0.0 && cfg.lead_s >= 0.0 && cfg.lead_s < cfg.window_s, ErrorCode::InvalidArgument,
            "activation window must contain the switch-on instant");
    require(cfg.n_train > 0 && cfg.n_test > 0, ErrorCode::InvalidArgument, "activation set sizes must be positive");
    require(!cfg.types.empty(), ErrorCode::InvalidArgument, "no appliance types");
    const double ratio = cfg.synth.base_rate_hz / cfg.f_high_hz;
    const auto decim = static_cast<int>(std::lround(ratio));
    require(decim >= 1 && std::abs(ratio - decim) < 1e-9, ErrorCode::InvalidArgument,
            "f_high must divide the synthesis rate");
    const auto len = static_cast<std::size_t>(std::lround(cfg.window_s * cfg.f_high_hz));
    require(len % static_cast<std::size_t>(cfg.spec.alpha) == 0, ErrorCode::LengthNotDivisible,
            "activation window length is not divisible by alpha");

    const datagen::ApplianceCatalog catalog = datagen::make_catalog(
        cfg.types, cfg.instances_per_type, datagen::catalog_seed(cfg.catalog_seed), cfg.synth);
    const double cycle = 1.0 / cfg.synth.mains_hz;

    ActivationSet set{.vocabulary = cfg.types, .train = {}, .test = {}};
    std::mt19937_64 rng(datagen::mix_seed(cfg.seed, 0xAC71ull));
    std::uniform_int_distribution<int> pick_instance(0, cfg.instances_per_type - 1);
    const auto max_shift = static_cast<int>(std::floor(cfg.lead_s / cycle + 1e-9));
    std::uniform_int_distribution<int> pick_shift(0, max_shift);
    const std::size_t total = cfg.n_train + cfg.n_test;
    for (std::size_t i = 0; i < total; ++i) {
        const std::size_t label = i % cfg.types.size();
        const std::string id = cfg.types[label] + "#" + std::to_string(pick_instance(rng));
        const double on = cycle * pick_shift(rng);
        datagen::HouseholdScenario sc{.events = {{id, on, cfg.window_s}},
                                      .duration_s = cfg.window_s,
                                      .base_rate_hz = cfg.synth.base_rate_hz};
        TimeSeries base = datagen::simulate(sc, catalog);
        TimeSeries high = preprocess(degrade(base, {.alpha = decim, .phase = 0, .noise_sigma = 0.0, .rng_seed = 0}));
        high = slice(high, 0, len);
        DegradationSpec spec = cfg.spec;
        spec.rng_seed = datagen::mix_seed(datagen::mix_seed(cfg.spec.rng_seed, cfg.seed), i);
        TimeSeries low = degrade(high, spec);
        ActivationExample ex{.high_res = std::move(high), .low_res = std::move(low), .label = static_cast<int>(label)};
        (i < cfg.n_train ? set.train : set.test).push_back(std::move(ex));
    }
    return set;
}

std::string_view to_string(Source source) noexcept {
    switch (source) {
        case Source::LF: return "LF";
        case Source::HF: return "HF";
        case Source::SRP: return "SRP";
    }
    return "?";
}

namespace {

Samples features_of(const std::vector<TimeSeries>& windows, const std::vector<int>& labels,
                    const ProtocolOptions& opts) {
    Samples out;
    out.reserve(windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const TimeSeries& w = windows[i];
        FeatureVector fv = featurize(w.domain() == Domain::Preprocessed ? inverse_preprocess(w) : w,
                                     opts.feature_dim, opts.mains_hz);
        fv.label = labels[i];
        out.push_back(std::move(fv));
    }
    return out;
}

}  // namespace

SourceFeatures compute_source_features(const ActivationSet& set, const nn::SrpModel* model,
                                       const ProtocolOptions& opts) {
    auto unpack = [](const std::vector<ActivationExample>& xs, std::vector<TimeSeries>& lo,
                     std::vector<TimeSeries>& hi, std::vector<int>& labels) {
        for (const auto& x : xs) {
            lo.push_back(x.low_res);
            hi.push_back(x.high_res);
            labels.push_back(x.label);
        }
    };
    std::vector<TimeSeries> tr_lo, tr_hi, te_lo, te_hi;
    std::vector<int> tr_y, te_y;
    unpack(set.train, tr_lo, tr_hi, tr_y);
    unpack(set.test, te_lo, te_hi, te_y);

    SourceFeatures f;
    f.lf_train = features_of(tr_lo, tr_y, opts);
    f.lf_test = features_of(te_lo, te_y, opts);
    f.hf_train = features_of(tr_hi, tr_y, opts);
    f.hf_test = features_of(te_hi, te_y, opts);
    if (model != nullptr) {
        if (!te_lo.empty() && te_hi.front().size() != model->alpha() * te_lo.front().size()) {
            raise(ErrorCode::ShapeMismatch, "model alpha does not match the activation set");
        }
        f.srp_test = features_of(nn::infer_batch(*model, te_lo), te_y, opts);
        f.has_srp = true;
    }
    return f;
}

double run_protocol(const SourceFeatures& features, const NilmProtocol& protocol, const ProtocolOptions& opts) {
    const Samples& train = protocol.train_source == Source::LF ? features.lf_train : features.hf_train;
    require(protocol.train_source != Source::SRP, ErrorCode::InvalidArgument, "classifiers train on LF or HF only");
    const Samples* test = nullptr;
    switch (protocol.test_source) {
        case Source::LF: test = &features.lf_test; break;
        case Source::HF: test = &features.hf_test; break;
        case Source::SRP:
            if (!features.has_srp) raise(ErrorCode::MissingArtifact, "SRP test source requires a trained model");
            test = &features.srp_test;
            break;
    }
    auto clf = make_classifier(protocol.classifier, opts.classifiers);
    clf->fit(train);
    const std::vector<int> pred = clf->predict_all(*test);
    std::vector<int> truth;
    truth.reserve(test->size());
    for (const auto& x : *test) truth.push_back(x.label);
    return metrics::accuracy(pred, truth);
}

double run_protocol(const ActivationSet& set, const nn::SrpModel* model, const NilmProtocol& protocol,
                    const ProtocolOptions& opts) {
    const bool need_srp = protocol.test_source == Source::SRP;
    if (need_srp && model == nullptr) raise(ErrorCode::MissingArtifact, "SRP test source requires a trained model");
    return run_protocol(compute_source_features(set, need_srp ? model : nullptr, opts), protocol, opts);
}

NilmRow run_row(const SourceFeatures& features, ClassifierKind kind, double f_low_hz, int alpha,
                const ProtocolOptions& opts) {
    auto cell = [&](Source tr, Source te) {
        return run_protocol(features, {.train_source = tr, .test_source = te, .classifier = kind,
                                       .f_low_hz = f_low_hz, .alpha = alpha}, opts);
    };
    return {.method = std::string(to_string(kind)), .f_low_hz = f_low_hz, .alpha = alpha,
            .lf_lf = cell(Source::LF, Source::LF), .hf_srp = cell(Source::HF, Source::SRP),
            .hf_hf = cell(Source::HF, Source::HF)};
}

}  // namespace srp::nilm
