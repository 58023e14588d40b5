#include "srp/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace srp {

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view what) {
    raise(ErrorCode::Config, "config " + std::string(key) + " = '" + std::string(value) + "': " + std::string(what));
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view raw) {
    const std::string_view v = trim(raw);
    T out{};
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || ptr != end) bad_value(key, raw, "not a number");
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(out)) bad_value(key, raw, "must be finite");
    }
    return out;
}

bool parse_bool(std::string_view key, std::string_view raw) {
    const std::string_view v = trim(raw);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    bad_value(key, raw, "expected true/false");
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <typename T>
std::string fmt_int(T v) {
    return std::to_string(v);
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t next = s.find(',', pos);
        const std::string_view item = trim(s.substr(pos, next == std::string_view::npos ? s.npos : next - pos));
        if (!item.empty()) out.emplace_back(item);
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

std::string join(const std::vector<std::string>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + xs[i];
    return out;
}

struct Key {
    std::string name;
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, std::string_view key, std::string_view value)> set;
};

#define SRP_DOUBLE(NAME, FIELD)                                                                        \
    Key {                                                                                              \
        NAME, [](const ExperimentConfig& c) { return fmt(c.FIELD); },                                  \
            [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.FIELD = parse_number<double>(k, v); } \
    }
#define SRP_INT(NAME, FIELD, TYPE)                                                                     \
    Key {                                                                                              \
        NAME, [](const ExperimentConfig& c) { return fmt_int(c.FIELD); },                              \
            [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.FIELD = parse_number<TYPE>(k, v); } \
    }

const std::vector<Key>& keys() {
    static const std::vector<Key> table = {
        SRP_INT("experiment.seed", seed, std::uint64_t),
        Key{"experiment.out",
            [](const ExperimentConfig& c) { return c.out_dir.string(); },
            [](ExperimentConfig& c, std::string_view, std::string_view v) { c.out_dir = std::string(trim(v)); }},
        Key{"experiment.settings",
            [](const ExperimentConfig& c) {
                std::vector<std::string> xs;
                for (const auto& s : c.settings) {
                    char buf[64];
                    std::snprintf(buf, sizeof buf, "%g:%d", s.f_low_hz, s.alpha);
                    xs.emplace_back(buf);
                }
                return join(xs);
            },
            [](ExperimentConfig& c, std::string_view k, std::string_view v) {
                c.settings.clear();
                for (const auto& item : split_list(v)) {
                    try {
                        c.settings.push_back(parse_setting(item));
                    } catch (const Error& e) {
                        bad_value(k, v, e.what());
                    }
                }
            }},

        SRP_INT("dataset.n_scenarios", dataset.n_scenarios, std::size_t),
        SRP_DOUBLE("dataset.duration_s", dataset.duration_s),
        SRP_DOUBLE("dataset.window_s", dataset.window_s),
        SRP_DOUBLE("dataset.noise_sigma", dataset.spec.noise_sigma),
        SRP_INT("dataset.phase", dataset.spec.phase, int),
        SRP_DOUBLE("dataset.train_fraction", dataset.train_fraction),
        SRP_DOUBLE("dataset.val_fraction", dataset.val_fraction),
        SRP_INT("dataset.instances_per_type", dataset.instances_per_type, int),
        Key{"dataset.types", [](const ExperimentConfig& c) { return join(c.dataset.types); },
            [](ExperimentConfig& c, std::string_view k, std::string_view v) {
                auto types = split_list(v);
                for (const auto& t : types) {
                    try {
                        datagen::find_profile(t);
                    } catch (const Error& e) {
                        bad_value(k, v, e.what());
                    }
                }
                c.dataset.types = types;
                c.activation.types = std::move(types);
            }},
        SRP_INT("dataset.min_events", dataset.scenario.min_events, int),
        SRP_INT("dataset.max_events", dataset.scenario.max_events, int),
        SRP_DOUBLE("dataset.min_on_s", dataset.scenario.min_on_s),
        SRP_DOUBLE("dataset.max_on_s", dataset.scenario.max_on_s),

        SRP_INT("model.n_blocks", model.n_blocks, int),
        SRP_INT("model.channels", model.channels, int),
        SRP_INT("model.kernel_size", model.kernel_size, int),
        SRP_DOUBLE("model.residual_init_scale", model.residual_init_scale),

        SRP_INT("train.batch_size", train.batch_size, std::size_t),
        SRP_DOUBLE("train.lr_phase1", train.lr_phase1),
        SRP_INT("train.updates_phase1", train.updates_phase1, std::size_t),
        SRP_DOUBLE("train.lr_phase2", train.lr_phase2),
        SRP_INT("train.updates_phase2", train.updates_phase2, std::size_t),
        SRP_DOUBLE("train.beta1", train.beta1),
        SRP_DOUBLE("train.beta2", train.beta2),
        SRP_DOUBLE("train.epsilon", train.epsilon),
        SRP_INT("train.checkpoint_every", train.checkpoint_every, std::size_t),

        SRP_INT("metrics.window_len", dtw.window_len, std::size_t),
        SRP_INT("metrics.window_stride", dtw.window_stride, std::size_t),
        Key{"metrics.point_cost",
            [](const ExperimentConfig& c) {
                return std::string(c.dtw.point_cost == metrics::PointCost::AbsoluteDifference ? "absolute"
                                                                                                : "squared");
            },
            [](ExperimentConfig& c, std::string_view k, std::string_view v) {
                const auto t = trim(v);
                if (t == "absolute") c.dtw.point_cost = metrics::PointCost::AbsoluteDifference;
                else if (t == "squared") c.dtw.point_cost = metrics::PointCost::SquaredDifference;
                else bad_value(k, v, "expected absolute or squared");
            }},

        SRP_DOUBLE("map.lambda", map.lambda),
        SRP_INT("map.max_iter", map.max_iter, int),
        SRP_DOUBLE("map.tol", map.tol),

        SRP_INT("nilm.n_train", activation.n_train, std::size_t),
        SRP_INT("nilm.n_test", activation.n_test, std::size_t),
        SRP_DOUBLE("nilm.window_s", activation.window_s),
        SRP_DOUBLE("nilm.lead_s", activation.lead_s),
        SRP_INT("nilm.feature_dim", protocol.feature_dim, std::size_t),
        SRP_INT("nilm.knn_k", protocol.classifiers.knn_k, int),
        SRP_INT("nilm.tree_max_depth", protocol.classifiers.tree.max_depth, int),
        SRP_INT("nilm.tree_min_leaf", protocol.classifiers.tree.min_leaf, int),
        SRP_DOUBLE("nilm.svm_lambda", protocol.classifiers.svm.lambda),
        SRP_INT("nilm.svm_iterations", protocol.classifiers.svm.iterations, int),

        SRP_INT("eval.max_windows", eval.max_windows, std::size_t),
        SRP_INT("eval.n_plots", eval.n_plots, std::size_t),
        SRP_DOUBLE("eval.zoom_s", eval.zoom_s),
        Key{"eval.with_map", [](const ExperimentConfig& c) { return std::string(c.eval.with_map ? "true" : "false"); },
            [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.eval.with_map = parse_bool(k, v); }},
    };
    return table;
}

#undef SRP_DOUBLE
#undef SRP_INT

const Key* find_key(std::string_view name) {
    for (const auto& k : keys()) {
        if (k.name == name) return &k;
    }
    return nullptr;
}

}  // namespace

std::string Setting::tag() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "fl%g_a%d", f_low_hz, alpha);
    return buf;
}

Setting parse_setting(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) raise(ErrorCode::Config, "setting must look like <f_low_hz>:<alpha>");
    Setting s{.f_low_hz = parse_number<double>("setting", text.substr(0, colon)),
              .alpha = parse_number<int>("setting", text.substr(colon + 1))};
    require(s.f_low_hz > 0.0 && s.alpha >= 1, ErrorCode::Config, "setting needs f_low > 0 and alpha >= 1");
    return s;
}

void ExperimentConfig::validate() const {
    try {
        require(!settings.empty(), ErrorCode::Config, "no experiment settings");
        for (const auto& s : settings) {
            const double ratio = dataset.synth.base_rate_hz / s.f_high_hz();
            require(std::abs(ratio - std::round(ratio)) < 1e-9 && ratio >= 1.0 - 1e-9, ErrorCode::Config,
                    "setting " + s.tag() + ": f_high must divide the synthesis rate " +
                        fmt(dataset.synth.base_rate_hz));
            dataset_for(s).validate();
            model_for(s).validate();
            const double low_len = dataset.window_s * s.f_low_hz;
            require(std::abs(low_len - std::round(low_len)) < 1e-9, ErrorCode::Config,
                    "setting " + s.tag() + ": window_s * f_low must be a whole number of samples");
            const double nilm_len = activation.window_s * s.f_low_hz;
            require(std::abs(nilm_len - std::round(nilm_len)) < 1e-9 &&
                        std::round(nilm_len) >= static_cast<double>(protocol.feature_dim / 2),
                    ErrorCode::Config, "setting " + s.tag() + ": NILM window too short for the feature dimension");
        }
        train.validate();
        dtw.validate();
        map.validate();
        require(protocol.feature_dim >= 2 && protocol.feature_dim % 2 == 0, ErrorCode::Config,
                "nilm.feature_dim must be even");
        require(eval.zoom_s > 0.0, ErrorCode::Config, "eval.zoom_s must be positive");
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Config) throw;
        raise(ErrorCode::Config, e.what());
    }
}

datagen::DatasetConfig ExperimentConfig::dataset_for(const Setting& s) const {
    datagen::DatasetConfig d = dataset;
    d.f_high_hz = s.f_high_hz();
    d.spec.alpha = s.alpha;
    d.spec.rng_seed = seed;
    d.seed = seed;
    return d;
}

nn::SrpHyper ExperimentConfig::model_for(const Setting& s) const {
    nn::SrpHyper h = model;
    h.alpha = s.alpha;
    return h;
}

nn::TrainConfig ExperimentConfig::train_for(const Setting&) const {
    nn::TrainConfig t = train;
    t.seed = datagen::mix_seed(seed, 0x7A1Eull);
    return t;
}

nilm::ActivationConfig ExperimentConfig::activation_for(const Setting& s) const {
    nilm::ActivationConfig a = activation;
    a.f_high_hz = s.f_high_hz();
    a.spec = dataset.spec;
    a.spec.alpha = s.alpha;
    a.spec.rng_seed = seed;
    a.seed = datagen::mix_seed(seed, 0x411Cull);
    a.catalog_seed = seed;
    a.instances_per_type = dataset.instances_per_type;
    a.types = dataset.types;
    a.synth = dataset.synth;
    return a;
}

std::uint64_t ExperimentConfig::model_seed() const noexcept { return datagen::mix_seed(seed, 0x5EEDull); }

void apply_override(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
    const Key* k = find_key(trim(key));
    if (k == nullptr) raise(ErrorCode::Config, "unknown config key '" + std::string(key) + "'");
    k->set(cfg, k->name, value);
}

ExperimentConfig parse_config(const std::string& text) {
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        raise(ErrorCode::Config, std::string("config syntax: ") + e.what());
    }
    if (tree.empty()) raise(ErrorCode::Config, "config file is empty");
    ExperimentConfig cfg;
    for (const auto& [section, body] : tree) {
        if (body.empty()) raise(ErrorCode::Config, "key '" + section + "' must live inside a [section]");
        for (const auto& [name, value] : body) {
            apply_override(cfg, section + "." + name, value.get_value<std::string>());
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::Config, "cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    std::string section;
    for (const auto& k : keys()) {
        const auto dot = k.name.find('.');
        const std::string sec = k.name.substr(0, dot);
        if (sec != section) {
            out << (section.empty() ? "" : "\n") << '[' << sec << "]\n";
            section = sec;
        }
        out << k.name.substr(dot + 1) << " = " << k.get(cfg) << '\n';
    }
    return out.str();
}

std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto& k : keys()) out.push_back(k.name);
    return out;
}

}  // namespace srp
