#include "srp/datagen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"
#include "srp/error.hpp"
#include "srp/series_io.hpp"

namespace srp::datagen {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t hash_string(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::size_t to_count(double value, const char* what) {
    const double r = std::round(value);
    require(r >= 1.0 && std::abs(value - r) < 1e-9 * std::max(1.0, r), ErrorCode::InvalidArgument,
            std::string(what) + " must be a positive whole number of samples");
    return static_cast<std::size_t>(r);
}

std::size_t samples_per_cycle(const SynthConfig& cfg) {
    return to_count(cfg.base_rate_hz / cfg.mains_hz, "base_rate/mains");
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept { return splitmix64(a ^ splitmix64(b)); }

const std::vector<ApplianceProfile>& default_profiles() {
    static const std::vector<ApplianceProfile> profiles = {
        {"air_conditioner", 0.80, 1.60, {0.50, 0.15, 0.08, 0.04, 0.02}, {0.0, 0.4, 1.1, 0.2, 2.0}, 2.5, 0.30, 1.0},
        {"compact_fluorescent_lamp", 0.010, 0.025, {0.40, 0.30, 0.15, 0.07, 0.03}, {0.3, 1.6, 2.8, 0.9, 2.2}, 1.0, 0.05, 0.3},
        {"fan", 0.03, 0.08, {0.60, 0.08, 0.03, 0.01, 0.00}, {0.8, 0.1, 1.9, 0.0, 0.0}, 1.5, 0.40, 1.0},
        {"fridge", 0.10, 0.25, {0.55, 0.12, 0.05, 0.02, 0.01}, {1.2, 2.4, 0.6, 1.5, 0.3}, 4.0, 0.20, 0.8},
        {"hairdryer", 1.00, 1.80, {0.70, 0.05, 0.02, 0.01, 0.00}, {0.1, 2.9, 1.3, 0.4, 0.0}, 0.3, 0.10, 0.3},
        {"heater", 1.20, 2.00, {0.80, 0.02, 0.01, 0.00, 0.00}, {0.0, 0.0, 0.0, 0.0, 0.0}, 0.2, 0.20, 0.3},
        {"incandescent_light_bulb", 0.04, 0.10, {0.80, 0.03, 0.00, 0.00, 0.00}, {0.5, 1.0, 0.0, 0.0, 0.0}, 6.0, 0.05, 0.3},
        {"laptop", 0.03, 0.09, {0.30, 0.25, 0.20, 0.12, 0.08}, {2.1, 0.7, 2.6, 1.8, 0.5}, 2.0, 0.02, 0.2},
        {"microwave", 0.90, 1.50, {0.45, 0.20, 0.10, 0.05, 0.03}, {1.7, 0.2, 2.2, 2.9, 1.1}, 1.5, 0.15, 0.6},
        {"vacuum", 0.70, 1.40, {0.60, 0.15, 0.06, 0.03, 0.01}, {0.4, 1.3, 0.8, 2.5, 1.9}, 2.0, 0.25, 0.8},
        {"washing_machine", 0.20, 0.50, {0.50, 0.18, 0.08, 0.04, 0.02}, {2.6, 1.9, 0.3, 1.0, 2.7}, 1.2, 0.50, 1.5},
    };
    return profiles;
}

std::vector<std::string> default_types() {
    std::vector<std::string> out;
    for (const auto& p : default_profiles()) out.push_back(p.type);
    return out;
}

const ApplianceProfile& find_profile(std::string_view type) {
    for (const auto& p : default_profiles()) {
        if (p.type == type) return p;
    }
    raise(ErrorCode::UnknownType, "unknown appliance type '" + std::string(type) + "'");
}

ApplianceSignature synth_signature(std::string_view appliance_type, std::uint64_t seed, const SynthConfig& cfg) {
    const ApplianceProfile& profile = find_profile(appliance_type);
    require(cfg.steady_cycles >= 1, ErrorCode::InvalidArgument, "steady_cycles must be >= 1");
    std::mt19937_64 rng(mix_seed(seed, hash_string(appliance_type)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const double power = profile.power_min_kw + (profile.power_max_kw - profile.power_min_kw) * unit(rng);
    std::array<double, 5> amp{};
    std::array<double, 5> phase{};
    double amp_sum = 0.0;
    for (std::size_t k = 0; k < amp.size(); ++k) {
        amp[k] = profile.harmonics[k] * (1.0 + 0.15 * (2.0 * unit(rng) - 1.0));
        phase[k] = profile.phases[k] + 0.2 * gauss(rng);
        amp_sum += amp[k];
    }
    // Keep the waveform strictly positive and the fundamental dominant.
    if (amp_sum > 0.95) {
        for (double& a : amp) a *= 0.95 / amp_sum;
    }
    for (std::size_t k = 1; k < amp.size(); ++k) amp[k] = std::min(amp[k], 0.9 * amp[0]);
    const double gain = profile.inrush_gain * (1.0 + 0.2 * (2.0 * unit(rng) - 1.0));
    const double tau = profile.inrush_tau_s * (1.0 + 0.2 * (2.0 * unit(rng) - 1.0));

    const std::size_t cycle = samples_per_cycle(cfg);
    const std::size_t n_steady = cycle * static_cast<std::size_t>(cfg.steady_cycles);
    std::vector<double> steady(n_steady);
    for (std::size_t i = 0; i < n_steady; ++i) {
        const double t = static_cast<double>(i) / cfg.base_rate_hz;
        double v = 1.0;
        for (std::size_t k = 0; k < amp.size(); ++k) {
            const double f = static_cast<double>(2 * k + 1) * cfg.mains_hz;
            v += amp[k] * std::sin(2.0 * std::numbers::pi * f * t + phase[k]);
        }
        steady[i] = power * v;
    }

    const auto n_transient = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(profile.transient_s * cfg.base_rate_hz)));
    std::vector<double> transient(n_transient);
    for (std::size_t i = 0; i < n_transient; ++i) {
        const double t = static_cast<double>(i) / cfg.base_rate_hz;
        transient[i] = steady[i % n_steady] * (1.0 + gain * std::exp(-t / tau));
    }

    return {
        .id = std::string(appliance_type) + "#" + std::to_string(seed),
        .appliance_type = std::string(appliance_type),
        .steady = TimeSeries(std::move(steady), cfg.base_rate_hz),
        .transient = TimeSeries(std::move(transient), cfg.base_rate_hz),
    };
}

ApplianceCatalog::ApplianceCatalog(std::vector<ApplianceSignature> signatures) {
    for (auto& s : signatures) add(std::move(s));
}

void ApplianceCatalog::add(ApplianceSignature signature) {
    require(find(signature.id) == nullptr, ErrorCode::InvalidArgument, "duplicate appliance id " + signature.id);
    require(signature.steady.sample_rate_hz() == signature.transient.sample_rate_hz(),
            ErrorCode::InvalidArgument, "steady and transient waveforms must share a sample rate");
    signatures_.push_back(std::move(signature));
}

const ApplianceSignature* ApplianceCatalog::find(std::string_view id) const noexcept {
    for (const auto& s : signatures_) {
        if (s.id == id) return &s;
    }
    return nullptr;
}

const ApplianceSignature& ApplianceCatalog::at(std::string_view id) const {
    const auto* s = find(id);
    if (s == nullptr) raise(ErrorCode::UnknownAppliance, "appliance '" + std::string(id) + "' not in catalog");
    return *s;
}

ApplianceCatalog make_catalog(const std::vector<std::string>& types, int instances_per_type, std::uint64_t seed,
                              const SynthConfig& cfg) {
    require(instances_per_type >= 1, ErrorCode::InvalidArgument, "instances_per_type must be >= 1");
    ApplianceCatalog catalog;
    for (const auto& type : types) {
        for (int k = 0; k < instances_per_type; ++k) {
            auto sig = synth_signature(type, mix_seed(seed, static_cast<std::uint64_t>(k)), cfg);
            sig.id = type + "#" + std::to_string(k);
            catalog.add(std::move(sig));
        }
    }
    return catalog;
}

// ---------------------------------------------------------------------------
// PLAID ingestion

namespace {

bool parse_number(std::string_view s, double& out) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.empty()) return false;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

// Returns false on any unparseable data row.
bool read_plaid_power(const fs::path& file, std::vector<double>& power) {
    std::ifstream in(file);
    if (!in) return false;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto comma = line.find(',');
        double current = 0.0, voltage = 0.0;
        const bool ok = comma != std::string::npos &&
                        parse_number(std::string_view(line).substr(0, comma), current) &&
                        parse_number(std::string_view(line).substr(comma + 1), voltage);
        if (!ok) {
            if (first) {
                first = false;
                continue;  // header row
            }
            return false;
        }
        first = false;
        power.push_back(current * voltage);
    }
    return !power.empty();
}

}  // namespace

PlaidIngestResult ingest_plaid(const fs::path& dir, const PlaidOptions& opts) {
    require(fs::is_directory(dir), ErrorCode::Io, "not a directory: " + dir.string());
    std::vector<fs::path> csvs;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") csvs.push_back(entry.path());
    }
    if (csvs.empty()) raise(ErrorCode::EmptyDirectory, "no CSV recordings in " + dir.string());
    std::sort(csvs.begin(), csvs.end());

    const fs::path meta_path = dir / opts.metadata_file;
    if (!fs::exists(meta_path)) raise(ErrorCode::MissingMetadata, "missing " + meta_path.string());
    json meta;
    try {
        std::ifstream in(meta_path);
        in >> meta;
    } catch (const json::exception& e) {
        raise(ErrorCode::MissingMetadata, std::string("unreadable metadata: ") + e.what());
    }
    require(meta.is_object(), ErrorCode::MissingMetadata, "metadata must be a JSON object");

    const auto cycle = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(opts.sample_rate_hz / opts.mains_hz)));
    const auto n_trans = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(opts.transient_s * opts.sample_rate_hz)));

    PlaidIngestResult result;
    for (const auto& file : csvs) {
        const std::string name = file.filename().string();
        if (!meta.contains(name)) {
            ++result.skipped_files;
            continue;
        }
        const json& entry = meta.at(name);
        std::string type;
        if (entry.is_string()) {
            type = entry.get<std::string>();
        } else if (entry.is_object() && entry.contains("type") && entry.at("type").is_string()) {
            type = entry.at("type").get<std::string>();
        } else {
            ++result.skipped_files;
            continue;
        }
        std::vector<double> power;
        if (!read_plaid_power(file, power)) {
            ++result.skipped_files;
            continue;
        }
        const std::size_t n = power.size();
        const std::size_t ns = std::min(cycle, n);
        std::vector<double> steady(power.end() - static_cast<std::ptrdiff_t>(ns), power.end());
        std::vector<double> transient(power.begin(), power.begin() + static_cast<std::ptrdiff_t>(std::min(n_trans, n)));
        result.signatures.push_back({
            .id = file.stem().string(),
            .appliance_type = type,
            .steady = TimeSeries(std::move(steady), opts.sample_rate_hz),
            .transient = TimeSeries(std::move(transient), opts.sample_rate_hz),
        });
    }
    return result;
}

// ---------------------------------------------------------------------------
// Household simulation

void HouseholdScenario::validate() const {
    require(duration_s > 0.0, ErrorCode::InvalidArgument, "scenario duration must be positive");
    require(base_rate_hz > 0.0, ErrorCode::InvalidArgument, "scenario base rate must be positive");
    require(!events.empty(), ErrorCode::InvalidArgument, "scenario needs at least one event");
    for (const auto& e : events) {
        require(e.on_s >= 0.0 && e.on_s < e.off_s && e.off_s <= duration_s + 1e-12, ErrorCode::InvalidArgument,
                "event for '" + e.appliance_id + "' must satisfy 0 <= on < off <= duration");
    }
}

TimeSeries simulate(const HouseholdScenario& scenario, const ApplianceCatalog& catalog) {
    scenario.validate();
    const auto n = static_cast<std::size_t>(std::lround(scenario.duration_s * scenario.base_rate_hz));
    require(n > 0, ErrorCode::InvalidArgument, "scenario shorter than one sample");
    std::vector<double> aggregate(n, 0.0);
    for (const auto& event : scenario.events) {
        const ApplianceSignature& sig = catalog.at(event.appliance_id);
        require(sig.steady.sample_rate_hz() == scenario.base_rate_hz, ErrorCode::InvalidArgument,
                "signature '" + sig.id + "' sample rate differs from the scenario base rate");
        const auto on = static_cast<std::size_t>(std::lround(event.on_s * scenario.base_rate_hz));
        const auto off = std::min(n, static_cast<std::size_t>(std::lround(event.off_s * scenario.base_rate_hz)));
        const auto& steady = sig.steady.values();
        const auto& transient = sig.transient.values();
        for (std::size_t i = on; i < off; ++i) {
            const std::size_t k = i - on;
            aggregate[i] += k < transient.size() ? transient[k] : steady[k % steady.size()];
        }
    }
    return {std::move(aggregate), scenario.base_rate_hz, Domain::Raw};
}

std::vector<std::string> active_types(const HouseholdScenario& scenario, const ApplianceCatalog& catalog, double t0,
                                      double t1) {
    std::set<std::string> types;
    for (const auto& e : scenario.events) {
        if (e.on_s < t1 && e.off_s > t0) types.insert(catalog.at(e.appliance_id).appliance_type);
    }
    return {types.begin(), types.end()};
}

HouseholdScenario random_scenario(const ApplianceCatalog& catalog, double duration_s, double base_rate_hz,
                                  const ScenarioParams& params, std::mt19937_64& rng) {
    require(catalog.size() > 0, ErrorCode::InvalidArgument, "empty catalog");
    require(params.min_events >= 1 && params.max_events >= params.min_events, ErrorCode::InvalidArgument,
            "bad event count range");
    require(params.align_s > 0.0 && params.min_on_s > 0.0 && params.max_on_s >= params.min_on_s,
            ErrorCode::InvalidArgument, "bad event timing parameters");
    const auto slots = static_cast<long>(std::floor(duration_s / params.align_s + 1e-9));
    require(slots >= 1, ErrorCode::InvalidArgument, "duration shorter than one alignment slot");

    std::uniform_int_distribution<int> n_events(params.min_events, params.max_events);
    std::uniform_int_distribution<std::size_t> pick(0, catalog.size() - 1);
    std::uniform_int_distribution<long> start_slot(0, slots - 1);
    std::uniform_real_distribution<double> on_len(params.min_on_s, params.max_on_s);

    HouseholdScenario scenario{.events = {}, .duration_s = duration_s, .base_rate_hz = base_rate_hz};
    const int count = n_events(rng);
    for (int i = 0; i < count; ++i) {
        const auto& sig = catalog.signatures()[pick(rng)];
        const long s0 = start_slot(rng);
        const long len = std::max(1L, std::lround(on_len(rng) / params.align_s));
        const long s1 = std::min(slots, s0 + len);
        scenario.events.push_back({sig.id, static_cast<double>(s0) * params.align_s,
                                   std::min(duration_s, static_cast<double>(s1) * params.align_s)});
    }
    return scenario;
}

// ---------------------------------------------------------------------------
// Dataset assembly

std::string_view to_string(Split split) noexcept {
    switch (split) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
    }
    return "train";
}

void DatasetConfig::validate() const {
    spec.validate();
    require(n_scenarios >= 1, ErrorCode::InvalidArgument, "n_scenarios must be >= 1");
    require(duration_s > 0.0 && window_s > 0.0 && window_s <= duration_s + 1e-12, ErrorCode::InvalidArgument,
            "need 0 < window_s <= duration_s");
    require(train_fraction >= 0.0 && val_fraction >= 0.0 && train_fraction + val_fraction <= 1.0,
            ErrorCode::InvalidArgument, "split fractions must be non-negative and sum to at most 1");
    require(!types.empty(), ErrorCode::InvalidArgument, "need at least one appliance type");
    const auto decim = to_count(synth.base_rate_hz / f_high_hz, "synthesis rate / f_high");
    (void)decim;
    const std::size_t len = high_window_len();
    if (len % static_cast<std::size_t>(spec.alpha) != 0) {
        raise(ErrorCode::LengthNotDivisible, "window of " + std::to_string(len) +
                                                 " high-res samples is not divisible by alpha " +
                                                 std::to_string(spec.alpha));
    }
}

std::size_t DatasetConfig::high_window_len() const { return to_count(window_s * f_high_hz, "window_s * f_high"); }

DatasetPlan plan_dataset(const DatasetConfig& cfg) {
    cfg.validate();
    DatasetPlan plan;
    plan.train_scenarios = static_cast<std::size_t>(std::floor(cfg.train_fraction * static_cast<double>(cfg.n_scenarios) + 1e-9));
    plan.val_scenarios = static_cast<std::size_t>(std::floor(cfg.val_fraction * static_cast<double>(cfg.n_scenarios) + 1e-9));
    plan.val_scenarios = std::min(plan.val_scenarios, cfg.n_scenarios - plan.train_scenarios);
    plan.test_scenarios = cfg.n_scenarios - plan.train_scenarios - plan.val_scenarios;
    const auto n_high = static_cast<std::size_t>(std::lround(cfg.duration_s * cfg.f_high_hz));
    plan.windows_per_scenario = n_high / cfg.high_window_len();
    plan.train_windows = plan.train_scenarios * plan.windows_per_scenario;
    plan.val_windows = plan.val_scenarios * plan.windows_per_scenario;
    plan.test_windows = plan.test_scenarios * plan.windows_per_scenario;
    return plan;
}

std::uint64_t catalog_seed(std::uint64_t dataset_seed) noexcept { return mix_seed(dataset_seed, 0xCA7A1064ull); }

DegradationSpec pair_spec(const DatasetConfig& cfg, const WindowPair& pair) {
    DegradationSpec spec = cfg.spec;
    spec.rng_seed = pair.noise_seed;
    return spec;
}

DatasetBundle build_dataset(const DatasetConfig& cfg) {
    const DatasetPlan plan = plan_dataset(cfg);
    const ApplianceCatalog catalog = make_catalog(cfg.types, cfg.instances_per_type, catalog_seed(cfg.seed), cfg.synth);
    const auto decim = static_cast<int>(to_count(cfg.synth.base_rate_hz / cfg.f_high_hz, "decimation"));
    const std::size_t len = cfg.high_window_len();

    DatasetBundle bundle{.config = cfg, .vocabulary = cfg.types, .train = {Split::Train, {}},
                         .val = {Split::Val, {}}, .test = {Split::Test, {}}};
    for (std::size_t s = 0; s < cfg.n_scenarios; ++s) {
        std::mt19937_64 rng(mix_seed(cfg.seed, 1000003ull * (s + 1)));
        const HouseholdScenario scenario = random_scenario(catalog, cfg.duration_s, cfg.synth.base_rate_hz, cfg.scenario, rng);
        const TimeSeries base = simulate(scenario, catalog);
        const TimeSeries high = preprocess(degrade(base, {.alpha = decim, .phase = 0, .noise_sigma = 0.0, .rng_seed = 0}));
        Dataset& target = s < plan.train_scenarios                         ? bundle.train
                          : s < plan.train_scenarios + plan.val_scenarios ? bundle.val
                                                                          : bundle.test;
        const auto offsets = window_offsets(high.size(), len, len);
        for (std::size_t w = 0; w < offsets.size(); ++w) {
            TimeSeries hi = slice(high, offsets[w], len);
            const double t0 = static_cast<double>(offsets[w]) / cfg.f_high_hz;
            const double t1 = t0 + cfg.window_s;
            const std::uint64_t noise_seed = mix_seed(mix_seed(cfg.spec.rng_seed, cfg.seed), (s << 20) + w);
            DegradationSpec spec = cfg.spec;
            spec.rng_seed = noise_seed;
            TimeSeries lo = degrade(hi, spec);
            target.pairs.push_back({.low_res = std::move(lo), .high_res = std::move(hi),
                                    .labels = active_types(scenario, catalog, t0, t1), .noise_seed = noise_seed,
                                    .scenario = s, .start_s = t0});
        }
    }
    return bundle;
}

// ---------------------------------------------------------------------------
// On-disk layout

namespace {

json config_to_json(const DatasetConfig& c) {
    return {
        {"n_scenarios", c.n_scenarios},
        {"duration_s", c.duration_s},
        {"window_s", c.window_s},
        {"f_high_hz", c.f_high_hz},
        {"alpha", c.spec.alpha},
        {"phase", c.spec.phase},
        {"noise_sigma", c.spec.noise_sigma},
        {"noise_seed", c.spec.rng_seed},
        {"seed", c.seed},
        {"train_fraction", c.train_fraction},
        {"val_fraction", c.val_fraction},
        {"instances_per_type", c.instances_per_type},
        {"types", c.types},
        {"scenario",
         {{"min_events", c.scenario.min_events},
          {"max_events", c.scenario.max_events},
          {"min_on_s", c.scenario.min_on_s},
          {"max_on_s", c.scenario.max_on_s},
          {"align_s", c.scenario.align_s}}},
        {"synth",
         {{"base_rate_hz", c.synth.base_rate_hz},
          {"mains_hz", c.synth.mains_hz},
          {"steady_cycles", c.synth.steady_cycles}}},
    };
}

DatasetConfig config_from_json(const json& j) {
    DatasetConfig c;
    c.n_scenarios = j.at("n_scenarios").get<std::size_t>();
    c.duration_s = j.at("duration_s").get<double>();
    c.window_s = j.at("window_s").get<double>();
    c.f_high_hz = j.at("f_high_hz").get<double>();
    c.spec.alpha = j.at("alpha").get<int>();
    c.spec.phase = j.at("phase").get<int>();
    c.spec.noise_sigma = j.at("noise_sigma").get<double>();
    c.spec.rng_seed = j.at("noise_seed").get<std::uint64_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.train_fraction = j.at("train_fraction").get<double>();
    c.val_fraction = j.at("val_fraction").get<double>();
    c.instances_per_type = j.at("instances_per_type").get<int>();
    c.types = j.at("types").get<std::vector<std::string>>();
    const auto& s = j.at("scenario");
    c.scenario = {s.at("min_events").get<int>(), s.at("max_events").get<int>(), s.at("min_on_s").get<double>(),
                  s.at("max_on_s").get<double>(), s.at("align_s").get<double>()};
    const auto& y = j.at("synth");
    c.synth = {y.at("base_rate_hz").get<double>(), y.at("mains_hz").get<double>(), y.at("steady_cycles").get<int>()};
    return c;
}

}  // namespace

void save_dataset(const fs::path& dir, const DatasetBundle& bundle) {
    fs::create_directories(dir / "pairs");
    json splits = json::object();
    for (const Dataset* ds : {&bundle.train, &bundle.val, &bundle.test}) {
        json arr = json::array();
        for (std::size_t i = 0; i < ds->pairs.size(); ++i) {
            const auto& p = ds->pairs[i];
            const std::string stem = std::string(to_string(ds->split)) + "_" + std::to_string(i);
            io::write_binary(dir / "pairs" / (stem + "_low.srpts"), p.low_res);
            io::write_binary(dir / "pairs" / (stem + "_high.srpts"), p.high_res);
            arr.push_back({{"low", "pairs/" + stem + "_low.srpts"},
                           {"high", "pairs/" + stem + "_high.srpts"},
                           {"labels", p.labels},
                           {"noise_seed", p.noise_seed},
                           {"scenario", p.scenario},
                           {"start_s", p.start_s}});
        }
        splits[std::string(to_string(ds->split))] = std::move(arr);
    }
    const json manifest = {{"format", "srp-dataset"},
                           {"version", 1},
                           {"alpha", bundle.config.spec.alpha},
                           {"seed", bundle.config.seed},
                           {"vocabulary", bundle.vocabulary},
                           {"config", config_to_json(bundle.config)},
                           {"splits", splits}};
    std::ofstream out(dir / "manifest.json");
    require(out.good(), ErrorCode::Io, "cannot write manifest in " + dir.string());
    out << manifest.dump(2) << '\n';
}

DatasetBundle load_dataset(const fs::path& dir) {
    const fs::path manifest_path = dir / "manifest.json";
    if (!fs::exists(manifest_path)) raise(ErrorCode::MissingArtifact, "no dataset manifest at " + manifest_path.string());
    json manifest;
    try {
        std::ifstream in(manifest_path);
        in >> manifest;
    } catch (const json::exception& e) {
        raise(ErrorCode::CorruptFile, std::string("manifest: ") + e.what());
    }
    try {
        DatasetBundle bundle{.config = config_from_json(manifest.at("config")),
                             .vocabulary = manifest.at("vocabulary").get<std::vector<std::string>>(),
                             .train = {Split::Train, {}}, .val = {Split::Val, {}}, .test = {Split::Test, {}}};
        for (Dataset* ds : {&bundle.train, &bundle.val, &bundle.test}) {
            for (const auto& e : manifest.at("splits").at(std::string(to_string(ds->split)))) {
                ds->pairs.push_back({.low_res = io::read_binary(dir / e.at("low").get<std::string>()),
                                     .high_res = io::read_binary(dir / e.at("high").get<std::string>()),
                                     .labels = e.at("labels").get<std::vector<std::string>>(),
                                     .noise_seed = e.at("noise_seed").get<std::uint64_t>(),
                                     .scenario = e.at("scenario").get<std::size_t>(),
                                     .start_s = e.at("start_s").get<double>()});
            }
        }
        return bundle;
    } catch (const json::exception& e) {
        raise(ErrorCode::CorruptFile, std::string("manifest: ") + e.what());
    }
}

}  // namespace srp::datagen
