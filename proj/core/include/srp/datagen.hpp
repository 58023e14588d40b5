#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "srp/signal.hpp"

namespace srp::datagen {

/// Type-level description used to synthesize appliance instances.
/// Harmonic amplitudes are relative to the mean power for the odd
/// harmonics 1, 3, 5, 7, 9 of the mains frequency.
struct ApplianceProfile {
    std::string type;
    double power_min_kw;
    double power_max_kw;
    std::array<double, 5> harmonics;
    std::array<double, 5> phases;
    double inrush_gain;   // peak transient excess relative to steady power
    double inrush_tau_s;  // decay constant of the start-up burst
    double transient_s;   // length of the stored transient waveform
};

/// Eleven appliance types, mirroring the PLAID taxonomy.
const std::vector<ApplianceProfile>& default_profiles();
std::vector<std::string> default_types();
const ApplianceProfile& find_profile(std::string_view type);

struct SynthConfig {
    double base_rate_hz = 1000.0;
    double mains_hz = 50.0;
    int steady_cycles = 1;
};

struct ApplianceSignature {
    std::string id;
    std::string appliance_type;
    TimeSeries steady;
    TimeSeries transient;
};

ApplianceSignature synth_signature(std::string_view appliance_type, std::uint64_t seed,
                                   const SynthConfig& cfg = {});

class ApplianceCatalog {
public:
    ApplianceCatalog() = default;
    explicit ApplianceCatalog(std::vector<ApplianceSignature> signatures);

    void add(ApplianceSignature signature);
    [[nodiscard]] const ApplianceSignature& at(std::string_view id) const;
    [[nodiscard]] const ApplianceSignature* find(std::string_view id) const noexcept;
    [[nodiscard]] const std::vector<ApplianceSignature>& signatures() const noexcept { return signatures_; }
    [[nodiscard]] std::size_t size() const noexcept { return signatures_.size(); }

private:
    std::vector<ApplianceSignature> signatures_;
};

/// `instances_per_type` synthetic signatures per type, ids "<type>#<k>".
ApplianceCatalog make_catalog(const std::vector<std::string>& types, int instances_per_type,
                              std::uint64_t seed, const SynthConfig& cfg = {});

/// Catalog seed derived from a dataset seed; shared by every consumer of that dataset.
std::uint64_t catalog_seed(std::uint64_t dataset_seed) noexcept;

struct PlaidOptions {
    double sample_rate_hz = 30000.0;
    double mains_hz = 50.0;
    double transient_s = 0.5;
    std::string metadata_file = "metadata.json";
};

struct PlaidIngestResult {
    std::vector<ApplianceSignature> signatures;
    std::size_t skipped_files = 0;  // unparseable rows or absent from metadata
};

/// Reads `current,voltage` CSVs from `dir`; `metadata.json` maps file name to
/// appliance type (either a string or an object with a "type" member).
PlaidIngestResult ingest_plaid(const std::filesystem::path& dir, const PlaidOptions& opts = {});

struct Event {
    std::string appliance_id;
    double on_s;
    double off_s;
};

struct HouseholdScenario {
    std::vector<Event> events;
    double duration_s = 0.0;
    double base_rate_hz = 1000.0;

    void validate() const;
};

TimeSeries simulate(const HouseholdScenario& scenario, const ApplianceCatalog& catalog);

/// Sorted, de-duplicated appliance types whose event interval intersects [t0, t1).
std::vector<std::string> active_types(const HouseholdScenario& scenario, const ApplianceCatalog& catalog,
                                      double t0, double t1);

struct ScenarioParams {
    int min_events = 1;
    int max_events = 6;
    double min_on_s = 1.0;
    double max_on_s = 12.0;
    double align_s = 0.02;  // event edges snap to whole mains cycles
};

HouseholdScenario random_scenario(const ApplianceCatalog& catalog, double duration_s, double base_rate_hz,
                                  const ScenarioParams& params, std::mt19937_64& rng);

enum class Split { Train, Val, Test };
std::string_view to_string(Split split) noexcept;

struct WindowPair {
    TimeSeries low_res;
    TimeSeries high_res;
    std::vector<std::string> labels;
    std::uint64_t noise_seed = 0;
    std::size_t scenario = 0;
    double start_s = 0.0;
};

struct Dataset {
    Split split = Split::Train;
    std::vector<WindowPair> pairs;
};

struct DatasetConfig {
    std::size_t n_scenarios = 16;
    double duration_s = 30.0;
    double window_s = 1.0;
    double f_high_hz = 1000.0;
    DegradationSpec spec{.alpha = 10, .phase = 0, .noise_sigma = 0.01, .rng_seed = 0};
    std::uint64_t seed = 0;
    double train_fraction = 0.875;
    double val_fraction = 0.0625;
    int instances_per_type = 4;
    std::vector<std::string> types = default_types();
    ScenarioParams scenario{};
    SynthConfig synth{};

    void validate() const;
    [[nodiscard]] std::size_t high_window_len() const;
};

struct DatasetPlan {
    std::size_t train_scenarios = 0, val_scenarios = 0, test_scenarios = 0;
    std::size_t windows_per_scenario = 0;
    std::size_t train_windows = 0, val_windows = 0, test_windows = 0;
};

/// Size check without synthesizing anything.
DatasetPlan plan_dataset(const DatasetConfig& cfg);

struct DatasetBundle {
    DatasetConfig config;
    std::vector<std::string> vocabulary;
    Dataset train, val, test;
};

DatasetBundle build_dataset(const DatasetConfig& cfg);

/// Per-window degradation spec as used by build_dataset for that window.
DegradationSpec pair_spec(const DatasetConfig& cfg, const WindowPair& pair);

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept;

/// Dataset on disk: manifest.json + one packed series file per window side.
void save_dataset(const std::filesystem::path& dir, const DatasetBundle& bundle);
DatasetBundle load_dataset(const std::filesystem::path& dir);

}  // namespace srp::datagen
