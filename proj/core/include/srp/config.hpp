#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "srp/baselines.hpp"
#include "srp/datagen.hpp"
#include "srp/metrics.hpp"
#include "srp/nilm.hpp"
#include "srp/srpnet.hpp"
#include "srp/train.hpp"

namespace srp {

/// One (f_l, alpha) experiment setting; f_h = alpha * f_l.
struct Setting {
    double f_low_hz = 100.0;
    int alpha = 10;

    [[nodiscard]] double f_high_hz() const noexcept { return f_low_hz * alpha; }
    /// Directory-safe name, e.g. "fl100_a10".
    [[nodiscard]] std::string tag() const;
    friend bool operator==(const Setting&, const Setting&) = default;
};

Setting parse_setting(std::string_view text);  // "100:10"

struct EvalOptions {
    std::size_t max_windows = 0;  // 0 evaluates the whole test split
    std::size_t n_plots = 3;
    double zoom_s = 1.0;
    bool with_map = true;
};

struct ExperimentConfig {
    std::uint64_t seed = 0;
    std::filesystem::path out_dir = "out";
    std::vector<Setting> settings = {{10.0, 10}, {100.0, 10}, {10.0, 100}};

    datagen::DatasetConfig dataset{};
    nn::SrpHyper model{};
    nn::TrainConfig train{};
    metrics::DtwConfig dtw{};
    baselines::MapConfig map{};
    nilm::ActivationConfig activation{};
    nilm::ProtocolOptions protocol{};
    EvalOptions eval{};

    void validate() const;

    /// Stage configs with the setting and seed filled in.
    [[nodiscard]] datagen::DatasetConfig dataset_for(const Setting& s) const;
    [[nodiscard]] nn::SrpHyper model_for(const Setting& s) const;
    [[nodiscard]] nn::TrainConfig train_for(const Setting& s) const;
    [[nodiscard]] nilm::ActivationConfig activation_for(const Setting& s) const;
    [[nodiscard]] std::uint64_t model_seed() const noexcept;
};

/// Keys are "section.name"; unknown keys and unparsable values throw Config errors.
void apply_override(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// INI text: [section] headers, `key = value`, `#`/`;` comments.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical INI rendering of every key, in a fixed order.
std::string dump_config(const ExperimentConfig& cfg);

std::vector<std::string> config_keys();

}  // namespace srp
