#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "srp/checkpoint.hpp"
#include "srp/config.hpp"

namespace srp::pipeline {

std::filesystem::path setting_dir(const ExperimentConfig& cfg, const Setting& s);
std::filesystem::path dataset_dir(const ExperimentConfig& cfg, const Setting& s);
std::filesystem::path checkpoint_path(const ExperimentConfig& cfg, const Setting& s);

/// Worker count from SRP_THREADS (default 1).
unsigned thread_count();

/// Runs body(i) for i in [0, n) on thread_count() workers.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

datagen::DatasetBundle synthesize(const ExperimentConfig& cfg, const Setting& s);

/// Loads the dataset written by synthesize, or synthesizes it when absent.
datagen::DatasetBundle load_or_synthesize(const ExperimentConfig& cfg, const Setting& s);

struct TrainRun {
    nn::SrpModel model;
    nn::AdamState<float> state;
    std::vector<double> losses;  // this call only
};

/// Trains to cfg.train.total_updates(). Writes the checkpoint and loss.csv
/// (one row per update) into the setting directory. With resume, training
/// continues from the stored checkpoint and its optimizer state.
TrainRun train_setting(const ExperimentConfig& cfg, const Setting& s, const datagen::Dataset& train, bool resume,
                       std::ostream* log = nullptr);

/// In-memory training; no files.
TrainRun train_in_memory(const ExperimentConfig& cfg, const Setting& s, const datagen::Dataset& train);

struct MethodScore {
    std::string method;
    double rmse = 0.0;
    double dtw = 0.0;
};

struct EvalReport {
    Setting setting;
    std::size_t n_windows = 0;
    std::vector<MethodScore> methods;  // linear, cubic, map, srp, ground_truth

    [[nodiscard]] const MethodScore& at(const std::string& method) const;
};

/// Interpolation in the preprocessed domain, scoring in watts, averaged per window.
/// With plot_dir set, one overview/zoom SVG per test scenario (up to eval.n_plots).
EvalReport evaluate(const ExperimentConfig& cfg, const Setting& s, const nn::SrpModel& model,
                    const datagen::Dataset& test, const std::optional<std::filesystem::path>& plot_dir = {});

std::string eval_json(const std::vector<EvalReport>& reports);
std::string eval_csv(const std::vector<EvalReport>& reports);

struct NilmReport {
    Setting setting;
    std::vector<nilm::NilmRow> rows;  // knn, decision_tree, svm
};

/// Cross-resolution protocol on the activation benchmark for one setting. The SRP
/// column needs a model; a null model raises MissingArtifact.
NilmReport run_nilm(const ExperimentConfig& cfg, const Setting& s, const nn::SrpModel* model);

std::string nilm_json(const std::vector<NilmReport>& reports);
std::string nilm_csv(const std::vector<NilmReport>& reports);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace srp::pipeline
