#include <gtest/gtest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "srp/pipeline.hpp"
#include "srp/svg_plot.hpp"
#include "support/test_util.hpp"

namespace pl = srp::pipeline;
using srp::ErrorCode;
using testutil::code_of;

namespace {

srp::ExperimentConfig tiny(const std::filesystem::path& out) {
    auto cfg = srp::parse_config(R"(
[experiment]
seed = 3
settings = 100:10

[dataset]
n_scenarios = 8
duration_s = 2
window_s = 1
train_fraction = 0.5
val_fraction = 0.25
instances_per_type = 1

[model]
n_blocks = 1
channels = 4

[train]
batch_size = 2
lr_phase1 = 1e-3
updates_phase1 = 6
lr_phase2 = 1e-4
updates_phase2 = 4
checkpoint_every = 3

[nilm]
n_train = 22
n_test = 11
feature_dim = 16

[eval]
n_plots = 2
)");
    cfg.out_dir = out;
    return cfg;
}

std::size_t count_lines(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
}


}  // namespace

TEST(Pipeline, TrainWritesCheckpointAndLossCurve) {
    testutil::TempDir dir("pl_train");
    const auto cfg = tiny(dir.path());
    const srp::Setting s = cfg.settings.front();
    const auto data = pl::load_or_synthesize(cfg, s);
    EXPECT_TRUE(std::filesystem::exists(pl::dataset_dir(cfg, s) / "manifest.json"));
    const auto run = pl::train_setting(cfg, s, data.train, false);
    EXPECT_EQ(run.losses.size(), 10U);
    EXPECT_TRUE(std::filesystem::exists(pl::checkpoint_path(cfg, s)));
    EXPECT_EQ(count_lines(pl::setting_dir(cfg, s) / "loss.csv"), 11U);  // header + one per update

    const auto mem = pl::train_in_memory(cfg, s, data.train);
    EXPECT_EQ(mem.losses, run.losses);
}

TEST(Pipeline, ResumeContinuesTheSameTrajectory) {
    testutil::TempDir dir("pl_resume");
    auto cfg = tiny(dir.path());
    const srp::Setting s = cfg.settings.front();
    const auto data = pl::load_or_synthesize(cfg, s);
    const auto reference = pl::train_in_memory(cfg, s, data.train);

    auto short_cfg = cfg;
    short_cfg.train.updates_phase2 = 0;
    pl::train_setting(short_cfg, s, data.train, false);
    EXPECT_EQ(count_lines(pl::setting_dir(cfg, s) / "loss.csv"), 7U);
    const auto resumed = pl::train_setting(cfg, s, data.train, true);
    EXPECT_EQ(resumed.losses.size(), 4U);
    EXPECT_EQ(count_lines(pl::setting_dir(cfg, s) / "loss.csv"), 11U);
    std::vector<double> tail(reference.losses.end() - 4, reference.losses.end());
    EXPECT_EQ(resumed.losses, tail);
    EXPECT_EQ(resumed.model.forward(srp::nn::Tensor<float>(1, 1, 100, 0.3F)),
              reference.model.forward(srp::nn::Tensor<float>(1, 1, 100, 0.3F)));
}

TEST(Pipeline, DatasetFromAnotherConfigIsRejected) {
    testutil::TempDir dir("pl_stale");
    auto cfg = tiny(dir.path());
    const srp::Setting s = cfg.settings.front();
    pl::load_or_synthesize(cfg, s);
    cfg.dataset.n_scenarios = 9;
    EXPECT_EQ(code_of([&] { pl::load_or_synthesize(cfg, s); }), ErrorCode::Config);
}

TEST(Pipeline, EvaluateReportsAllMethodsAndPlots) {
    testutil::TempDir dir("pl_eval");
    const auto cfg = tiny(dir.path());
    const srp::Setting s = cfg.settings.front();
    const auto data = pl::load_or_synthesize(cfg, s);
    const auto run = pl::train_in_memory(cfg, s, data.train);
    const auto report = pl::evaluate(cfg, s, run.model, data.test, dir / "plots");

    EXPECT_EQ(report.n_windows, data.test.pairs.size());
    for (const char* m : {"linear", "cubic", "map", "srp"}) {
        EXPECT_GT(report.at(m).rmse, 0.0) << m;
        EXPECT_GT(report.at(m).dtw, 0.0) << m;
    }
    EXPECT_EQ(report.at("ground_truth").rmse, 0.0);
    EXPECT_EQ(report.at("ground_truth").dtw, 0.0);

    const auto csv = pl::eval_csv({report});
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "method,f_low_hz,alpha,rmse,dtw");
    const auto js = nlohmann::json::parse(pl::eval_json({report}));
    EXPECT_EQ(js.at("settings").at(0).at("methods").size(), 5U);

    std::size_t svgs = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir / "plots")) {
        if (e.path().extension() != ".svg") continue;
        ++svgs;
        boost::property_tree::ptree tree;
        std::ifstream in(e.path());
        EXPECT_NO_THROW(boost::property_tree::read_xml(in, tree)) << e.path();
        EXPECT_EQ(tree.count("svg"), 1U);
    }
    EXPECT_EQ(svgs, 2U);
}

TEST(Pipeline, NilmReportHasNineCells) {
    testutil::TempDir dir("pl_nilm");
    const auto cfg = tiny(dir.path());
    const srp::Setting s = cfg.settings.front();
    const srp::nn::SrpModel model(cfg.model_for(s), cfg.model_seed());
    const auto report = pl::run_nilm(cfg, s, &model);
    ASSERT_EQ(report.rows.size(), 3U);
    for (const auto& r : report.rows) {
        for (double a : {r.lf_lf, r.hf_srp, r.hf_hf}) {
            EXPECT_GE(a, 0.0);
            EXPECT_LE(a, 1.0);
        }
    }
    EXPECT_EQ(pl::nilm_csv({report}), pl::nilm_csv({pl::run_nilm(cfg, s, &model)}));
    EXPECT_EQ(code_of([&] { pl::run_nilm(cfg, s, nullptr); }), ErrorCode::MissingArtifact);
}

TEST(Svg, WellFormedWithEscapedTitle) {
    srp::plot::OverlayPlot p;
    p.title = "a < b & \"c\"";
    p.traces.push_back({"truth", "#000", std::vector<double>(300, 1.0), 100.0});
    p.traces.push_back({"srp", "#c00", std::vector<double>(300, 2.0), 100.0});
    p.zoom_start_s = 1.0;
    const std::string svg = srp::plot::render_svg(p);
    std::istringstream in(svg);
    boost::property_tree::ptree tree;
    EXPECT_NO_THROW(boost::property_tree::read_xml(in, tree));
    EXPECT_NE(svg.find("a &lt; b &amp; &quot;c&quot;"), std::string::npos);
    EXPECT_EQ(srp::plot::xml_escape("<&>"), "&lt;&amp;&gt;");
}
