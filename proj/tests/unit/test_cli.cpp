#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "support/test_util.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result run(const std::string& args) {
    const std::string cmd = std::string(SRP_CLI_PATH) + " " + args + " 2>/dev/null";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

constexpr const char* kTiny = R"([experiment]
seed = 5
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
updates_phase1 = 5
updates_phase2 = 3
checkpoint_every = 4

[nilm]
n_train = 22
n_test = 11

[eval]
n_plots = 1
)";

fs::path write_tiny(const testutil::TempDir& dir) {
    const fs::path p = dir / "tiny.ini";
    std::ofstream(p) << kTiny;
    return p;
}

void write_raw_csv(const fs::path& p, int n, double rate_hz, double step) {
    std::ofstream csv(p);
    csv << "t,value\n";
    for (int i = 0; i < n; ++i) csv << i / rate_hz << ',' << step * (i % 7) << '\n';
    std::ofstream(fs::path(p).replace_extension(".json")) << R"({"sample_rate_hz": )" << rate_hz
                                                           << R"(, "domain": "raw"})";
}

}  // namespace

TEST(Cli, UsageErrorsExitWithTwo) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("train").code, 2);  // --config is required
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, EmptyOrInvalidConfigExitsWithTwo) {
    testutil::TempDir dir("cli_cfg");
    std::ofstream(dir / "empty.ini") << "";
    EXPECT_EQ(run("synthesize --dry-run --config " + (dir / "empty.ini").string()).code, 2);
    const auto tiny = write_tiny(dir);
    EXPECT_EQ(run("synthesize --dry-run --config " + tiny.string() + " --set train.batch_size=0").code, 2);
    EXPECT_EQ(run("synthesize --dry-run --config " + tiny.string() + " --set nonsense").code, 2);
    EXPECT_EQ(run("synthesize --dry-run --config " + tiny.string() + " --setting 10:3").code, 2);
}

TEST(Cli, DryRunWritesNothing) {
    testutil::TempDir dir("cli_dry");
    const auto tiny = write_tiny(dir);
    const fs::path out = dir / "out";
    const auto r = run("synthesize --dry-run --config " + tiny.string() + " --out " + out.string());
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("fl100_a10: scenarios 4/2/2"), std::string::npos) << r.out;
    EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, MissingCheckpointExitsWithFour) {
    testutil::TempDir dir("cli_missing");
    const auto tiny = write_tiny(dir);
    const std::string common = " --config " + tiny.string() + " --out " + (dir / "out").string();
    EXPECT_EQ(run("evaluate" + common).code, 4);
    EXPECT_EQ(run("nilm" + common).code, 4);
    EXPECT_EQ(run("infer --checkpoint " + (dir / "none.srpck").string() + " --input x.csv --output y.csv").code, 4);
}

TEST(Cli, DivergentTrainingExitsWithThree) {
    testutil::TempDir dir("cli_nan");
    const auto tiny = write_tiny(dir);
    const auto r = run("train --config " + tiny.string() + " --out " + (dir / "out").string() +
                       " --set train.lr_phase1=1e30 --set train.updates_phase1=40");
    EXPECT_EQ(r.code, 3);
}

TEST(Cli, DegradeCsvSeries) {
    testutil::TempDir dir("cli_degrade");
    write_raw_csv(dir / "x.csv", 40, 1000.0, 0.1);
    const auto r = run("degrade --input " + (dir / "x.csv").string() + " --output " + (dir / "y.csv").string() +
                       " --alpha 4 --preprocess");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("wrote 10 samples at 250 Hz"), std::string::npos) << r.out;
    EXPECT_TRUE(fs::exists(dir / "y.csv"));
    EXPECT_EQ(run("degrade --input " + (dir / "x.csv").string() + " --output " + (dir / "z.csv").string() +
                  " --alpha 3")
                  .code,
              2);
}

TEST(Cli, EndToEndReportsAreDeterministic) {
    testutil::TempDir dir("cli_e2e");
    const auto tiny = write_tiny(dir);
    std::string eval_first, nilm_first;
    for (int pass = 0; pass < 2; ++pass) {
        const fs::path out = dir / ("run" + std::to_string(pass));
        const std::string common = " --config " + tiny.string() + " --out " + out.string();
        ASSERT_EQ(run("synthesize" + common).code, 0);
        ASSERT_EQ(run("train" + common).code, 0);
        EXPECT_TRUE(fs::exists(out / "fl100_a10" / "model.srpck"));
        ASSERT_EQ(run("evaluate" + common).code, 0);
        ASSERT_EQ(run("nilm" + common).code, 0);

        const auto nilm = nlohmann::json::parse(slurp(out / "nilm_report.json"));
        std::size_t cells = 0;
        for (const auto& row : nilm.at("rows")) {
            for (const char* k : {"lf_lf", "hf_srp", "hf_hf"}) cells += row.contains(k) ? 1 : 0;
        }
        EXPECT_EQ(cells, 9U);
        EXPECT_FALSE(fs::is_empty(out / "fl100_a10" / "plots"));
        if (pass == 0) {
            eval_first = slurp(out / "eval_report.json");
            nilm_first = slurp(out / "nilm_report.json");
        } else {
            EXPECT_EQ(slurp(out / "eval_report.json"), eval_first);
            EXPECT_EQ(slurp(out / "nilm_report.json"), nilm_first);
        }
    }

    const fs::path out = dir / "run0";
    const std::string ck = (out / "fl100_a10" / "model.srpck").string();
    write_raw_csv(dir / "low.csv", 30, 100.0, 0.05);
    const auto inf = run("infer --checkpoint " + ck + " --input " + (dir / "low.csv").string() + " --output " +
                         (dir / "high.csv").string());
    EXPECT_EQ(inf.code, 0);
    EXPECT_NE(inf.out.find("wrote 300 samples at 1000 Hz"), std::string::npos) << inf.out;
    EXPECT_EQ(run("plot --truth " + (dir / "high.csv").string() + " --recon srp=" + (dir / "high.csv").string() +
                  " --output " + (dir / "p.svg").string())
                  .code,
              0);
    EXPECT_TRUE(fs::exists(dir / "p.svg"));
    EXPECT_EQ(run("train --resume --config " + tiny.string() + " --out " + out.string() +
                  " --set train.updates_phase2=6")
                  .code,
              0);
}
