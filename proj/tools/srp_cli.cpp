// srp: synthesize datasets, train SRPNet, reconstruct, evaluate, and run the
// NILM protocol. Exit codes: 0 ok, 2 config/validation, 3 numerical, 4 missing artifact.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "srp/baselines.hpp"
#include "srp/checkpoint.hpp"
#include "srp/config.hpp"
#include "srp/pipeline.hpp"
#include "srp/series_io.hpp"
#include "srp/svg_plot.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;
constexpr int kMissingArtifact = 4;

int exit_code_for(srp::ErrorCode code) {
    switch (code) {
        case srp::ErrorCode::NonFiniteLoss:
        case srp::ErrorCode::DidNotConverge: return kNumericalError;
        case srp::ErrorCode::MissingArtifact:
        case srp::ErrorCode::Io: return kMissingArtifact;
        default: return kConfigError;
    }
}

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::vector<std::string> overrides;
    std::vector<std::string> settings;
};

void add_common(CLI::App* cmd, Common& c, bool config_required = true) {
    auto* opt = cmd->add_option("--config", c.config, "experiment config (INI)");
    if (config_required) opt->required();
    cmd->add_option("--seed", c.seed, "master seed, overrides experiment.seed");
    cmd->add_option("--out", c.out, "output directory, overrides experiment.out");
    cmd->add_option("--set", c.overrides, "override a config key: section.key=value")->take_all();
    cmd->add_option("--setting", c.settings, "restrict to settings f_low:alpha (e.g. 100:10)")->take_all();
}

srp::ExperimentConfig resolve(const Common& c) {
    srp::ExperimentConfig cfg = c.config.empty() ? srp::ExperimentConfig{} : srp::load_config(c.config);
    for (const auto& kv : c.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) srp::raise(srp::ErrorCode::Config, "--set expects key=value, got " + kv);
        srp::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (c.seed) cfg.seed = *c.seed;
    if (!c.out.empty()) cfg.out_dir = c.out;
    if (!c.settings.empty()) {
        cfg.settings.clear();
        for (const auto& s : c.settings) cfg.settings.push_back(srp::parse_setting(s));
    }
    cfg.validate();
    return cfg;
}

// Timestamps only ever go to out/log.txt so that reports stay byte-stable.
class RunLog {
public:
    explicit RunLog(const fs::path& dir) {
        fs::create_directories(dir);
        file_.open(dir / "log.txt", std::ios::app);
    }
    void line(const std::string& text) {
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm tm{};
        gmtime_r(&now, &tm);
        file_ << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << ' ' << text << '\n';
        file_.flush();
        std::cerr << text << '\n';
    }

private:
    std::ofstream file_;
};

// Streams training progress line by line into the run log.
class LogBuf : public std::stringbuf {
public:
    explicit LogBuf(RunLog& log) : log_(log) {}
    int sync() override {
        std::string s = str();
        std::size_t pos;
        while ((pos = s.find('\n')) != std::string::npos) {
            log_.line(s.substr(0, pos));
            s.erase(0, pos + 1);
        }
        str(s);
        return 0;
    }

private:
    RunLog& log_;
};

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

int cmd_synthesize(const Common& c, bool dry_run) {
    const auto cfg = resolve(c);
    for (const auto& s : cfg.settings) {
        const auto plan = srp::datagen::plan_dataset(cfg.dataset_for(s));
        std::cout << s.tag() << ": scenarios " << plan.train_scenarios << '/' << plan.val_scenarios << '/'
                  << plan.test_scenarios << " windows " << plan.train_windows << '/' << plan.val_windows << '/'
                  << plan.test_windows << " (train/val/test)\n";
        if (dry_run) continue;
        RunLog log(cfg.out_dir);
        srp::pipeline::synthesize(cfg, s);
        log.line("synthesized " + s.tag() + " into " + srp::pipeline::dataset_dir(cfg, s).string());
    }
    if (!dry_run) srp::pipeline::write_text(cfg.out_dir / "config.ini", srp::dump_config(cfg));
    return kOk;
}

int cmd_degrade(const std::string& input, const std::string& output, int alpha, int phase, double sigma,
                std::uint64_t noise_seed, bool preprocess) {
    srp::TimeSeries x = srp::io::read_series(input);
    if (preprocess && x.domain() == srp::Domain::Raw) x = srp::preprocess(x);
    const srp::TimeSeries y =
        srp::degrade(x, {.alpha = alpha, .phase = phase, .noise_sigma = sigma, .rng_seed = noise_seed});
    srp::io::write_series(output, y);
    std::cout << "wrote " << y.size() << " samples at " << fmt(y.sample_rate_hz()) << " Hz to " << output << '\n';
    return kOk;
}

int cmd_train(const Common& c, bool resume) {
    const auto cfg = resolve(c);
    RunLog log(cfg.out_dir);
    for (const auto& s : cfg.settings) {
        const auto bundle = srp::pipeline::load_or_synthesize(cfg, s);
        log.line("training " + s.tag() + " on " + std::to_string(bundle.train.pairs.size()) + " windows for " +
                 std::to_string(cfg.train.total_updates()) + " updates");
        LogBuf buf(log);
        std::ostream progress(&buf);
        const auto run = srp::pipeline::train_setting(cfg, s, bundle.train, resume, &progress);
        progress.flush();
        std::cout << s.tag() << ": " << run.state.step << " updates, checkpoint "
                  << srp::pipeline::checkpoint_path(cfg, s).string() << '\n';
    }
    return kOk;
}

int cmd_infer(const std::string& checkpoint, const std::string& input, const std::string& output) {
    const auto ck = srp::nn::load_checkpoint(checkpoint);
    const srp::TimeSeries x = srp::io::read_series(input);
    const bool raw = x.domain() == srp::Domain::Raw;
    const auto t0 = std::chrono::steady_clock::now();
    srp::TimeSeries y = srp::nn::infer(ck.model, raw ? srp::preprocess(x) : x);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (raw) y = srp::inverse_preprocess(y);
    srp::io::write_series(output, y);
    std::cout << "wrote " << y.size() << " samples at " << fmt(y.sample_rate_hz()) << " Hz to " << output << " ("
              << fmt(secs) << " s)\n";
    return kOk;
}

srp::nn::SrpModel model_for(const srp::ExperimentConfig& cfg, const srp::Setting& s, const std::string& checkpoint) {
    const fs::path path = checkpoint.empty() ? srp::pipeline::checkpoint_path(cfg, s) : fs::path(checkpoint);
    return srp::nn::load_checkpoint(path).model;
}

int cmd_evaluate(const Common& c, const std::string& checkpoint) {
    const auto cfg = resolve(c);
    if (!checkpoint.empty() && cfg.settings.size() != 1) {
        srp::raise(srp::ErrorCode::Config, "--checkpoint needs exactly one --setting");
    }
    RunLog log(cfg.out_dir);
    std::vector<srp::pipeline::EvalReport> reports;
    for (const auto& s : cfg.settings) {
        const auto model = model_for(cfg, s, checkpoint);
        const auto bundle = srp::pipeline::load_or_synthesize(cfg, s);
        const auto t0 = std::chrono::steady_clock::now();
        reports.push_back(srp::pipeline::evaluate(cfg, s, model, bundle.test, srp::pipeline::setting_dir(cfg, s) / "plots"));
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        log.line("evaluated " + s.tag() + " on " + std::to_string(reports.back().n_windows) + " windows in " +
                 fmt(secs) + " s");
        for (const auto& m : reports.back().methods) {
            std::cout << s.tag() << ' ' << std::left << std::setw(13) << m.method << " rmse " << std::setw(12)
                      << fmt(m.rmse) << " dtw " << fmt(m.dtw) << '\n';
        }
    }
    srp::pipeline::write_text(cfg.out_dir / "eval_report.json", srp::pipeline::eval_json(reports));
    srp::pipeline::write_text(cfg.out_dir / "eval_report.csv", srp::pipeline::eval_csv(reports));
    return kOk;
}

int cmd_nilm(const Common& c, const std::string& checkpoint) {
    const auto cfg = resolve(c);
    if (!checkpoint.empty() && cfg.settings.size() != 1) {
        srp::raise(srp::ErrorCode::Config, "--checkpoint needs exactly one --setting");
    }
    RunLog log(cfg.out_dir);
    std::vector<srp::pipeline::NilmReport> reports;
    for (const auto& s : cfg.settings) {
        const auto model = model_for(cfg, s, checkpoint);
        reports.push_back(srp::pipeline::run_nilm(cfg, s, &model));
        log.line("nilm protocol done for " + s.tag());
        for (const auto& r : reports.back().rows) {
            std::cout << s.tag() << ' ' << std::left << std::setw(14) << r.method << " LF->LF " << fmt(r.lf_lf)
                      << "  HF->SRP " << fmt(r.hf_srp) << "  HF->HF " << fmt(r.hf_hf) << "  gain " << fmt(r.gain())
                      << '\n';
        }
    }
    srp::pipeline::write_text(cfg.out_dir / "nilm_report.json", srp::pipeline::nilm_json(reports));
    srp::pipeline::write_text(cfg.out_dir / "nilm_report.csv", srp::pipeline::nilm_csv(reports));
    return kOk;
}

int cmd_plot(const std::string& truth, const std::vector<std::string>& recon, const std::string& output,
             double zoom_start, double zoom_len, const std::string& title) {
    srp::plot::OverlayPlot p;
    p.title = title;
    p.zoom_start_s = zoom_start;
    p.zoom_len_s = zoom_len;
    const char* palette[] = {"#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2"};
    auto load = [](const std::string& path) {
        srp::TimeSeries s = srp::io::read_series(path);
        return s.domain() == srp::Domain::Preprocessed ? srp::inverse_preprocess(s) : s;
    };
    const srp::TimeSeries t = load(truth);
    p.traces.push_back({"ground truth", "black", t.values(), t.sample_rate_hz()});
    for (std::size_t i = 0; i < recon.size(); ++i) {
        const auto eq = recon[i].find('=');
        const std::string label = eq == std::string::npos ? fs::path(recon[i]).stem().string() : recon[i].substr(0, eq);
        const srp::TimeSeries r = load(eq == std::string::npos ? recon[i] : recon[i].substr(eq + 1));
        p.traces.push_back({label, palette[i % 6], r.values(), r.sample_rate_hz()});
    }
    srp::pipeline::write_text(output, srp::plot::render_svg(p));
    std::cout << "wrote " << output << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SRPNet time-series super-resolution toolkit"};
    app.require_subcommand(1);

    Common c;
    bool dry_run = false, resume = false, preprocess = false;
    std::string checkpoint, input, output, truth, title = "reconstruction";
    std::vector<std::string> recon;
    int alpha = 10, phase = 0;
    double sigma = 0.0, zoom_start = 0.0, zoom_len = 1.0;
    std::uint64_t noise_seed = 0;

    auto* synth = app.add_subcommand("synthesize", "build the synthetic dataset for each setting");
    add_common(synth, c);
    synth->add_flag("--dry-run", dry_run, "print split sizes without writing anything");

    auto* degrade = app.add_subcommand("degrade", "decimate a series and add Gaussian noise");
    degrade->add_option("--input", input, "series file (.csv or .srpts)")->required();
    degrade->add_option("--output", output, "output series file")->required();
    degrade->add_option("--alpha", alpha, "decimation factor")->check(CLI::PositiveNumber);
    degrade->add_option("--phase", phase, "kept index within each block");
    degrade->add_option("--sigma", sigma, "noise standard deviation");
    degrade->add_option("--noise-seed", noise_seed, "noise RNG seed");
    degrade->add_flag("--preprocess", preprocess, "apply the log transform to raw input first");

    auto* train = app.add_subcommand("train", "train SRPNet for each setting");
    add_common(train, c);
    train->add_flag("--resume", resume, "continue from the stored checkpoint");

    auto* infer = app.add_subcommand("infer", "super-resolve one low-res series");
    infer->add_option("--checkpoint", checkpoint, "model checkpoint")->required();
    infer->add_option("--input", input, "low-res series file")->required();
    infer->add_option("--output", output, "output series file")->required();

    auto* evaluate = app.add_subcommand("evaluate", "score linear, cubic, MAP and SRP reconstructions");
    add_common(evaluate, c);
    evaluate->add_option("--checkpoint", checkpoint, "checkpoint (default: <out>/<setting>/model.srpck)");

    auto* nilm = app.add_subcommand("nilm", "appliance classification under the LF/HF/SRP protocol");
    add_common(nilm, c);
    nilm->add_option("--checkpoint", checkpoint, "checkpoint (default: <out>/<setting>/model.srpck)");

    auto* plot = app.add_subcommand("plot", "overlay series files into an overview + zoom SVG");
    plot->add_option("--truth", truth, "reference series")->required();
    plot->add_option("--recon", recon, "reconstructions, optionally label=path")->take_all();
    plot->add_option("--output", output, "SVG path")->required();
    plot->add_option("--zoom-start", zoom_start, "zoom fragment start [s]");
    plot->add_option("--zoom-len", zoom_len, "zoom fragment length [s]");
    plot->add_option("--title", title, "figure title");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        if (*synth) return cmd_synthesize(c, dry_run);
        if (*degrade) return cmd_degrade(input, output, alpha, phase, sigma, noise_seed, preprocess);
        if (*train) return cmd_train(c, resume);
        if (*infer) return cmd_infer(checkpoint, input, output);
        if (*evaluate) return cmd_evaluate(c, checkpoint);
        if (*nilm) return cmd_nilm(c, checkpoint);
        if (*plot) return cmd_plot(truth, recon, output, zoom_start, zoom_len, title);
    } catch (const srp::Error& e) {
        std::cerr << "error [" << srp::to_string(e.code()) << "]: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error [io]: " << e.what() << '\n';
        return kMissingArtifact;
    }
    return kConfigError;
}
