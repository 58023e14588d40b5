#include "srp/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "srp/baselines.hpp"
#include "srp/metrics.hpp"
#include "srp/svg_plot.hpp"

namespace srp::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kMethods = {"linear", "cubic", "map", "srp"};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void check_model_setting(const nn::SrpModel& model, const Setting& s) {
    if (static_cast<int>(model.alpha()) != s.alpha) {
        raise(ErrorCode::Config, "model alpha " + std::to_string(model.alpha()) + " does not match setting " + s.tag());
    }
}

std::vector<std::pair<std::size_t, double>> read_loss_csv(const fs::path& path, std::size_t below) {
    std::vector<std::pair<std::size_t, double>> rows;
    std::ifstream in(path);
    if (!in) return rows;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        if (comma == std::string::npos) continue;
        const auto u = static_cast<std::size_t>(std::stoull(line.substr(0, comma)));
        if (u < below) rows.emplace_back(u, std::stod(line.substr(comma + 1)));
    }
    return rows;
}

void write_loss_csv(const fs::path& path, const std::vector<std::pair<std::size_t, double>>& rows) {
    std::ostringstream out;
    out << "update,loss\n";
    for (const auto& [u, l] : rows) out << u << ',' << fmt(l) << '\n';
    write_text(path, out.str());
}

}  // namespace

fs::path setting_dir(const ExperimentConfig& cfg, const Setting& s) { return cfg.out_dir / s.tag(); }
fs::path dataset_dir(const ExperimentConfig& cfg, const Setting& s) { return setting_dir(cfg, s) / "dataset"; }
fs::path checkpoint_path(const ExperimentConfig& cfg, const Setting& s) { return setting_dir(cfg, s) / "model.srpck"; }

unsigned thread_count() {
    const char* env = std::getenv("SRP_THREADS");
    if (env == nullptr || *env == '\0') return 1;
    const long n = std::strtol(env, nullptr, 10);
    return n >= 1 ? static_cast<unsigned>(std::min(n, 256L)) : 1u;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) {
                try {
                    body(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorCode::Io, "cannot write " + path.string());
    out << text;
    require(out.good(), ErrorCode::Io, "failed writing " + path.string());
}

datagen::DatasetBundle synthesize(const ExperimentConfig& cfg, const Setting& s) {
    datagen::DatasetBundle bundle = datagen::build_dataset(cfg.dataset_for(s));
    datagen::save_dataset(dataset_dir(cfg, s), bundle);
    return bundle;
}

datagen::DatasetBundle load_or_synthesize(const ExperimentConfig& cfg, const Setting& s) {
    const fs::path dir = dataset_dir(cfg, s);
    if (!fs::exists(dir / "manifest.json")) return synthesize(cfg, s);
    datagen::DatasetBundle bundle = datagen::load_dataset(dir);
    const auto want = cfg.dataset_for(s);
    const auto& got = bundle.config;
    if (got.seed != want.seed || got.spec.alpha != want.spec.alpha || got.f_high_hz != want.f_high_hz ||
        got.n_scenarios != want.n_scenarios || got.window_s != want.window_s ||
        got.spec.noise_sigma != want.spec.noise_sigma || got.duration_s != want.duration_s) {
        raise(ErrorCode::Config, "dataset in " + dir.string() + " was built from a different config; re-run synthesize");
    }
    return bundle;
}

TrainRun train_in_memory(const ExperimentConfig& cfg, const Setting& s, const datagen::Dataset& train) {
    TrainRun run{.model = nn::SrpModel(cfg.model_for(s), cfg.model_seed()), .state = {}, .losses = {}};
    run.losses = nn::train(run.model, run.state, train, cfg.train_for(s)).loss_history;
    return run;
}

TrainRun train_setting(const ExperimentConfig& cfg, const Setting& s, const datagen::Dataset& train, bool resume,
                       std::ostream* log) {
    const fs::path dir = setting_dir(cfg, s);
    fs::create_directories(dir);
    const fs::path ckpt = checkpoint_path(cfg, s);
    const fs::path loss_path = dir / "loss.csv";

    TrainRun run;
    if (resume) {
        nn::Checkpoint ck = nn::load_checkpoint(ckpt);
        if (!(ck.model.hyper() == cfg.model_for(s))) {
            raise(ErrorCode::Config, "checkpoint architecture differs from the configured model");
        }
        run.model = std::move(ck.model);
        if (ck.optimizer) {
            run.state = std::move(*ck.optimizer);
        } else {
            run.state = nn::AdamState<float>::zeros_like(run.model.parameters());
            run.state.step = ck.update_count;
        }
    } else {
        run.model = nn::SrpModel(cfg.model_for(s), cfg.model_seed());
    }

    auto rows = resume ? read_loss_csv(loss_path, static_cast<std::size_t>(run.state.step))
                       : std::vector<std::pair<std::size_t, double>>{};
    nn::TrainConfig tc = cfg.train_for(s);
    tc.diagnostic_path = (dir / "diagnostic.json").string();
    nn::TrainHooks hooks;
    hooks.on_update = [&](std::size_t u, double loss) {
        rows.emplace_back(u, loss);
        if (log != nullptr && ((u + 1) % 100 == 0 || u + 1 == tc.total_updates())) {
            *log << "update " << (u + 1) << '/' << tc.total_updates() << " loss " << fmt(loss) << '\n';
        }
    };
    hooks.on_checkpoint = [&](std::size_t) {
        nn::save_checkpoint(ckpt, run.model, &run.state);
        write_loss_csv(loss_path, rows);
    };
    const nn::TrainResult result = nn::train(run.model, run.state, train, tc, hooks);
    run.losses = result.loss_history;
    nn::save_checkpoint(ckpt, run.model, &run.state);
    write_loss_csv(loss_path, rows);
    return run;
}

const MethodScore& EvalReport::at(const std::string& method) const {
    for (const auto& m : methods) {
        if (m.method == method) return m;
    }
    raise(ErrorCode::InvalidArgument, "no method '" + method + "' in report");
}

EvalReport evaluate(const ExperimentConfig& cfg, const Setting& s, const nn::SrpModel& model,
                    const datagen::Dataset& test, const std::optional<fs::path>& plot_dir) {
    check_model_setting(model, s);
    require(!test.pairs.empty(), ErrorCode::EmptyInput, "test split is empty");
    const std::size_t n = cfg.eval.max_windows == 0 ? test.pairs.size()
                                                    : std::min(cfg.eval.max_windows, test.pairs.size());
    const int alpha = s.alpha;

    std::vector<TimeSeries> lows;
    lows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) lows.push_back(test.pairs[i].low_res);
    const std::size_t batch = 32;
    const std::size_t n_batches = (n + batch - 1) / batch;
    std::vector<std::vector<TimeSeries>> srp_chunks(n_batches);
    parallel_for(n_batches, [&](std::size_t b) {
        const std::vector<TimeSeries> part(lows.begin() + static_cast<std::ptrdiff_t>(b * batch),
                                           lows.begin() + static_cast<std::ptrdiff_t>(std::min(n, (b + 1) * batch)));
        srp_chunks[b] = nn::infer_batch(model, part, batch);
    });

    // Scenarios that get a plot keep their reconstructions.
    std::vector<std::size_t> plotted;
    if (plot_dir) {
        for (std::size_t i = 0; i < n && plotted.size() < cfg.eval.n_plots; ++i) {
            if (std::find(plotted.begin(), plotted.end(), test.pairs[i].scenario) == plotted.end()) {
                plotted.push_back(test.pairs[i].scenario);
            }
        }
    }
    auto is_plotted = [&](std::size_t scenario) {
        return std::find(plotted.begin(), plotted.end(), scenario) != plotted.end();
    };

    const std::size_t n_methods = kMethods.size();
    std::vector<double> rmse(n * n_methods, 0.0), dtw(n * n_methods, 0.0);
    std::vector<std::vector<TimeSeries>> kept(n);
    parallel_for(n, [&](std::size_t i) {
        const auto& pair = test.pairs[i];
        const TimeSeries truth = inverse_preprocess(pair.high_res);
        std::vector<TimeSeries> recon;
        recon.push_back(baselines::upsample_linear(pair.low_res, alpha));
        recon.push_back(baselines::upsample_cubic(pair.low_res, alpha));
        if (cfg.eval.with_map) {
            DegradationSpec spec = cfg.dataset_for(s).spec;
            spec.rng_seed = pair.noise_seed;
            recon.push_back(baselines::map_upsample(pair.low_res, spec, cfg.map));
        } else {
            recon.push_back(baselines::upsample_linear(pair.low_res, alpha));
        }
        recon.push_back(srp_chunks[i / batch][i % batch]);
        for (std::size_t m = 0; m < n_methods; ++m) {
            TimeSeries raw = inverse_preprocess(recon[m]);
            rmse[i * n_methods + m] = metrics::rmse(raw, truth);
            dtw[i * n_methods + m] = metrics::windowed_dtw(raw, truth, cfg.dtw);
            recon[m] = std::move(raw);
        }
        if (is_plotted(pair.scenario)) {
            recon.push_back(truth);
            kept[i] = std::move(recon);
        }
    });

    EvalReport report{.setting = s, .n_windows = n, .methods = {}};
    for (std::size_t m = 0; m < n_methods; ++m) {
        if (m == 2 && !cfg.eval.with_map) continue;
        double r = 0.0, d = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            r += rmse[i * n_methods + m];
            d += dtw[i * n_methods + m];
        }
        report.methods.push_back({kMethods[m], r / static_cast<double>(n), d / static_cast<double>(n)});
    }
    {
        double r = 0.0, d = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const TimeSeries truth = inverse_preprocess(test.pairs[i].high_res);
            r += metrics::rmse(truth, truth);
            d += metrics::windowed_dtw(truth, truth, cfg.dtw);
        }
        report.methods.push_back({"ground_truth", r / static_cast<double>(n), d / static_cast<double>(n)});
    }

    if (plot_dir) {
        fs::create_directories(*plot_dir);
        const std::vector<std::pair<std::string, std::string>> styles = {
            {"linear", "#1f77b4"}, {"cubic", "#2ca02c"}, {"map", "#9467bd"}, {"srp", "#ff7f0e"}};
        for (std::size_t scenario : plotted) {
            std::vector<std::vector<double>> series(n_methods + 1);
            for (std::size_t i = 0; i < n; ++i) {
                if (test.pairs[i].scenario != scenario || kept[i].empty()) continue;
                for (std::size_t m = 0; m <= n_methods; ++m) {
                    const auto& v = kept[i][m].values();
                    series[m].insert(series[m].end(), v.begin(), v.end());
                }
            }
            plot::OverlayPlot p;
            p.title = "scenario " + std::to_string(scenario) + ", f_l = " + fmt(s.f_low_hz) +
                      " Hz, alpha = " + std::to_string(alpha);
            const double rate = s.f_high_hz();
            p.traces.push_back({"ground truth", "black", series[n_methods], rate});
            for (std::size_t m = 0; m < n_methods; ++m) {
                if (m == 2 && !cfg.eval.with_map) continue;
                p.traces.push_back({styles[m].first, styles[m].second, series[m], rate});
            }
            const double duration = static_cast<double>(series[n_methods].size()) / rate;
            p.zoom_len_s = std::min(cfg.eval.zoom_s, duration);
            p.zoom_start_s = std::floor((duration - p.zoom_len_s) / 2.0);
            write_text(*plot_dir / ("scenario_" + std::to_string(scenario) + ".svg"), plot::render_svg(p));
        }
    }
    return report;
}

std::string eval_json(const std::vector<EvalReport>& reports) {
    json out = {{"metric_domain", "raw"}, {"settings", json::array()}};
    for (const auto& r : reports) {
        json methods = json::object();
        for (const auto& m : r.methods) methods[m.method] = {{"rmse", m.rmse}, {"dtw", m.dtw}};
        out["settings"].push_back(
            {{"f_low_hz", r.setting.f_low_hz}, {"alpha", r.setting.alpha}, {"n_windows", r.n_windows},
             {"methods", methods}});
    }
    return out.dump(2) + "\n";
}

std::string eval_csv(const std::vector<EvalReport>& reports) {
    std::ostringstream out;
    out << "method,f_low_hz,alpha,rmse,dtw\n";
    for (const auto& r : reports) {
        for (const auto& m : r.methods) {
            out << m.method << ',' << fmt(r.setting.f_low_hz) << ',' << r.setting.alpha << ',' << fmt(m.rmse) << ','
                << fmt(m.dtw) << '\n';
        }
    }
    return out.str();
}

NilmReport run_nilm(const ExperimentConfig& cfg, const Setting& s, const nn::SrpModel* model) {
    if (model == nullptr) raise(ErrorCode::MissingArtifact, "the HF->SRP protocol needs a trained model");
    check_model_setting(*model, s);
    const nilm::ActivationSet set = nilm::build_activation_set(cfg.activation_for(s));
    const nilm::SourceFeatures features = nilm::compute_source_features(set, model, cfg.protocol);
    NilmReport report{.setting = s, .rows = {}};
    for (auto kind : {nilm::ClassifierKind::Knn, nilm::ClassifierKind::DecisionTree, nilm::ClassifierKind::Svm}) {
        report.rows.push_back(nilm::run_row(features, kind, s.f_low_hz, s.alpha, cfg.protocol));
    }
    return report;
}

std::string nilm_json(const std::vector<NilmReport>& reports) {
    json out = {{"rows", json::array()}};
    for (const auto& r : reports) {
        for (const auto& row : r.rows) {
            out["rows"].push_back({{"method", row.method},
                                   {"f_low_hz", row.f_low_hz},
                                   {"alpha", row.alpha},
                                   {"lf_lf", row.lf_lf},
                                   {"hf_srp", row.hf_srp},
                                   {"hf_hf", row.hf_hf},
                                   {"gain", row.gain()}});
        }
    }
    return out.dump(2) + "\n";
}

std::string nilm_csv(const std::vector<NilmReport>& reports) {
    std::ostringstream out;
    out << "method,f_low_hz,alpha,lf_lf,hf_srp,hf_hf,gain\n";
    for (const auto& r : reports) {
        for (const auto& row : r.rows) {
            out << row.method << ',' << fmt(row.f_low_hz) << ',' << row.alpha << ',' << fmt(row.lf_lf) << ','
                << fmt(row.hf_srp) << ',' << fmt(row.hf_hf) << ',' << fmt(row.gain()) << '\n';
        }
    }
    return out.str();
}

}  // namespace srp::pipeline
