#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "srp/datagen.hpp"
#include "srp/srpnet.hpp"

namespace srp::nn {

/// Adam hyper-parameters plus a two-phase learning-rate schedule measured in
/// mini-batch updates. Defaults are the full-scale recipe.
struct TrainConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t batch_size = 32;
    double lr_phase1 = 1e-4;
    std::size_t updates_phase1 = 1'000'000;
    double lr_phase2 = 1e-6;
    std::size_t updates_phase2 = 1'000'000;
    std::uint64_t seed = 0;
    std::size_t checkpoint_every = 0;  // 0 disables periodic checkpoints
    std::string diagnostic_path;       // written when the loss goes non-finite

    void validate() const {
        require(beta1 > 0.0 && beta1 < 1.0 && beta2 > 0.0 && beta2 < 1.0, ErrorCode::InvalidArgument,
                "Adam betas must lie in (0, 1)");
        require(epsilon > 0.0, ErrorCode::InvalidArgument, "epsilon must be positive");
        require(batch_size >= 1, ErrorCode::InvalidArgument, "batch_size must be >= 1");
        require(lr_phase1 > 0.0 && lr_phase2 > 0.0, ErrorCode::InvalidArgument, "learning rates must be positive");
        require(updates_phase1 + updates_phase2 >= 1, ErrorCode::InvalidArgument, "schedule has no updates");
    }

    [[nodiscard]] std::size_t total_updates() const noexcept { return updates_phase1 + updates_phase2; }
    [[nodiscard]] double learning_rate(std::size_t update) const noexcept {
        return update < updates_phase1 ? lr_phase1 : lr_phase2;
    }
};

template <typename T>
struct AdamState {
    std::vector<Tensor<T>> m;
    std::vector<Tensor<T>> v;
    std::uint64_t step = 0;

    static AdamState zeros_like(const std::vector<ParamRef<T>>& params) {
        AdamState s;
        for (const auto& p : params) {
            s.m.emplace_back(p.value->shape());
            s.v.emplace_back(p.value->shape());
        }
        return s;
    }
};

/// One bias-corrected Adam update. Increments state.step.
template <typename T>
void adam_step(const std::vector<ParamRef<T>>& params, AdamState<T>& state, const TrainConfig& cfg, double lr) {
    if (state.m.size() != params.size() || state.v.size() != params.size()) {
        raise(ErrorCode::ShapeMismatch, "Adam state does not match parameter list");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor<T>::require_same_shape(state.m[i], *params[i].value, "adam moment");
        Tensor<T>::require_same_shape(state.v[i], *params[i].value, "adam moment");
        Tensor<T>::require_same_shape(*params[i].grad, *params[i].value, "adam gradient");
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(cfg.beta1, t);
    const double c2 = 1.0 - std::pow(cfg.beta2, t);
    const T b1 = static_cast<T>(cfg.beta1), b2 = static_cast<T>(cfg.beta2);
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto& w = params[i].value->values();
        const auto& g = params[i].grad->values();
        auto& m = state.m[i].values();
        auto& v = state.v[i].values();
        for (std::size_t j = 0; j < w.size(); ++j) {
            m[j] = b1 * m[j] + (T{1} - b1) * g[j];
            v[j] = b2 * v[j] + (T{1} - b2) * g[j] * g[j];
            const double m_hat = static_cast<double>(m[j]) / c1;
            const double v_hat = static_cast<double>(v[j]) / c2;
            w[j] = static_cast<T>(static_cast<double>(w[j]) - lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon));
        }
    }
}

/// Deterministic epoch-wise shuffling: the global sample position p maps to
/// permutation(epoch = p / n)[p % n], so training can resume at any update.
class BatchSampler {
public:
    BatchSampler(std::size_t n, std::uint64_t seed) : n_(n), seed_(seed) {
        require(n > 0, ErrorCode::EmptyTrainingSet, "no training pairs");
    }

    std::vector<std::size_t> batch(std::size_t update, std::size_t batch_size) {
        std::vector<std::size_t> out(batch_size);
        for (std::size_t j = 0; j < batch_size; ++j) {
            const std::size_t pos = update * batch_size + j;
            const std::size_t epoch = pos / n_;
            if (epoch != epoch_ || perm_.empty()) {
                perm_.resize(n_);
                std::iota(perm_.begin(), perm_.end(), std::size_t{0});
                std::mt19937_64 rng(datagen::mix_seed(seed_, epoch));
                std::shuffle(perm_.begin(), perm_.end(), rng);
                epoch_ = epoch;
            }
            out[j] = perm_[pos % n_];
        }
        return out;
    }

private:
    std::size_t n_;
    std::uint64_t seed_;
    std::size_t epoch_ = 0;
    std::vector<std::size_t> perm_;
};

struct TrainHooks {
    std::function<void(std::size_t update, double loss)> on_update;
    std::function<void(std::size_t update)> on_checkpoint;
};

struct TrainResult {
    std::vector<double> loss_history;  // one entry per update performed in this call
    std::size_t final_update = 0;
};

inline void check_pairs(const datagen::Dataset& data, std::size_t alpha) {
    require(!data.pairs.empty(), ErrorCode::EmptyTrainingSet, "training set is empty");
    const std::size_t d = data.pairs.front().low_res.size();
    for (const auto& p : data.pairs) {
        if (p.low_res.size() != d || p.high_res.size() != alpha * d) {
            raise(ErrorCode::ShapeMismatch, "training pairs must share low length d and high length alpha*d");
        }
    }
}

template <typename T>
void batch_tensors(const datagen::Dataset& data, const std::vector<std::size_t>& idx, Tensor<T>& x, Tensor<T>& y) {
    std::vector<const TimeSeries*> lows, highs;
    for (std::size_t i : idx) {
        lows.push_back(&data.pairs[i].low_res);
        highs.push_back(&data.pairs[i].high_res);
    }
    x = to_tensor<T>(lows);
    y = to_tensor<T>(highs);
}

/// Mini-batch MSE training from state.step up to cfg.total_updates().
template <typename T>
TrainResult train(SrpNet<T>& model, AdamState<T>& state, const datagen::Dataset& data, const TrainConfig& cfg,
                  const TrainHooks& hooks = {}) {
    cfg.validate();
    check_pairs(data, model.alpha());
    auto params = model.parameters();
    if (state.m.empty()) state = AdamState<T>::zeros_like(params);

    BatchSampler sampler(data.pairs.size(), cfg.seed);
    TrainResult result;
    Tensor<T> x, y;
    typename SrpNet<T>::Cache cache;
    for (std::size_t u = static_cast<std::size_t>(state.step); u < cfg.total_updates(); ++u) {
        batch_tensors(data, sampler.batch(u, cfg.batch_size), x, y);
        model.zero_grad();
        const Tensor<T> pred = model.forward(x, &cache);
        const T loss = mse_loss(pred, y);
        if (!std::isfinite(static_cast<double>(loss))) {
            std::ostringstream diag;
            diag << "{\"update\": " << u << ", \"loss\": \"" << static_cast<double>(loss)
                 << "\", \"learning_rate\": " << cfg.learning_rate(u) << ", \"parameter_norms\": {";
            for (std::size_t i = 0; i < params.size(); ++i) {
                double sq = 0.0;
                for (T v : params[i].value->values()) sq += static_cast<double>(v) * static_cast<double>(v);
                diag << (i ? ", " : "") << '"' << params[i].name << "\": \"" << std::sqrt(sq) << '"';
            }
            diag << "}}";
            if (!cfg.diagnostic_path.empty()) {
                std::ofstream(cfg.diagnostic_path) << diag.str() << '\n';
            }
            raise(ErrorCode::NonFiniteLoss, "loss became non-finite at update " + std::to_string(u) + ": " + diag.str());
        }
        model.backward(cache, mse_loss_backward(pred, y));
        adam_step(params, state, cfg, cfg.learning_rate(u));
        result.loss_history.push_back(static_cast<double>(loss));
        if (hooks.on_update) hooks.on_update(u, static_cast<double>(loss));
        if (cfg.checkpoint_every > 0 && (u + 1) % cfg.checkpoint_every == 0 && hooks.on_checkpoint) {
            hooks.on_checkpoint(u + 1);
        }
    }
    result.final_update = static_cast<std::size_t>(state.step);
    return result;
}

}  // namespace srp::nn
