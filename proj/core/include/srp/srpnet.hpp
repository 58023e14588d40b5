#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "srp/layers.hpp"
#include "srp/signal.hpp"

namespace srp::nn {

struct SrpHyper {
    int alpha = 10;
    int n_blocks = 16;
    int channels = 64;
    int kernel_size = 3;
    /// Init scale applied to the second conv of every residual branch.
    double residual_init_scale = 0.1;

    void validate() const {
        require(alpha >= 1, ErrorCode::InvalidArgument, "alpha must be >= 1");
        require(n_blocks >= 0, ErrorCode::InvalidArgument, "n_blocks must be >= 0");
        require(channels >= 1, ErrorCode::InvalidArgument, "channels must be >= 1");
        require(kernel_size >= 1 && kernel_size % 2 == 1, ErrorCode::InvalidArgument, "kernel_size must be odd");
        require(residual_init_scale >= 0.0, ErrorCode::InvalidArgument, "residual_init_scale must be >= 0");
    }
    friend bool operator==(const SrpHyper&, const SrpHyper&) = default;
};

/// Named view of one trainable tensor and its gradient.
template <typename T>
struct ParamRef {
    std::string name;
    Tensor<T>* value;
    Tensor<T>* grad;
};

/// Low-res sequence in, high-res sequence out:
///   extractor (conv-ReLU-conv-ReLU) -> residual blocks with a skip from the
///   extractor output -> reconstruction (conv-ReLU-conv to alpha channels)
///   -> sub-pixel rearrangement -> + nearest-neighbour upsampled input.
template <typename T>
class SrpNet {
public:
    struct Cache {
        Tensor<T> input;
        Tensor<T> e1, e2;
        std::vector<typename ResidualBlock<T>::Cache> blocks;
        Tensor<T> merged;
        Tensor<T> r1;
    };

    SrpNet() = default;

    SrpNet(const SrpHyper& hyper, std::uint64_t seed) : hyper_(hyper), seed_(seed) {
        hyper_.validate();
        const auto c = static_cast<std::size_t>(hyper_.channels);
        const auto k = static_cast<std::size_t>(hyper_.kernel_size);
        extract0_ = ConvParams<T>(1, c, k);
        extract1_ = ConvParams<T>(c, c, k);
        blocks_.assign(static_cast<std::size_t>(hyper_.n_blocks), ResidualBlock<T>(c, k));
        recon0_ = ConvParams<T>(c, c, k);
        recon1_ = ConvParams<T>(c, static_cast<std::size_t>(hyper_.alpha), k);
        initialize(seed);
    }

    [[nodiscard]] const SrpHyper& hyper() const noexcept { return hyper_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::size_t alpha() const noexcept { return static_cast<std::size_t>(hyper_.alpha); }

    /// Kaiming fan-in normal weights, zero biases, zero final conv.
    void initialize(std::uint64_t seed) {
        seed_ = seed;
        std::mt19937_64 rng(seed);
        auto kaiming = [&rng](ConvParams<T>& p, double scale) {
            const double fan_in = static_cast<double>(p.in_channels() * p.weight.length());
            std::normal_distribution<double> dist(0.0, scale * std::sqrt(2.0 / fan_in));
            for (auto& w : p.weight.values()) w = static_cast<T>(dist(rng));
            p.bias.fill(T{0});
        };
        kaiming(extract0_, 1.0);
        kaiming(extract1_, 1.0);
        for (auto& b : blocks_) {
            kaiming(b.conv1, 1.0);
            kaiming(b.conv2, hyper_.residual_init_scale);
        }
        kaiming(recon0_, 1.0);
        recon1_.weight.fill(T{0});
        recon1_.bias.fill(T{0});
        zero_grad();
    }

    std::vector<ParamRef<T>> parameters() {
        std::vector<ParamRef<T>> out;
        auto add = [&out](const std::string& name, ConvParams<T>& p) {
            out.push_back({name + ".weight", &p.weight, &p.grad_weight});
            out.push_back({name + ".bias", &p.bias, &p.grad_bias});
        };
        add("extract.0", extract0_);
        add("extract.1", extract1_);
        for (std::size_t i = 0; i < blocks_.size(); ++i) {
            add("block." + std::to_string(i) + ".conv1", blocks_[i].conv1);
            add("block." + std::to_string(i) + ".conv2", blocks_[i].conv2);
        }
        add("recon.0", recon0_);
        add("recon.1", recon1_);
        return out;
    }

    /// Read-only (name, tensor) view in the same order as parameters().
    [[nodiscard]] std::vector<std::pair<std::string, const Tensor<T>*>> named_tensors() const {
        std::vector<std::pair<std::string, const Tensor<T>*>> out;
        for (const auto& p : const_cast<SrpNet*>(this)->parameters()) out.emplace_back(p.name, p.value);
        return out;
    }

    [[nodiscard]] std::size_t parameter_count() const {
        auto conv = [](const ConvParams<T>& p) { return p.weight.size() + p.bias.size(); };
        std::size_t n = conv(extract0_) + conv(extract1_) + conv(recon0_) + conv(recon1_);
        for (const auto& b : blocks_) n += conv(b.conv1) + conv(b.conv2);
        return n;
    }

    void zero_grad() {
        for (auto& p : parameters()) p.grad->fill(T{0});
    }

    ConvParams<T>& reconstruction_head() noexcept { return recon1_; }
    std::vector<ResidualBlock<T>>& blocks() noexcept { return blocks_; }

    /// x: (B, 1, d) -> (B, 1, alpha*d).
    Tensor<T> forward(const Tensor<T>& x, Cache* cache = nullptr) const {
        if (x.channels() != 1) {
            raise(ErrorCode::ShapeMismatch, "SrpNet expects (B,1,d) input, got " + to_string(x.shape()));
        }
        Tensor<T> e1 = relu(conv1d(x, extract0_.weight, extract0_.bias));
        Tensor<T> e2 = relu(conv1d(e1, extract1_.weight, extract1_.bias));
        Tensor<T> h = e2;
        if (cache != nullptr) cache->blocks.resize(blocks_.size());
        for (std::size_t i = 0; i < blocks_.size(); ++i) {
            h = blocks_[i].forward(h, cache != nullptr ? &cache->blocks[i] : nullptr);
        }
        h += e2;
        Tensor<T> r1 = relu(conv1d(h, recon0_.weight, recon0_.bias));
        Tensor<T> phi = conv1d(r1, recon1_.weight, recon1_.bias);
        Tensor<T> y = sub_pixel_rearrange(phi, alpha());
        y += nearest_upsample(x, alpha());
        if (cache != nullptr) {
            cache->input = x;
            cache->e1 = std::move(e1);
            cache->e2 = std::move(e2);
            cache->merged = std::move(h);
            cache->r1 = std::move(r1);
        }
        return y;
    }

    /// Accumulates parameter gradients; returns dL/dx.
    Tensor<T> backward(const Cache& cache, const Tensor<T>& grad_out) {
        const Tensor<T> g_phi = sub_pixel_unrearrange(grad_out, alpha());
        Tensor<T> g_r1 = conv1d_backward(cache.r1, recon1_.weight, g_phi, recon1_.grad_weight, recon1_.grad_bias);
        g_r1 = relu_backward(cache.r1, std::move(g_r1));
        const Tensor<T> g_merged =
            conv1d_backward(cache.merged, recon0_.weight, g_r1, recon0_.grad_weight, recon0_.grad_bias);
        Tensor<T> g_h = g_merged;
        for (std::size_t i = blocks_.size(); i-- > 0;) g_h = blocks_[i].backward(cache.blocks[i], g_h);
        g_h += g_merged;  // feature-space skip
        g_h = relu_backward(cache.e2, std::move(g_h));
        Tensor<T> g_e1 = conv1d_backward(cache.e1, extract1_.weight, g_h, extract1_.grad_weight, extract1_.grad_bias);
        g_e1 = relu_backward(cache.e1, std::move(g_e1));
        Tensor<T> g_x = conv1d_backward(cache.input, extract0_.weight, g_e1, extract0_.grad_weight, extract0_.grad_bias);
        g_x += nearest_upsample_backward(grad_out, alpha());
        return g_x;
    }

private:
    SrpHyper hyper_{};
    std::uint64_t seed_ = 0;
    ConvParams<T> extract0_, extract1_;
    std::vector<ResidualBlock<T>> blocks_;
    ConvParams<T> recon0_, recon1_;
};

using SrpModel = SrpNet<float>;

template <typename T>
Tensor<T> to_tensor(const std::vector<const TimeSeries*>& series) {
    require(!series.empty(), ErrorCode::EmptyInput, "no series to batch");
    const std::size_t d = series.front()->size();
    Tensor<T> out(series.size(), 1, d);
    for (std::size_t b = 0; b < series.size(); ++b) {
        require(series[b]->size() == d, ErrorCode::ShapeMismatch, "batched series must share a length");
        T* dst = out.row(b, 0);
        for (std::size_t i = 0; i < d; ++i) dst[i] = static_cast<T>((*series[b])[i]);
    }
    return out;
}

/// Runs the network on a preprocessed low-res series.
template <typename T>
TimeSeries infer(const SrpNet<T>& model, const TimeSeries& low) {
    require(low.domain() == Domain::Preprocessed, ErrorCode::InvalidArgument, "infer expects preprocessed input");
    const Tensor<T> y = model.forward(to_tensor<T>({&low}));
    std::vector<double> out(y.values().begin(), y.values().end());
    return {std::move(out), low.sample_rate_hz() * static_cast<double>(model.alpha()), Domain::Preprocessed};
}

/// Batched inference; consecutive equal-length series share one forward pass.
template <typename T>
std::vector<TimeSeries> infer_batch(const SrpNet<T>& model, const std::vector<TimeSeries>& lows,
                                    std::size_t batch_size = 32) {
    require(batch_size >= 1, ErrorCode::InvalidArgument, "batch_size must be >= 1");
    std::vector<TimeSeries> out;
    out.reserve(lows.size());
    std::size_t i = 0;
    while (i < lows.size()) {
        std::vector<const TimeSeries*> group{&lows[i]};
        require(lows[i].domain() == Domain::Preprocessed, ErrorCode::InvalidArgument,
                "infer expects preprocessed input");
        std::size_t j = i + 1;
        while (j < lows.size() && group.size() < batch_size && lows[j].size() == lows[i].size()) {
            group.push_back(&lows[j++]);
        }
        const Tensor<T> y = model.forward(to_tensor<T>(group));
        for (std::size_t b = 0; b < group.size(); ++b) {
            const T* row = y.row(b, 0);
            out.emplace_back(std::vector<double>(row, row + y.length()),
                             group[b]->sample_rate_hz() * static_cast<double>(model.alpha()), Domain::Preprocessed);
        }
        i = j;
    }
    return out;
}

}  // namespace srp::nn
