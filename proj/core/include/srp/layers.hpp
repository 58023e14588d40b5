#pragma once

#include <algorithm>
#include <cstddef>
#include <string>

#include "srp/tensor.hpp"

namespace srp::nn {

// Differentiable building blocks. Every forward has a matching backward that
// returns the gradient w.r.t. its input and accumulates parameter gradients.

/// Dot product with 16 independent partial sums so the compiler can vectorize
/// it without reassociating; the summation order is fixed.
template <typename T>
T lane_dot(const T* __restrict a, const T* __restrict b, std::size_t n) {
    constexpr std::size_t kLanes = 16;
    T acc[kLanes] = {};
    std::size_t t = 0;
    for (; t + kLanes <= n; t += kLanes) {
        for (std::size_t l = 0; l < kLanes; ++l) acc[l] += a[t + l] * b[t + l];
    }
    T tail{0};
    for (; t < n; ++t) tail += a[t] * b[t];
    for (std::size_t l = 0; l < kLanes; ++l) tail += acc[l];
    return tail;
}

template <typename T>
void check_conv_shapes(const Tensor<T>& in, const Tensor<T>& weight, const Tensor<T>& bias) {
    if (in.channels() != weight.channels()) {
        raise(ErrorCode::ShapeMismatch, "conv1d: input has " + std::to_string(in.channels()) +
                                            " channels, weight expects " + std::to_string(weight.channels()));
    }
    if (weight.length() % 2 == 0) raise(ErrorCode::ShapeMismatch, "conv1d: kernel size must be odd");
    if (!(bias.shape() == Shape{1, weight.batch(), 1})) {
        raise(ErrorCode::ShapeMismatch, "conv1d: bias shape " + to_string(bias.shape()));
    }
}

/// Kernel-size-3 cross-correlation, blocked over time so each output block
/// stays in registers while all input channels are accumulated.
template <typename T>
Tensor<T> conv1d_k3(const Tensor<T>& in, const Tensor<T>& weight, const Tensor<T>& bias) {
    const std::size_t n_out = weight.batch(), n_in = weight.channels(), len = in.length();
    Tensor<T> out(in.batch(), n_out, len);
    constexpr std::size_t kBlock = 32;
    for (std::size_t b = 0; b < in.batch(); ++b) {
        for (std::size_t o = 0; o < n_out; ++o) {
            T* dst = out.row(b, o);
            const T bo = bias[o];
            if (len == 1) {
                T acc = bo;
                for (std::size_t i = 0; i < n_in; ++i) acc += weight.row(o, i)[1] * in.row(b, i)[0];
                dst[0] = acc;
                continue;
            }
            T first = bo, last = bo;
            for (std::size_t i = 0; i < n_in; ++i) {
                const T* src = in.row(b, i);
                const T* w = weight.row(o, i);
                first += w[1] * src[0] + w[2] * src[1];
                last += w[0] * src[len - 2] + w[1] * src[len - 1];
            }
            dst[0] = first;
            dst[len - 1] = last;
            for (std::size_t t0 = 1; t0 + 1 < len; t0 += kBlock) {
                const std::size_t nb = std::min(kBlock, len - 1 - t0);
                T acc[kBlock];
                for (std::size_t l = 0; l < kBlock; ++l) acc[l] = bo;
                for (std::size_t i = 0; i < n_in; ++i) {
                    const T* __restrict s = in.row(b, i) + t0;
                    const T* w = weight.row(o, i);
                    const T w0 = w[0], w1 = w[1], w2 = w[2];
                    if (nb == kBlock) {
                        for (std::size_t l = 0; l < kBlock; ++l) acc[l] += w0 * s[l - 1] + w1 * s[l] + w2 * s[l + 1];
                    } else {
                        for (std::size_t l = 0; l < nb; ++l) acc[l] += w0 * s[l - 1] + w1 * s[l] + w2 * s[l + 1];
                    }
                }
                std::copy(acc, acc + nb, dst + t0);
            }
        }
    }
    return out;
}

/// Adds the k=3 weight gradient sum_b sum_t g[b,o,t] * in[b,i,t+tap-1] into grad_weight.
template <typename T>
void conv1d_k3_weight_grad(const Tensor<T>& in, const Tensor<T>& grad_out, Tensor<T>& grad_weight) {
    const std::size_t n_out = grad_weight.batch(), n_in = grad_weight.channels(), len = in.length();
    constexpr std::size_t kLanes = 16;
    for (std::size_t o = 0; o < n_out; ++o) {
        for (std::size_t i = 0; i < n_in; ++i) {
            T a0[kLanes] = {}, a1[kLanes] = {}, a2[kLanes] = {};
            T e0{0}, e1{0}, e2{0};
            for (std::size_t b = 0; b < in.batch(); ++b) {
                const T* __restrict s = in.row(b, i);
                const T* __restrict g = grad_out.row(b, o);
                if (len == 1) {
                    e1 += g[0] * s[0];
                    continue;
                }
                std::size_t t = 1;
                for (; t + kLanes <= len - 1; t += kLanes) {
                    for (std::size_t l = 0; l < kLanes; ++l) {
                        const T gv = g[t + l];
                        a0[l] += gv * s[t + l - 1];
                        a1[l] += gv * s[t + l];
                        a2[l] += gv * s[t + l + 1];
                    }
                }
                for (; t + 1 < len; ++t) {
                    e0 += g[t] * s[t - 1];
                    e1 += g[t] * s[t];
                    e2 += g[t] * s[t + 1];
                }
                e1 += g[0] * s[0] + g[len - 1] * s[len - 1];
                e2 += g[0] * s[1];
                e0 += g[len - 1] * s[len - 2];
            }
            for (std::size_t l = 0; l < kLanes; ++l) {
                e0 += a0[l];
                e1 += a1[l];
                e2 += a2[l];
            }
            T* gw = grad_weight.row(o, i);
            gw[0] += e0;
            gw[1] += e1;
            gw[2] += e2;
        }
    }
}

/// Cross-correlation with zero padding; output length equals input length.
/// weight: (out, in, k), bias: (1, out, 1).
template <typename T>
Tensor<T> conv1d(const Tensor<T>& in, const Tensor<T>& weight, const Tensor<T>& bias) {
    check_conv_shapes(in, weight, bias);
    if (weight.length() == 3) return conv1d_k3(in, weight, bias);
    const std::size_t n_out = weight.batch(), n_in = weight.channels(), k = weight.length();
    const std::size_t len = in.length();
    const auto half = static_cast<std::ptrdiff_t>(k / 2);
    Tensor<T> out(in.batch(), n_out, len);
    for (std::size_t b = 0; b < in.batch(); ++b) {
        for (std::size_t o = 0; o < n_out; ++o) {
            T* __restrict dst = out.row(b, o);
            std::fill(dst, dst + len, bias[o]);
            for (std::size_t i = 0; i < n_in; ++i) {
                const T* __restrict src = in.row(b, i);
                const T* w = weight.row(o, i);
                for (std::size_t tap = 0; tap < k; ++tap) {
                    const T wv = w[tap];
                    const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(tap) - half;
                    const std::size_t t0 = shift < 0 ? static_cast<std::size_t>(-shift) : 0;
                    const std::size_t t1 = shift > 0 ? len - std::min(len, static_cast<std::size_t>(shift)) : len;
                    if (t1 <= t0) continue;
                    const T* s = src + (static_cast<std::ptrdiff_t>(t0) + shift);
                    T* d = dst + t0;
                    for (std::size_t t = 0; t < t1 - t0; ++t) d[t] += wv * s[t];
                }
            }
        }
    }
    return out;
}

/// Returns dL/d(in); adds dL/d(weight) and dL/d(bias) into grad_weight/grad_bias.
template <typename T>
Tensor<T> conv1d_backward(const Tensor<T>& in, const Tensor<T>& weight, const Tensor<T>& grad_out,
                          Tensor<T>& grad_weight, Tensor<T>& grad_bias, bool need_input_grad = true) {
    const std::size_t n_out = weight.batch(), n_in = weight.channels(), k = weight.length();
    const std::size_t len = in.length();
    if (!(grad_out.shape() == Shape{in.batch(), n_out, len})) {
        raise(ErrorCode::ShapeMismatch, "conv1d_backward: grad shape " + to_string(grad_out.shape()));
    }
    Tensor<T>::require_same_shape(grad_weight, weight, "conv1d_backward weight grad");
    const auto half = static_cast<std::ptrdiff_t>(k / 2);
    Tensor<T> grad_in;
    const bool fast_input_grad = need_input_grad && k == 3;
    if (fast_input_grad) {
        // dL/d(in) is a k=3 correlation of grad_out with the transposed, flipped kernel.
        Tensor<T> flipped(n_in, n_out, 3), zero_bias(1, n_in, 1);
        for (std::size_t o = 0; o < n_out; ++o) {
            for (std::size_t i = 0; i < n_in; ++i) {
                const T* w = weight.row(o, i);
                T* f = flipped.row(i, o);
                f[0] = w[2];
                f[1] = w[1];
                f[2] = w[0];
            }
        }
        grad_in = conv1d_k3(grad_out, flipped, zero_bias);
    } else if (need_input_grad) {
        grad_in = Tensor<T>(in.shape());
    }
    if (k == 3) {
        for (std::size_t b = 0; b < in.batch(); ++b) {
            for (std::size_t o = 0; o < n_out; ++o) {
                const T* g = grad_out.row(b, o);
                T gb{0};
                for (std::size_t t = 0; t < len; ++t) gb += g[t];
                grad_bias[o] += gb;
            }
        }
        conv1d_k3_weight_grad(in, grad_out, grad_weight);
        return grad_in;
    }
    for (std::size_t b = 0; b < in.batch(); ++b) {
        for (std::size_t o = 0; o < n_out; ++o) {
            const T* __restrict g = grad_out.row(b, o);
            T gb{0};
            for (std::size_t t = 0; t < len; ++t) gb += g[t];
            grad_bias[o] += gb;
            for (std::size_t i = 0; i < n_in; ++i) {
                const T* __restrict src = in.row(b, i);
                const T* w = weight.row(o, i);
                T* gw = grad_weight.row(o, i);
                T* __restrict gi = need_input_grad ? grad_in.row(b, i) : nullptr;
                for (std::size_t tap = 0; tap < k; ++tap) {
                    const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(tap) - half;
                    const std::size_t t0 = shift < 0 ? static_cast<std::size_t>(-shift) : 0;
                    const std::size_t t1 = shift > 0 ? len - std::min(len, static_cast<std::size_t>(shift)) : len;
                    if (t1 <= t0) continue;
                    const std::size_t n = t1 - t0;
                    const auto off = static_cast<std::ptrdiff_t>(t0) + shift;
                    const T* s = src + off;
                    const T* gg = g + t0;
                    gw[tap] += lane_dot(gg, s, n);
                    if (gi != nullptr) {
                        const T wv = w[tap];
                        T* d = gi + off;
                        for (std::size_t t = 0; t < n; ++t) d[t] += wv * gg[t];
                    }
                }
            }
        }
    }
    return grad_in;
}

template <typename T>
Tensor<T> relu(Tensor<T> x) {
    for (auto& v : x.values()) v = v > T{0} ? v : T{0};
    return x;
}

/// Gradient through ReLU given the forward output.
template <typename T>
Tensor<T> relu_backward(const Tensor<T>& out, Tensor<T> grad) {
    Tensor<T>::require_same_shape(out, grad, "relu_backward");
    for (std::size_t i = 0; i < grad.size(); ++i) {
        if (!(out[i] > T{0})) grad[i] = T{0};
    }
    return grad;
}

/// (B, alpha, d) -> (B, 1, alpha*d) with out[alpha*i + c] = phi[c][i].
template <typename T>
Tensor<T> sub_pixel_rearrange(const Tensor<T>& phi, std::size_t alpha) {
    if (phi.channels() != alpha) {
        raise(ErrorCode::ChannelCountNotAlpha,
              "expected " + std::to_string(alpha) + " channels, got " + std::to_string(phi.channels()));
    }
    const std::size_t d = phi.length();
    Tensor<T> out(phi.batch(), 1, alpha * d);
    for (std::size_t b = 0; b < phi.batch(); ++b) {
        T* dst = out.row(b, 0);
        for (std::size_t c = 0; c < alpha; ++c) {
            const T* src = phi.row(b, c);
            for (std::size_t i = 0; i < d; ++i) dst[alpha * i + c] = src[i];
        }
    }
    return out;
}

/// Exact inverse of sub_pixel_rearrange; also its adjoint, hence its backward.
template <typename T>
Tensor<T> sub_pixel_unrearrange(const Tensor<T>& seq, std::size_t alpha) {
    if (seq.channels() != 1 || alpha == 0 || seq.length() % alpha != 0) {
        raise(ErrorCode::ShapeMismatch, "sub_pixel_unrearrange: shape " + to_string(seq.shape()));
    }
    const std::size_t d = seq.length() / alpha;
    Tensor<T> phi(seq.batch(), alpha, d);
    for (std::size_t b = 0; b < seq.batch(); ++b) {
        const T* src = seq.row(b, 0);
        for (std::size_t c = 0; c < alpha; ++c) {
            T* dst = phi.row(b, c);
            for (std::size_t i = 0; i < d; ++i) dst[i] = src[alpha * i + c];
        }
    }
    return phi;
}

/// (B, 1, d) -> (B, 1, alpha*d), each sample repeated alpha times.
template <typename T>
Tensor<T> nearest_upsample(const Tensor<T>& x, std::size_t alpha) {
    if (x.channels() != 1) raise(ErrorCode::ShapeMismatch, "nearest_upsample expects one channel");
    Tensor<T> out(x.batch(), 1, x.length() * alpha);
    for (std::size_t b = 0; b < x.batch(); ++b) {
        const T* src = x.row(b, 0);
        T* dst = out.row(b, 0);
        for (std::size_t j = 0; j < out.length(); ++j) dst[j] = src[j / alpha];
    }
    return out;
}

template <typename T>
Tensor<T> nearest_upsample_backward(const Tensor<T>& grad_out, std::size_t alpha) {
    Tensor<T> g(grad_out.batch(), 1, grad_out.length() / alpha);
    for (std::size_t b = 0; b < grad_out.batch(); ++b) {
        const T* src = grad_out.row(b, 0);
        T* dst = g.row(b, 0);
        for (std::size_t j = 0; j < grad_out.length(); ++j) dst[j / alpha] += src[j];
    }
    return g;
}

/// Mean of squared differences over all elements.
template <typename T>
T mse_loss(const Tensor<T>& pred, const Tensor<T>& target) {
    Tensor<T>::require_same_shape(pred, target, "mse_loss");
    T acc{0};
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const T d = pred[i] - target[i];
        acc += d * d;
    }
    return acc / static_cast<T>(pred.size());
}

template <typename T>
Tensor<T> mse_loss_backward(const Tensor<T>& pred, const Tensor<T>& target) {
    Tensor<T>::require_same_shape(pred, target, "mse_loss_backward");
    Tensor<T> g(pred.shape());
    const T scale = T{2} / static_cast<T>(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) g[i] = scale * (pred[i] - target[i]);
    return g;
}

template <typename T>
struct ConvParams {
    Tensor<T> weight;  // (out, in, k)
    Tensor<T> bias;    // (1, out, 1)
    Tensor<T> grad_weight;
    Tensor<T> grad_bias;

    ConvParams() = default;
    ConvParams(std::size_t in, std::size_t out, std::size_t k)
        : weight(out, in, k), bias(1, out, 1), grad_weight(out, in, k), grad_bias(1, out, 1) {}

    [[nodiscard]] std::size_t in_channels() const noexcept { return weight.channels(); }
    [[nodiscard]] std::size_t out_channels() const noexcept { return weight.batch(); }

    void zero_grad() {
        grad_weight.fill(T{0});
        grad_bias.fill(T{0});
    }
};

/// conv -> ReLU -> conv, plus identity skip.
template <typename T>
struct ResidualBlock {
    ConvParams<T> conv1;
    ConvParams<T> conv2;

    struct Cache {
        Tensor<T> input;
        Tensor<T> hidden;  // ReLU output between the convs
    };

    ResidualBlock() = default;
    ResidualBlock(std::size_t channels, std::size_t k) : conv1(channels, channels, k), conv2(channels, channels, k) {}

    Tensor<T> forward(const Tensor<T>& x, Cache* cache = nullptr) const {
        if (x.channels() != conv1.in_channels()) {
            raise(ErrorCode::ShapeMismatch, "residual block expects " + std::to_string(conv1.in_channels()) +
                                                " channels, got " + std::to_string(x.channels()));
        }
        Tensor<T> hidden = relu(conv1d(x, conv1.weight, conv1.bias));
        Tensor<T> y = conv1d(hidden, conv2.weight, conv2.bias);
        y += x;
        if (cache != nullptr) {
            cache->input = x;
            cache->hidden = std::move(hidden);
        }
        return y;
    }

    Tensor<T> backward(const Cache& cache, const Tensor<T>& grad_out) {
        Tensor<T> g_hidden = conv1d_backward(cache.hidden, conv2.weight, grad_out, conv2.grad_weight, conv2.grad_bias);
        g_hidden = relu_backward(cache.hidden, std::move(g_hidden));
        Tensor<T> g_in = conv1d_backward(cache.input, conv1.weight, g_hidden, conv1.grad_weight, conv1.grad_bias);
        g_in += grad_out;
        return g_in;
    }
};

}  // namespace srp::nn
