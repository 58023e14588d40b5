#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "srp/error.hpp"

namespace srp::nn {

struct Shape {
    std::size_t batch = 0;
    std::size_t channels = 0;
    std::size_t length = 0;

    [[nodiscard]] std::size_t numel() const noexcept { return batch * channels * length; }
    friend bool operator==(const Shape&, const Shape&) = default;
};

inline std::string to_string(const Shape& s) {
    return "(" + std::to_string(s.batch) + "," + std::to_string(s.channels) + "," + std::to_string(s.length) + ")";
}

/// Dense (batch, channels, length) array, row-major with length fastest.
/// Convolution weights reuse the layout as (out_channels, in_channels, kernel).
template <typename T>
class Tensor {
public:
    using value_type = T;

    Tensor() = default;
    explicit Tensor(Shape shape, T fill = T{0}) : shape_(shape), data_(shape.numel(), fill) {}
    Tensor(std::size_t batch, std::size_t channels, std::size_t length, T fill = T{0})
        : Tensor(Shape{batch, channels, length}, fill) {}

    [[nodiscard]] const Shape& shape() const noexcept { return shape_; }
    [[nodiscard]] std::size_t batch() const noexcept { return shape_.batch; }
    [[nodiscard]] std::size_t channels() const noexcept { return shape_.channels; }
    [[nodiscard]] std::size_t length() const noexcept { return shape_.length; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }

    [[nodiscard]] T* data() noexcept { return data_.data(); }
    [[nodiscard]] const T* data() const noexcept { return data_.data(); }
    [[nodiscard]] std::vector<T>& values() noexcept { return data_; }
    [[nodiscard]] const std::vector<T>& values() const noexcept { return data_; }

    [[nodiscard]] T* row(std::size_t b, std::size_t c) noexcept {
        return data_.data() + (b * shape_.channels + c) * shape_.length;
    }
    [[nodiscard]] const T* row(std::size_t b, std::size_t c) const noexcept {
        return data_.data() + (b * shape_.channels + c) * shape_.length;
    }

    T& operator()(std::size_t b, std::size_t c, std::size_t l) noexcept { return row(b, c)[l]; }
    const T& operator()(std::size_t b, std::size_t c, std::size_t l) const noexcept { return row(b, c)[l]; }
    T& operator[](std::size_t i) noexcept { return data_[i]; }
    const T& operator[](std::size_t i) const noexcept { return data_[i]; }

    void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

    Tensor& operator+=(const Tensor& other) {
        require_same_shape(*this, other, "tensor +=");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
        return *this;
    }

    friend bool operator==(const Tensor&, const Tensor&) = default;

    static void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
        if (!(a.shape_ == b.shape_)) {
            raise(ErrorCode::ShapeMismatch,
                  std::string(what) + ": " + to_string(a.shape_) + " vs " + to_string(b.shape_));
        }
    }

private:
    Shape shape_{};
    std::vector<T> data_;
};

template <typename To, typename From>
Tensor<To> tensor_cast(const Tensor<From>& in) {
    Tensor<To> out(in.shape());
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = static_cast<To>(in[i]);
    return out;
}

}  // namespace srp::nn
