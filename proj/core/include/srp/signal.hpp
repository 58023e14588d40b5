#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace srp {

enum class Domain : std::uint8_t { Raw = 0, Preprocessed = 1 };

/// Uniformly sampled scalar waveform. Raw-domain values are instantaneous
/// power; preprocessed values are log-compressed and dimensionless.
class TimeSeries {
public:
    TimeSeries(std::vector<double> samples, double sample_rate_hz, Domain domain = Domain::Raw);

    [[nodiscard]] std::span<const double> samples() const noexcept { return samples_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return samples_; }
    [[nodiscard]] double sample_rate_hz() const noexcept { return sample_rate_hz_; }
    [[nodiscard]] Domain domain() const noexcept { return domain_; }
    [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
    [[nodiscard]] double duration_s() const noexcept {
        return static_cast<double>(samples_.size()) / sample_rate_hz_;
    }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return samples_[i]; }

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

private:
    std::vector<double> samples_;
    double sample_rate_hz_;
    Domain domain_;
};

/// Discrete degradation l = decimate(h) + n: keep sample `phase` of every
/// `alpha`-block and add N(0, noise_sigma^2) noise from a seeded generator.
struct DegradationSpec {
    int alpha = 1;
    int phase = 0;
    double noise_sigma = 0.0;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

double preprocess_value(double x);
double inverse_preprocess_value(double x);

/// x -> log_100(x * 1e3 + 1). Throws NonPositiveArgument when x * 1e3 + 1 <= 0.
TimeSeries preprocess(const TimeSeries& x);
TimeSeries inverse_preprocess(const TimeSeries& x);

TimeSeries degrade(const TimeSeries& h, const DegradationSpec& spec);

/// Offsets 0, stride, 2*stride, ... of every full window of `len` samples.
std::vector<std::size_t> window_offsets(std::size_t n, std::size_t len, std::size_t stride);
std::vector<TimeSeries> window(const TimeSeries& series, std::size_t len, std::size_t stride);

TimeSeries slice(const TimeSeries& series, std::size_t offset, std::size_t len);

}  // namespace srp
