#include "srp/signal.hpp"

#include <cmath>
#include <random>
#include <string>

#include "srp/error.hpp"

namespace srp {

namespace {
const double kLog100 = std::log(100.0);
}

TimeSeries::TimeSeries(std::vector<double> samples, double sample_rate_hz, Domain domain)
    : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz), domain_(domain) {
    require(!samples_.empty(), ErrorCode::EmptyInput, "time series must have at least one sample");
    require(sample_rate_hz_ > 0.0 && std::isfinite(sample_rate_hz_), ErrorCode::InvalidArgument,
            "sample rate must be positive");
}

void DegradationSpec::validate() const {
    require(alpha >= 1, ErrorCode::InvalidArgument, "alpha must be >= 1");
    require(phase >= 0 && phase < alpha, ErrorCode::InvalidArgument, "phase must lie in [0, alpha)");
    require(noise_sigma >= 0.0 && std::isfinite(noise_sigma), ErrorCode::InvalidArgument,
            "noise sigma must be non-negative");
}

double preprocess_value(double x) {
    const double arg = x * 1e3 + 1.0;
    if (!(arg > 0.0)) {
        raise(ErrorCode::NonPositiveArgument,
              "x*1e3+1 must be positive, got x=" + std::to_string(x));
    }
    return std::log(arg) / kLog100;
}

double inverse_preprocess_value(double x) { return std::expm1(x * kLog100) * 1e-3; }

TimeSeries preprocess(const TimeSeries& x) {
    require(x.domain() == Domain::Raw, ErrorCode::InvalidArgument, "preprocess expects raw-domain input");
    std::vector<double> out;
    out.reserve(x.size());
    for (double v : x.samples()) out.push_back(preprocess_value(v));
    return {std::move(out), x.sample_rate_hz(), Domain::Preprocessed};
}

TimeSeries inverse_preprocess(const TimeSeries& x) {
    require(x.domain() == Domain::Preprocessed, ErrorCode::InvalidArgument,
            "inverse_preprocess expects preprocessed input");
    std::vector<double> out;
    out.reserve(x.size());
    for (double v : x.samples()) out.push_back(inverse_preprocess_value(v));
    return {std::move(out), x.sample_rate_hz(), Domain::Raw};
}

TimeSeries degrade(const TimeSeries& h, const DegradationSpec& spec) {
    spec.validate();
    const auto alpha = static_cast<std::size_t>(spec.alpha);
    if (h.size() % alpha != 0) {
        raise(ErrorCode::LengthNotDivisible, "length " + std::to_string(h.size()) +
                                                 " is not divisible by alpha " + std::to_string(alpha));
    }
    const std::size_t n = h.size() / alpha;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = h[alpha * i + static_cast<std::size_t>(spec.phase)];
    if (spec.noise_sigma > 0.0) {
        std::mt19937_64 rng(spec.rng_seed);
        std::normal_distribution<double> noise(0.0, spec.noise_sigma);
        for (double& v : out) v += noise(rng);
    }
    return {std::move(out), h.sample_rate_hz() / static_cast<double>(alpha), h.domain()};
}

std::vector<std::size_t> window_offsets(std::size_t n, std::size_t len, std::size_t stride) {
    require(len > 0 && stride > 0, ErrorCode::InvalidArgument, "window length and stride must be positive");
    if (len > n) {
        raise(ErrorCode::WindowTooLong,
              "window of " + std::to_string(len) + " exceeds series of " + std::to_string(n));
    }
    std::vector<std::size_t> offsets;
    for (std::size_t off = 0; off + len <= n; off += stride) offsets.push_back(off);
    return offsets;
}

TimeSeries slice(const TimeSeries& series, std::size_t offset, std::size_t len) {
    require(offset + len <= series.size(), ErrorCode::WindowTooLong, "slice out of range");
    const auto first = series.values().begin() + static_cast<std::ptrdiff_t>(offset);
    return {std::vector<double>(first, first + static_cast<std::ptrdiff_t>(len)), series.sample_rate_hz(),
            series.domain()};
}

std::vector<TimeSeries> window(const TimeSeries& series, std::size_t len, std::size_t stride) {
    std::vector<TimeSeries> out;
    for (std::size_t off : window_offsets(series.size(), len, stride)) out.push_back(slice(series, off, len));
    return out;
}

}  // namespace srp
