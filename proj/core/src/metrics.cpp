#include "srp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "srp/error.hpp"

namespace srp::metrics {

void DtwConfig::validate() const {
    require(window_len >= 2, ErrorCode::InvalidArgument, "DTW window must hold at least 2 samples");
    require(window_stride >= 1, ErrorCode::InvalidArgument, "DTW stride must be positive");
}

double rmse(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        raise(ErrorCode::LengthMismatch,
              "rmse of lengths " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
    }
    require(!a.empty(), ErrorCode::EmptyInput, "rmse of empty series");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(a.size()));
}

double rmse(const TimeSeries& a, const TimeSeries& b) { return rmse(a.samples(), b.samples()); }

double dtw(std::span<const double> a, std::span<const double> b, PointCost cost) {
    if (a.empty() || b.empty()) raise(ErrorCode::EmptyInput, "dtw needs non-empty sequences");
    const std::size_t m = b.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    // Two rolling rows of the (n+1) x (m+1) accumulated-cost matrix.
    std::vector<double> prev(m + 1, inf), cur(m + 1, inf);
    prev[0] = 0.0;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = inf;
        for (std::size_t j = 1; j <= m; ++j) {
            const double d = a[i - 1] - b[j - 1];
            const double c = cost == PointCost::AbsoluteDifference ? std::abs(d) : d * d;
            cur[j] = c + std::min({prev[j - 1], prev[j], cur[j - 1]});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

double windowed_dtw(std::span<const double> a, std::span<const double> b, const DtwConfig& cfg) {
    cfg.validate();
    if (a.size() != b.size()) raise(ErrorCode::LengthMismatch, "windowed_dtw needs equal lengths");
    if (a.size() < cfg.window_len) {
        raise(ErrorCode::TooShort, "series of " + std::to_string(a.size()) + " shorter than DTW window " +
                                       std::to_string(cfg.window_len));
    }
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t off = 0; off + cfg.window_len <= a.size(); off += cfg.window_stride) {
        total += dtw(a.subspan(off, cfg.window_len), b.subspan(off, cfg.window_len), cfg.point_cost);
        ++count;
    }
    return total / static_cast<double>(count);
}

double windowed_dtw(const TimeSeries& a, const TimeSeries& b, const DtwConfig& cfg) {
    return windowed_dtw(a.samples(), b.samples(), cfg);
}

double accuracy(std::span<const int> predictions, std::span<const int> labels) {
    if (predictions.size() != labels.size()) raise(ErrorCode::LengthMismatch, "accuracy needs equal lengths");
    require(!labels.empty(), ErrorCode::EmptyInput, "accuracy of empty label set");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) hits += predictions[i] == labels[i] ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

}  // namespace srp::metrics
