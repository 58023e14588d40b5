#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "srp/signal.hpp"

namespace srp::metrics {

enum class PointCost { AbsoluteDifference, SquaredDifference };

struct DtwConfig {
    std::size_t window_len = 100;
    std::size_t window_stride = 100;
    PointCost point_cost = PointCost::AbsoluteDifference;

    void validate() const;
};

double rmse(std::span<const double> a, std::span<const double> b);
double rmse(const TimeSeries& a, const TimeSeries& b);

/// Full dynamic-programming DTW with match/insert/delete steps; returns the
/// summed point cost along the optimal alignment.
double dtw(std::span<const double> a, std::span<const double> b, PointCost cost = PointCost::AbsoluteDifference);

/// Mean DTW over aligned windows at offsets 0, stride, ...; partial tail dropped.
double windowed_dtw(std::span<const double> a, std::span<const double> b, const DtwConfig& cfg);
double windowed_dtw(const TimeSeries& a, const TimeSeries& b, const DtwConfig& cfg);

double accuracy(std::span<const int> predictions, std::span<const int> labels);

}  // namespace srp::metrics
