#pragma once

#include <vector>

#include "srp/signal.hpp"

namespace srp::baselines {

// All upsamplers put known sample i at high-res index alpha*i and hold the
// last known value over the trailing alpha-1 indices.

TimeSeries upsample_nearest(const TimeSeries& x, int alpha);
TimeSeries upsample_linear(const TimeSeries& x, int alpha);

/// Not-a-knot cubic spline through (alpha*i, x[i]); reproduces cubic polynomials.
TimeSeries upsample_cubic(const TimeSeries& x, int alpha);

enum class Prior { SecondDifferenceQuadratic };

struct MapConfig {
    double lambda = 1e-2;
    Prior prior = Prior::SecondDifferenceQuadratic;
    int max_iter = 5000;
    double tol = 1e-9;

    void validate() const;
};

struct MapSolution {
    std::vector<double> y;
    int iterations = 0;
    double gradient_norm = 0.0;
};

/// Minimizes ||D y - x||^2 + lambda ||Delta2 y||^2 with conjugate gradient on
/// (D^T D + lambda Delta2^T Delta2) y = D^T x. D keeps sample `phase` of each
/// alpha-block. Throws DidNotConverge when the gradient norm stays above tol.
MapSolution map_solve(const std::vector<double>& x, int alpha, int phase, const MapConfig& cfg);

TimeSeries map_upsample(const TimeSeries& x, const DegradationSpec& spec, const MapConfig& cfg);

/// y -> (D^T D + lambda Delta2^T Delta2) y, exposed for tests and diagnostics.
std::vector<double> map_normal_operator(const std::vector<double>& y, int alpha, int phase, double lambda);
std::vector<double> second_difference(const std::vector<double>& y);

}  // namespace srp::baselines
