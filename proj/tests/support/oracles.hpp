#pragma once

// Independent reference implementations used as test oracles. They favour
// obviousness over speed and share no code with the library.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "srp/srpnet.hpp"

namespace oracle {

/// Dense solve of (D^T D + lambda L^T L) y = D^T x, L the (n-2) x n second-difference matrix.
inline std::vector<double> dense_map(const std::vector<double>& x, int alpha, int phase, double lambda) {
    const int d = static_cast<int>(x.size());
    const int n = alpha * d;
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(d, n);
    for (int i = 0; i < d; ++i) D(i, alpha * i + phase) = 1.0;
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(std::max(n - 2, 0), n);
    for (int r = 0; r + 2 < n; ++r) {
        L(r, r) = 1.0;
        L(r, r + 1) = -2.0;
        L(r, r + 2) = 1.0;
    }
    Eigen::VectorXd xv(d);
    for (int i = 0; i < d; ++i) xv(i) = x[static_cast<std::size_t>(i)];
    const Eigen::MatrixXd A = D.transpose() * D + lambda * L.transpose() * L;
    const Eigen::VectorXd y = A.fullPivLu().solve(D.transpose() * xv);
    return {y.data(), y.data() + y.size()};
}

/// DTW straight from the recursive definition, memoized.
inline double brute_dtw(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size(), m = b.size();
    std::vector<double> memo(n * m, -1.0);
    std::function<double(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t j) -> double {
        double& slot = memo[i * m + j];
        if (slot >= 0.0) return slot;
        const double c = std::abs(a[i] - b[j]);
        double best;
        if (i == 0 && j == 0) best = 0.0;
        else if (i == 0) best = rec(0, j - 1);
        else if (j == 0) best = rec(i - 1, 0);
        else best = std::min({rec(i - 1, j - 1), rec(i - 1, j), rec(i, j - 1)});
        slot = c + best;
        return slot;
    };
    return rec(n - 1, m - 1);
}

inline double brute_windowed_dtw(const std::vector<double>& a, const std::vector<double>& b, std::size_t len,
                                 std::size_t stride) {
    double total = 0.0;
    int count = 0;
    for (std::size_t off = 0; off + len <= a.size(); off += stride) {
        std::vector<double> wa(a.begin() + static_cast<long>(off), a.begin() + static_cast<long>(off + len));
        std::vector<double> wb(b.begin() + static_cast<long>(off), b.begin() + static_cast<long>(off + len));
        total += brute_dtw(wa, wb);
        ++count;
    }
    return total / count;
}

/// Same-padded cross-correlation by direct summation.
template <typename T>
srp::nn::Tensor<T> naive_conv1d(const srp::nn::Tensor<T>& in, const srp::nn::Tensor<T>& w,
                                const srp::nn::Tensor<T>& bias) {
    const long k = static_cast<long>(w.length()), half = k / 2, len = static_cast<long>(in.length());
    srp::nn::Tensor<T> out(in.batch(), w.batch(), in.length());
    for (std::size_t b = 0; b < in.batch(); ++b)
        for (std::size_t o = 0; o < w.batch(); ++o)
            for (long t = 0; t < len; ++t) {
                double acc = static_cast<double>(bias[o]);
                for (std::size_t i = 0; i < in.channels(); ++i)
                    for (long j = 0; j < k; ++j) {
                        const long src = t + j - half;
                        if (src >= 0 && src < len) {
                            acc += static_cast<double>(w(o, i, static_cast<std::size_t>(j))) *
                                   static_cast<double>(in(b, i, static_cast<std::size_t>(src)));
                        }
                    }
                out(b, o, static_cast<std::size_t>(t)) = static_cast<T>(acc);
            }
    return out;
}

/// |DFT at frequency f| / n, by direct summation.
inline double dft_magnitude(const std::vector<double>& x, double f, double fs) {
    double re = 0.0, im = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        const double ph = 2.0 * std::numbers::pi * f * static_cast<double>(t) / fs;
        re += x[t] * std::cos(ph);
        im -= x[t] * std::sin(ph);
    }
    return std::hypot(re, im) / static_cast<double>(x.size());
}

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double impurity = std::numeric_limits<double>::infinity();
};

/// Tries every feature and every midpoint; keeps the first strictly better one.
inline Split exhaustive_gini_split(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                                   int n_classes) {
    auto gini = [&](const std::vector<int>& idx) {
        if (idx.empty()) return 0.0;
        std::vector<double> c(static_cast<std::size_t>(n_classes), 0.0);
        for (int i : idx) c[static_cast<std::size_t>(y[static_cast<std::size_t>(i)])] += 1.0;
        double s = 0.0;
        for (double v : c) s += (v / idx.size()) * (v / idx.size());
        return 1.0 - s;
    };
    Split best;
    for (std::size_t f = 0; f < X.front().size(); ++f) {
        std::vector<double> vals;
        for (const auto& row : X) vals.push_back(row[f]);
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
            const double thr = vals[k] + (vals[k + 1] - vals[k]) / 2.0;
            std::vector<int> l, r;
            for (std::size_t i = 0; i < X.size(); ++i) (X[i][f] <= thr ? l : r).push_back(static_cast<int>(i));
            const double imp = (l.size() * gini(l) + r.size() * gini(r)) / static_cast<double>(X.size());
            if (imp < best.impurity - 1e-15) best = {static_cast<int>(f), thr, imp};
        }
    }
    return best;
}

/// max_i |a_i - n_i| / max(|a_i|, |n_i|, floor) between analytic and numeric gradients.
inline double relative_error(const std::vector<double>& analytic, const std::vector<double>& numeric,
                             double floor = 1e-6) {
    double worst = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        const double scale = std::max({std::abs(analytic[i]), std::abs(numeric[i]), floor});
        worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / scale);
    }
    return worst;
}

/// Central differences of f with respect to every entry of `x`.
inline std::vector<double> numeric_gradient(std::vector<double>& x, const std::function<double()>& f,
                                            double h = 1e-6) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double saved = x[i];
        x[i] = saved + h;
        const double up = f();
        x[i] = saved - h;
        const double down = f();
        x[i] = saved;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

inline void fill_normal(std::vector<double>& v, std::mt19937_64& rng, double sd = 1.0) {
    std::normal_distribution<double> d(0.0, sd);
    for (auto& x : v) x = d(rng);
}

}  // namespace oracle
