#include "srp/baselines.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "srp/error.hpp"

namespace srp::baselines {

namespace {

void check_alpha(int alpha) { require(alpha >= 1, ErrorCode::InvalidArgument, "alpha must be >= 1"); }

TimeSeries upsampled(std::vector<double> values, const TimeSeries& x, int alpha) {
    return {std::move(values), x.sample_rate_hz() * alpha, x.domain()};
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

TimeSeries upsample_nearest(const TimeSeries& x, int alpha) {
    check_alpha(alpha);
    const auto a = static_cast<std::size_t>(alpha);
    std::vector<double> out(x.size() * a);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i / a];
    return upsampled(std::move(out), x, alpha);
}

TimeSeries upsample_linear(const TimeSeries& x, int alpha) {
    check_alpha(alpha);
    require(x.size() >= 2, ErrorCode::TooShort, "linear interpolation needs at least 2 samples");
    const auto a = static_cast<std::size_t>(alpha);
    const std::size_t d = x.size();
    std::vector<double> out(d * a);
    for (std::size_t i = 0; i + 1 < d; ++i) {
        for (std::size_t c = 0; c < a; ++c) {
            const double t = static_cast<double>(c) / static_cast<double>(a);
            out[i * a + c] = c == 0 ? x[i] : x[i] + t * (x[i + 1] - x[i]);
        }
    }
    for (std::size_t j = (d - 1) * a; j < d * a; ++j) out[j] = x[d - 1];
    return upsampled(std::move(out), x, alpha);
}

TimeSeries upsample_cubic(const TimeSeries& x, int alpha) {
    check_alpha(alpha);
    require(x.size() >= 4, ErrorCode::TooShort, "cubic spline needs at least 4 samples");
    const auto a = static_cast<std::size_t>(alpha);
    const std::size_t n = x.size();
    const double h = static_cast<double>(alpha);
    const auto& y = x.values();

    // Second derivatives M at the knots. Not-a-knot on a uniform grid gives
    // M0 = 2M1 - M2 and M[n-1] = 2M[n-2] - M[n-3], which collapses the first
    // and last interior rows to 6 M1 = r1 and 6 M[n-2] = r[n-2].
    std::vector<double> r(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) r[i] = 6.0 * (y[i - 1] - 2.0 * y[i] + y[i + 1]) / (h * h);
    std::vector<double> m(n, 0.0);
    m[1] = r[1] / 6.0;
    m[n - 2] = r[n - 2] / 6.0;
    if (n > 4) {
        // Tridiagonal rows i = 2..n-3: M[i-1] + 4 M[i] + M[i+1] = r[i].
        const std::size_t lo = 2, hi = n - 3;
        std::vector<double> cp(n, 0.0), dp(n, 0.0);
        for (std::size_t i = lo; i <= hi; ++i) {
            double rhs = r[i];
            if (i == lo) rhs -= m[1];
            if (i == hi) rhs -= m[n - 2];
            const double sub = i == lo ? 0.0 : 1.0;
            const double denom = 4.0 - sub * cp[i - 1];
            cp[i] = (i == hi) ? 0.0 : 1.0 / denom;
            dp[i] = (rhs - sub * dp[i - 1]) / denom;
        }
        m[hi] = dp[hi];
        for (std::size_t i = hi; i-- > lo;) m[i] = dp[i] - cp[i] * m[i + 1];
    }
    m[0] = 2.0 * m[1] - m[2];
    m[n - 1] = 2.0 * m[n - 2] - m[n - 3];

    std::vector<double> out(n * a);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t c = 0; c < a; ++c) {
            if (c == 0) {
                out[i * a] = y[i];
                continue;
            }
            const double t = static_cast<double>(c);
            const double u = h - t;
            out[i * a + c] = m[i] * u * u * u / (6.0 * h) + m[i + 1] * t * t * t / (6.0 * h) +
                             (y[i] / h - m[i] * h / 6.0) * u + (y[i + 1] / h - m[i + 1] * h / 6.0) * t;
        }
    }
    for (std::size_t j = (n - 1) * a; j < n * a; ++j) out[j] = y[n - 1];
    return upsampled(std::move(out), x, alpha);
}

void MapConfig::validate() const {
    require(lambda >= 0.0 && std::isfinite(lambda), ErrorCode::InvalidArgument, "lambda must be >= 0");
    require(max_iter >= 1, ErrorCode::InvalidArgument, "max_iter must be positive");
    require(tol > 0.0, ErrorCode::InvalidArgument, "tol must be positive");
}

std::vector<double> second_difference(const std::vector<double>& y) {
    if (y.size() < 3) return {};
    std::vector<double> out(y.size() - 2);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = y[j] - 2.0 * y[j + 1] + y[j + 2];
    return out;
}

std::vector<double> map_normal_operator(const std::vector<double>& y, int alpha, int phase, double lambda) {
    const auto a = static_cast<std::size_t>(alpha);
    const auto p = static_cast<std::size_t>(phase);
    std::vector<double> out(y.size(), 0.0);
    for (std::size_t j = p; j < y.size(); j += a) out[j] = y[j];
    if (lambda != 0.0 && y.size() >= 3) {
        const auto dd = second_difference(y);
        for (std::size_t j = 0; j < dd.size(); ++j) {
            out[j] += lambda * dd[j];
            out[j + 1] -= 2.0 * lambda * dd[j];
            out[j + 2] += lambda * dd[j];
        }
    }
    return out;
}

MapSolution map_solve(const std::vector<double>& x, int alpha, int phase, const MapConfig& cfg) {
    cfg.validate();
    require(alpha >= 1 && phase >= 0 && phase < alpha, ErrorCode::InvalidArgument, "bad alpha/phase");
    require(!x.empty(), ErrorCode::EmptyInput, "MAP upsampling needs input samples");
    const auto a = static_cast<std::size_t>(alpha);
    const auto p = static_cast<std::size_t>(phase);
    const std::size_t n = x.size() * a;

    std::vector<double> b(n, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) b[i * a + p] = x[i];

    // Jacobi-preconditioned CG from the sample-and-hold guess.
    std::vector<double> diag(n, 0.0);
    for (std::size_t j = p; j < n; j += a) diag[j] = 1.0;
    if (n >= 3) {
        for (std::size_t j = 0; j + 2 < n; ++j) {
            diag[j] += cfg.lambda;
            diag[j + 1] += 4.0 * cfg.lambda;
            diag[j + 2] += cfg.lambda;
        }
    }
    for (double& v : diag) v = v > 0.0 ? 1.0 / v : 1.0;

    MapSolution sol;
    sol.y.resize(n);
    for (std::size_t j = 0; j < n; ++j) sol.y[j] = x[j / a];

    auto residual = [&](const std::vector<double>& y) {
        auto ay = map_normal_operator(y, alpha, phase, cfg.lambda);
        for (std::size_t j = 0; j < n; ++j) ay[j] = b[j] - ay[j];
        return ay;
    };

    int it = 0;
    double grad = 0.0;
    std::vector<double> r, z(n), d(n);
    // Restart from the current iterate whenever the recursive residual
    // claims convergence that the true residual does not confirm.
    for (;;) {
        r = residual(sol.y);
        grad = 2.0 * std::sqrt(dot(r, r));
        if (grad <= cfg.tol || it >= cfg.max_iter) break;
        for (std::size_t j = 0; j < n; ++j) z[j] = diag[j] * r[j];
        d = z;
        double rz = dot(r, z);
        // The objective's gradient is -2 r.
        while (grad > cfg.tol && it < cfg.max_iter) {
            const auto ad = map_normal_operator(d, alpha, phase, cfg.lambda);
            const double dad = dot(d, ad);
            if (!(dad > 0.0)) break;
            const double step = rz / dad;
            for (std::size_t j = 0; j < n; ++j) {
                sol.y[j] += step * d[j];
                r[j] -= step * ad[j];
            }
            ++it;
            for (std::size_t j = 0; j < n; ++j) z[j] = diag[j] * r[j];
            const double rz_next = dot(r, z);
            const double beta = rz_next / rz;
            rz = rz_next;
            for (std::size_t j = 0; j < n; ++j) d[j] = z[j] + beta * d[j];
            grad = 2.0 * std::sqrt(dot(r, r));
        }
        if (grad > cfg.tol) {
            // Breakdown or budget exhausted.
            r = residual(sol.y);
            grad = 2.0 * std::sqrt(dot(r, r));
            break;
        }
    }
    sol.gradient_norm = grad;
    sol.iterations = it;
    if (sol.gradient_norm > cfg.tol) throw DidNotConverge(sol.gradient_norm, it);
    return sol;
}

TimeSeries map_upsample(const TimeSeries& x, const DegradationSpec& spec, const MapConfig& cfg) {
    spec.validate();
    auto sol = map_solve(x.values(), spec.alpha, spec.phase, cfg);
    return {std::move(sol.y), x.sample_rate_hz() * spec.alpha, x.domain()};
}

}  // namespace srp::baselines
