#include <benchmark/benchmark.h>

#include <random>

#include "srp/baselines.hpp"
#include "srp/metrics.hpp"
#include "srp/srpnet.hpp"

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d;
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

void BM_Dtw(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = noise(n, 1), b = noise(n, 2);
    for (auto _ : state) benchmark::DoNotOptimize(srp::metrics::dtw(a, b));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Dtw)->RangeMultiplier(2)->Range(64, 1024)->Complexity(benchmark::oNSquared);

void BM_Conv1d(benchmark::State& state) {
    const auto c = static_cast<std::size_t>(state.range(0));
    srp::nn::Tensor<float> x(16, c, 100), w(c, c, 3), bias(1, c, 1);
    std::mt19937_64 rng(3);
    std::normal_distribution<float> d;
    for (auto& v : x.values()) v = d(rng);
    for (auto& v : w.values()) v = d(rng);
    for (auto _ : state) benchmark::DoNotOptimize(srp::nn::conv1d(x, w, bias));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(16 * c * c * 3 * 100));
}
BENCHMARK(BM_Conv1d)->Arg(16)->Arg(64);

void BM_Conv1dBackward(benchmark::State& state) {
    const auto c = static_cast<std::size_t>(state.range(0));
    srp::nn::Tensor<float> x(16, c, 100), w(c, c, 3), g(16, c, 100), gw(c, c, 3), gb(1, c, 1);
    std::mt19937_64 rng(4);
    std::normal_distribution<float> d;
    for (auto& v : x.values()) v = d(rng);
    for (auto& v : w.values()) v = d(rng);
    for (auto& v : g.values()) v = d(rng);
    for (auto _ : state) benchmark::DoNotOptimize(srp::nn::conv1d_backward(x, w, g, gw, gb));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(16 * c * c * 3 * 100));
}
BENCHMARK(BM_Conv1dBackward)->Arg(16)->Arg(64);

void BM_InferDefaultModel(benchmark::State& state) {
    const srp::nn::SrpModel model(srp::nn::SrpHyper{}, 7);
    const auto v = noise(1000, 5);
    std::vector<double> pos(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) pos[i] = 0.5 + 0.1 * v[i];
    const srp::TimeSeries low(pos, 100.0, srp::Domain::Preprocessed);
    for (auto _ : state) benchmark::DoNotOptimize(srp::nn::infer(model, low));
    state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_InferDefaultModel)->Unit(benchmark::kMillisecond);

void BM_MapUpsample(benchmark::State& state) {
    const auto v = noise(100, 6);
    const srp::TimeSeries low(v, 100.0, srp::Domain::Preprocessed);
    const srp::DegradationSpec spec{.alpha = 10, .phase = 0, .noise_sigma = 0.01, .rng_seed = 0};
    for (auto _ : state) benchmark::DoNotOptimize(srp::baselines::map_upsample(low, spec, {}));
}
BENCHMARK(BM_MapUpsample);

}  // namespace

BENCHMARK_MAIN();
