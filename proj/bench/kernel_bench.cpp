// Serial reference kernels against the OpenMP/GEMM kernels on lenet64 layer
// shapes at batch 32. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <vector>

#include "svrt/nn/kernels.hpp"
#include "svrt/rng.hpp"

using namespace svrt;
using namespace svrt::nn;

namespace {

std::vector<float> random_values(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<float> v(n);
  for (auto& x : v) x = static_cast<float>(rng.uniform(-1.0, 1.0));
  return v;
}

// arg 0: layer (0 = conv1 on 64x64, 1 = conv2 on 20x30x30)
ConvGeometry conv_layer(int which) {
  return which == 0 ? ConvGeometry{32, 1, 64, 64, 20, 5, 1} : ConvGeometry{32, 20, 30, 30, 50, 5, 1};
}

template <bool Parallel>
void BM_ConvForward(benchmark::State& state) {
  const auto g = conv_layer(static_cast<int>(state.range(0)));
  const auto in = random_values(std::size_t(g.batch) * g.in_channels * g.in_h * g.in_w, 1);
  const auto w = random_values(std::size_t(g.out_channels) * g.in_channels * g.kernel * g.kernel, 2);
  const auto b = random_values(g.out_channels, 3);
  std::vector<float> out(std::size_t(g.batch) * g.out_channels * g.out_h() * g.out_w());
  for (auto _ : state) {
    if constexpr (Parallel)
      parallel::conv2d_forward<float>(g, in, w, b, out);
    else
      reference::conv2d_forward<float>(g, in, w, b, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_ConvBackward(benchmark::State& state) {
  const auto g = conv_layer(static_cast<int>(state.range(0)));
  const std::size_t n_in = std::size_t(g.batch) * g.in_channels * g.in_h * g.in_w;
  const std::size_t n_w = std::size_t(g.out_channels) * g.in_channels * g.kernel * g.kernel;
  const auto in = random_values(n_in, 1), w = random_values(n_w, 2);
  const auto go = random_values(std::size_t(g.batch) * g.out_channels * g.out_h() * g.out_w(), 3);
  std::vector<float> gi(n_in), gw(n_w), gb(g.out_channels);
  for (auto _ : state) {
    if constexpr (Parallel)
      parallel::conv2d_backward<float>(g, in, w, go, gi, gw, gb);
    else
      reference::conv2d_backward<float>(g, in, w, go, gi, gw, gb);
    benchmark::DoNotOptimize(gw.data());
  }
}

template <bool Parallel>
void BM_Dense(benchmark::State& state) {
  const DenseGeometry g{32, 50 * 13 * 13, 500};
  const auto in = random_values(std::size_t(g.batch) * g.in_features, 1);
  const auto w = random_values(std::size_t(g.in_features) * g.out_features, 2);
  const auto b = random_values(g.out_features, 3);
  const auto go = random_values(std::size_t(g.batch) * g.out_features, 4);
  std::vector<float> out(std::size_t(g.batch) * g.out_features), gi(in.size()), gw(w.size()), gb(b.size());
  for (auto _ : state) {
    if constexpr (Parallel) {
      parallel::dense_forward<float>(g, in, w, b, out);
      parallel::dense_backward<float>(g, in, w, go, gi, gw, gb);
    } else {
      reference::dense_forward<float>(g, in, w, b, out);
      reference::dense_backward<float>(g, in, w, go, gi, gw, gb);
    }
    benchmark::DoNotOptimize(gw.data());
  }
}

template <bool Parallel>
void BM_MaxPool(benchmark::State& state) {
  const PoolGeometry g{32, 20, 60, 60, 2, 2};
  const auto in = random_values(std::size_t(g.batch) * g.channels * g.in_h * g.in_w, 1);
  const std::size_t n_out = std::size_t(g.batch) * g.channels * g.out_h() * g.out_w();
  const auto go = random_values(n_out, 2);
  std::vector<float> out(n_out), gi(in.size());
  std::vector<std::int32_t> arg(n_out);
  for (auto _ : state) {
    if constexpr (Parallel) {
      parallel::maxpool_forward<float>(g, in, out, arg);
      parallel::maxpool_backward<float>(g, go, arg, gi);
    } else {
      reference::maxpool_forward<float>(g, in, out, arg);
      reference::maxpool_backward<float>(g, go, arg, gi);
    }
    benchmark::DoNotOptimize(gi.data());
  }
}

}  // namespace

BENCHMARK(BM_ConvForward<false>)->Name("conv_forward/reference")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvForward<true>)->Name("conv_forward/parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvBackward<false>)->Name("conv_backward/reference")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvBackward<true>)->Name("conv_backward/parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Dense<false>)->Name("dense_fc500/reference")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Dense<true>)->Name("dense_fc500/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MaxPool<false>)->Name("maxpool/reference")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MaxPool<true>)->Name("maxpool/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
