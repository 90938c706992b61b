#include <benchmark/benchmark.h>

#include <cmath>

#include "pmfrank/features.h"
#include "pmfrank/image.h"
#include "pmfrank/kernel.h"
#include "pmfrank/rng.h"

namespace pmfrank {
namespace {

GrayImage test_image(int side) {
  std::vector<double> px(static_cast<std::size_t>(side) * side);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      px[y * side + x] = 0.5 + 0.5 * std::sin(0.17 * x) * std::cos(0.11 * y);
    }
  }
  return GrayImage(side, side, std::move(px));
}

void BM_DenseDescriptors(benchmark::State& state) {
  const GrayImage image = test_image(static_cast<int>(state.range(0)));
  const DenseDescriptorConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(dense_descriptors(image, cfg));
}
BENCHMARK(BM_DenseDescriptors)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Quantize(benchmark::State& state) {
  const DescriptorSet set = dense_descriptors(test_image(128), DenseDescriptorConfig{});
  const std::vector<DescriptorSet> sets = {set};
  const Vocabulary vocab = build_vocabulary(sets, static_cast<std::size_t>(state.range(0)), 0, 5);
  for (auto _ : state) benchmark::DoNotOptimize(quantize(set, vocab));
}
BENCHMARK(BM_Quantize)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_ApproxMap(benchmark::State& state) {
  Rng rng(3);
  BowHistogram h;
  h.bins.resize(static_cast<std::size_t>(state.range(0)));
  double sum = 0.0;
  for (double& b : h.bins) sum += (b = uniform01(rng));
  for (double& b : h.bins) b /= sum;
  KernelMapConfig cfg;
  cfg.order = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(approx_map(h, cfg));
}
BENCHMARK(BM_ApproxMap)->Args({1000, 3})->Args({1000, 4});

}  // namespace
}  // namespace pmfrank
