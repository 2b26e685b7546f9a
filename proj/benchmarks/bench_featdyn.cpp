// Hot paths of a training step at the default experiment scale (d = 1000, n = 30, m = 20).
#include "featdyn/analysis.hpp"
#include "featdyn/mnist.hpp"
#include "featdyn/objectives.hpp"

#include <benchmark/benchmark.h>

using namespace featdyn;

namespace {

struct Fixture {
  Dataset data = generate_dataset({1000, 30, 5.0, 1.0, 1});
  DenoiserParams den = init_denoiser(20, 1000, {0.03, 2});
  ClassifierParams cls = init_classifier(20, 1000, {0.03, 3});
  NoiseSchedule sched = make_schedule(0.2);
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

}  // namespace

static void BM_ClassifierLossGrad(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(classification_loss_grad(f.cls, f.data));
}
BENCHMARK(BM_ClassifierLossGrad)->Unit(benchmark::kMicrosecond);

static void BM_DdpmExpectedLoss(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(ddpm_expected_loss(f.den, f.data, f.sched));
}
BENCHMARK(BM_DdpmExpectedLoss)->Unit(benchmark::kMicrosecond);

static void BM_DdpmExpectedLossGrad(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(ddpm_expected_loss_grad(f.den, f.data, f.sched));
}
BENCHMARK(BM_DdpmExpectedLossGrad)->Unit(benchmark::kMicrosecond);

static void BM_DdpmMcLossGrad(benchmark::State& state) {
  const auto& f = fixture();
  const int n_eps = static_cast<int>(state.range(0));
  Rng rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(ddpm_mc_loss_grad(f.den, f.data, f.sched, n_eps, rng));
  state.SetItemsProcessed(state.iterations() * n_eps);
}
BENCHMARK(BM_DdpmMcLossGrad)->Arg(16)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_ComputeMetrics(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(compute_metrics(f.den, f.data, f.den));
}
BENCHMARK(BM_ComputeMetrics)->Unit(benchmark::kMicrosecond);

static void BM_DecomposeWeight(benchmark::State& state) {
  const auto& f = fixture();
  const Vector w = f.den.w.row(0).transpose() + f.data[0].x2;
  const Vector w0 = f.den.w.row(0).transpose();
  for (auto _ : state)
    benchmark::DoNotOptimize(decompose_weight(w, w0, *f.data.signals(), f.data, &f.den.w));
}
BENCHMARK(BM_DecomposeWeight)->Unit(benchmark::kMicrosecond);

static void BM_ParseIdx(benchmark::State& state) {
  IdxTensor t{kIdxImagesMagic, {1000, 28, 28}, std::vector<std::uint8_t>(1000 * 784, 7)};
  const auto bytes = serialize_idx(t);
  for (auto _ : state) benchmark::DoNotOptimize(parse_idx(bytes));
  state.SetBytesProcessed(state.iterations() * static_cast<long>(bytes.size()));
}
BENCHMARK(BM_ParseIdx)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
