#include <benchmark/benchmark.h>

#include <random>

#include "olxp/benchspec.h"
#include "olxp/datagen.h"
#include "olxp/driver.h"
#include "olxp/loadgen.h"
#include "olxp/metrics.h"

namespace {

std::vector<int64_t> Latencies(size_t n) {
  std::mt19937_64 gen(n);
  std::lognormal_distribution<double> dist(7.0, 1.2);
  std::vector<int64_t> v(n);
  for (auto& x : v) x = static_cast<int64_t>(dist(gen)) + 1;
  return v;
}

void BM_Percentile(benchmark::State& state) {
  const auto samples = Latencies(static_cast<size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(olxp::Percentile(samples, 0.999));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Percentile)->RangeMultiplier(10)->Range(100, 1000000);

void BM_ComputeStats(benchmark::State& state) {
  const auto samples = Latencies(static_cast<size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(olxp::ComputeStats(samples));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ComputeStats)->RangeMultiplier(10)->Range(100, 1000000);

void BM_RecorderRecord(benchmark::State& state) {
  olxp::Recorder recorder;
  olxp::LatencySample s;
  s.template_name = "NewOrder";
  for (auto _ : state) {
    s.latency_us++;
    recorder.Record(s);
  }
}
BENCHMARK(BM_RecorderRecord)->Threads(1)->Threads(4);

void BM_ScheduleOpenLoop(benchmark::State& state) {
  const auto jitter = state.range(0) ? olxp::Jitter::kPoisson : olxp::Jitter::kFixed;
  for (auto _ : state) {
    benchmark::DoNotOptimize(olxp::ScheduleOpenLoop(1000, 300, jitter, 7));
  }
  state.SetItemsProcessed(state.iterations() * 300000);
}
BENCHMARK(BM_ScheduleOpenLoop)->Arg(0)->Arg(1);

void BM_MakeRequest(benchmark::State& state) {
  const auto& name = olxp::BuiltinBenchmarks()[static_cast<size_t>(state.range(0))];
  auto catalog = olxp::LoadCatalog(name);
  const auto cls = static_cast<olxp::WorkloadClass>(state.range(1));
  const olxp::Mix mix = olxp::DefaultMix(*catalog, cls);
  uint64_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(olxp::MakeRequest(*catalog, mix, cls, 1, i++, 50));
  }
  state.SetLabel(name);
}
BENCHMARK(BM_MakeRequest)->ArgsProduct({{0, 1, 2}, {0, 1, 2}});

void BM_GenerateRow(benchmark::State& state) {
  auto catalog = olxp::LoadCatalog(olxp::BuiltinBenchmarks()[static_cast<size_t>(state.range(0))]);
  olxp::PopulationPlan plan(*catalog, 1, 42);
  int64_t i = 0;
  for (auto _ : state) {
    for (const auto& t : plan.tables()) benchmark::DoNotOptimize(plan.Generate(t, i % t.rows));
    ++i;
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(plan.tables().size()));
}
BENCHMARK(BM_GenerateRow)->DenseRange(0, 2);

void BM_EmbeddedPointRead(benchmark::State& state) {
  auto catalog = olxp::LoadCatalog("fibenchmark");
  auto pool = olxp::Connect(olxp::MakeTarget("embedded://", 1, olxp::Isolation::kRepeatableRead));
  olxp::CreateSchema(*pool, *catalog, false);
  olxp::Populate(*catalog, 1, 42, *pool);
  const auto* balance = catalog->FindTransaction("Balance");
  olxp::Rng rng(3);
  for (auto _ : state) {
    auto txn = olxp::Instantiate(*catalog, *balance, rng, 1);
    benchmark::DoNotOptimize(olxp::ExecuteTransaction(*pool, txn));
  }
}
BENCHMARK(BM_EmbeddedPointRead)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
