// Serial reference against the OpenMP batch evaluator on curvature components.

#include <benchmark/benchmark.h>

#include <map>

#include "kvg/batch.hpp"
#include "kvg/connection.hpp"

namespace {

using namespace kvg;

struct Workload {
  std::vector<expr::Expr> exprs;
  PointSet points;
};

const Workload& workload(std::size_t points) {
  static std::map<std::size_t, Workload> cache;
  auto it = cache.find(points);
  if (it != cache.end()) return it->second;
  ChartPtr chart = euclidean_chart(3);
  auto g = MetricField::parse(chart, {"1 + y^2", "x*y/4", "0", "x*y/4", "exp(x)", "z/3", "0", "z/3", "2 + sin(x*z)"});
  Workload w{riemann_tensor(levi_civita(g)).components(), chart->sample(points, 1)};
  return cache.emplace(points, std::move(w)).first->second;
}

void BM_Serial(benchmark::State& state) {
  const auto& w = workload(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_batch_serial(w.exprs, w.points));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Parallel(benchmark::State& state) {
  const auto& w = workload(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_batch(w.exprs, w.points));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ParallelPrecompiled(benchmark::State& state) {
  const auto& w = workload(static_cast<std::size_t>(state.range(0)));
  Tape tape(w.exprs);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_batch(tape, w.points));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Serial)->Arg(100)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Parallel)->Arg(100)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ParallelPrecompiled)->Arg(100)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
