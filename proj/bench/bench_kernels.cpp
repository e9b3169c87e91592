// Serial reference against the OpenMP path for the batch kernels.
// Arg 0 is serial, 1 is parallel.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "minimal_bottle/kernels.hpp"

using namespace minimal_bottle;

namespace {

const TransportEngine& engine() {
  static const TransportEngine e(CocycleSpec::liouville_default(), ProfileSpec{}, 60);
  return e;
}

std::vector<TorusPoint> points(std::size_t n) {
  std::mt19937_64 rng(42);
  std::vector<TorusPoint> out(n);
  for (auto& p : out) p = {CirclePoint::from_raw(rng()), CirclePoint::from_raw(rng())};
  return out;
}

Execution exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void BM_cdf_batch(benchmark::State& state) {
  std::vector<FiberQuery> qs;
  for (const auto& p : points(4096)) qs.push_back({p.x, Lift::from_point(p.y)});
  for (auto _ : state) benchmark::DoNotOptimize(cdf_batch(engine().measures(), qs, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(qs.size()));
}

void BM_tau_batch(benchmark::State& state) {
  const auto ps = points(1024);
  for (auto _ : state) benchmark::DoNotOptimize(tau_batch(engine(), ps, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ps.size()));
}

void BM_s_hat_batch(benchmark::State& state) {
  const auto ps = points(1024);
  for (auto _ : state) benchmark::DoNotOptimize(s_hat_batch(engine(), ps, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ps.size()));
}

}  // namespace

BENCHMARK(BM_cdf_batch)->Arg(0)->Arg(1);
BENCHMARK(BM_tau_batch)->Arg(0)->Arg(1);
BENCHMARK(BM_s_hat_batch)->Arg(0)->Arg(1);
BENCHMARK_MAIN();
