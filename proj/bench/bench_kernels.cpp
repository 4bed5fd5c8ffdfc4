// Serial reference (threads = 1) against the OpenMP kernels. Every benchmark
// takes the thread count as its argument; 0 means all cores.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "diolab/approx.hpp"
#include "diolab/prime.hpp"

using namespace diolab;

namespace {

const RealSpec kSqrt2 = parse_real("quad:(0+1*sqrt(2))/1");
const RealSpec kPi = parse_real("pi");

int threads_of(const benchmark::State& state) {
  const int t = static_cast<int>(state.range(0));
  return t == 0 ? omp_get_max_threads() : t;
}

void BM_Sweep(benchmark::State& state) {
  SweepOptions o;
  o.threads = threads_of(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sweep(kSqrt2, NormalizationRule::conjecture(), 200000, o));
  }
  state.SetItemsProcessed(state.iterations() * 200000);
}

void BM_LogSweep(benchmark::State& state) {
  SweepOptions o;
  o.threads = threads_of(state);
  const auto rule = NormalizationRule::borosh_fraenkel(mpq_class(1, 10));
  for (auto _ : state) benchmark::DoNotOptimize(sweep(kPi, rule, 100000, o));
  state.SetItemsProcessed(state.iterations() * 100000);
}

void BM_Hurwitz(benchmark::State& state) {
  const RealSpec c = parse_real("rat:1/2");
  for (auto _ : state) benchmark::DoNotOptimize(hurwitz_solutions(kPi, c, 200000, threads_of(state)));
  state.SetItemsProcessed(state.iterations() * 200000);
}

void BM_Zaharescu(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(zaharescu_count(kPi, mpq_class(3, 10), 200000, threads_of(state)));
  }
  state.SetItemsProcessed(state.iterations() * 200000);
}

void BM_Sieve(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(sieve(20000000, threads_of(state)));
  state.SetItemsProcessed(state.iterations() * 20000000);
}

}  // namespace

// Arg(1) is the serial reference path, Arg(0) all cores.
BENCHMARK(BM_Sweep)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_LogSweep)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Hurwitz)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Zaharescu)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Sieve)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
