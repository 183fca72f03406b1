// Parallel kernels against their serial references. Arg(0) = all workers,
// Arg(1) = worker limit 1.

#include <benchmark/benchmark.h>

#include <memory>

#include "wavetrace/parallel.hpp"
#include "wavetrace/profile.hpp"
#include "wavetrace/quantize.hpp"
#include "wavetrace/raytrace.hpp"
#include "wavetrace/sampling.hpp"
#include "wavetrace/symbols.hpp"

namespace {

using namespace wavetrace;

std::shared_ptr<const Profile> sine_bump() {
  return std::make_shared<const Profile>(ShiftedSineCoriolis{2.0, 1.0, 1.0},
                                         BumpFlow{3.14159, 3.14159, 1.5, 0.3});
}

// <xi>_b + u . xi: a typical mixed scalar symbol.
ScalarSymbol test_symbol(const std::shared_ptr<const Profile>& p) {
  return sym::xi_b(p) + sym::u1(p) * sym::xi1() + sym::u2(p) * sym::xi2();
}

void BM_WeylScalar(benchmark::State& state) {
  set_worker_limit(static_cast<int>(state.range(1)));
  const auto p = sine_bump();
  const ScalarSymbol a = test_symbol(p);
  Grid g;
  g.n = static_cast<int>(state.range(0));
  g.eps = 0.2;
  for (auto _ : state) benchmark::DoNotOptimize(weyl_quantize_scalar(a, g).matrix.data());
  set_worker_limit(0);
}
BENCHMARK(BM_WeylScalar)->Args({8, 0})->Args({8, 1})->Args({16, 0})->Args({16, 1})
    ->Unit(benchmark::kMillisecond);

void BM_WeylScalarReference(benchmark::State& state) {
  const auto p = sine_bump();
  const ScalarSymbol a = test_symbol(p);
  Grid g;
  g.n = static_cast<int>(state.range(0));
  g.eps = 0.2;
  for (auto _ : state)
    benchmark::DoNotOptimize(weyl_quantize_scalar_reference(a, g).matrix.data());
}
BENCHMARK(BM_WeylScalarReference)->Arg(8)->Unit(benchmark::kMillisecond);

std::vector<PhasePoint> ensemble_starts(std::size_t n) {
  PhaseBox box;
  box.lo = {-1.0, 0.5, 0.2, -0.2};
  box.hi = {1.0, 1.0, 0.6, 0.2};
  BoxSampler sampler(box, 42);
  return sampler.take(n);
}

RayConfig ensemble_config() {
  RayConfig cfg;
  cfg.t_max = 100.0;
  cfg.keep_dense = false;
  return cfg;
}

void BM_EnsembleEvolve(benchmark::State& state) {
  set_worker_limit(static_cast<int>(state.range(0)));
  const Profile profile(LinearCoriolis{1.0}, ZeroFlow{});
  const auto starts = ensemble_starts(64);
  const RayConfig cfg = ensemble_config();
  for (auto _ : state) benchmark::DoNotOptimize(ensemble_evolve(profile, starts, cfg).min_xi_b);
  set_worker_limit(0);
}
BENCHMARK(BM_EnsembleEvolve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_EnsembleEvolveSerial(benchmark::State& state) {
  const Profile profile(LinearCoriolis{1.0}, ZeroFlow{});
  const auto starts = ensemble_starts(64);
  const RayConfig cfg = ensemble_config();
  for (auto _ : state)
    benchmark::DoNotOptimize(ensemble_evolve_serial(profile, starts, cfg).min_xi_b);
}
BENCHMARK(BM_EnsembleEvolveSerial)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
