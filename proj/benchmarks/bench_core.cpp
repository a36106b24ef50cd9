#include <array>

#include <benchmark/benchmark.h>

#include "nlspec/assembly.hpp"
#include "nlspec/spectral.hpp"

namespace {

using namespace nlspec;

Grid line(std::size_t n) {
  const std::array<AxisBounds, 1> b{AxisBounds{0.0, 1.0}};
  const std::array<std::size_t, 1> c{n};
  return Grid::uniform(b, c);
}

KernelSpec epanechnikov() {
  KernelSpec k;
  k.family = KernelFamily::epanechnikov;
  k.sigma = 0.25;
  return k;
}

Coefficient bump(const Grid& g) {
  CoefficientSpec c;
  c.family = CoefficientFamily::cosine_bump;
  c.center = {0.5, 0.0};
  c.support = 0.5;
  return Coefficient::sample(c, g);
}

void BM_Assemble1D(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Grid g = line(n);
  const Coefficient a = bump(g);
  const KernelSpec k = epanechnikov();
  const auto threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(assemble(g, k, a, OperatorVariant::L_plus_a, threads));
}
BENCHMARK(BM_Assemble1D)->ArgsProduct({{256, 512, 1024, 2048}, {1, 4}})->Unit(benchmark::kMillisecond);

void BM_Assemble2D(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::array<AxisBounds, 2> b{AxisBounds{0.0, 1.0}, AxisBounds{0.0, 1.0}};
  const std::array<std::size_t, 2> c{n, n};
  const Grid g = Grid::uniform(b, c);
  KernelSpec k;
  k.dimension = 2;
  k.sigma = 0.5;  // h <= sigma/8 at n = 16
  const Coefficient a = bump(g);
  for (auto _ : state) benchmark::DoNotOptimize(assemble(g, k, a, OperatorVariant::L_plus_a, 1));
}
BENCHMARK(BM_Assemble2D)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_PrincipalEig(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Grid g = line(n);
  const auto op = assemble(g, epanechnikov(), bump(g), OperatorVariant::L_plus_a, 0);
  std::size_t iters = 0;
  for (auto _ : state) {
    const auto r = principal_eig(op);
    iters = r.iterations;
    benchmark::DoNotOptimize(r.lambda_p);
  }
  state.counters["iterations"] = static_cast<double>(iters);
}
BENCHMARK(BM_PrincipalEig)->RangeMultiplier(2)->Range(128, 2048)->Unit(benchmark::kMillisecond);

void BM_LambdaVMin(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Grid g = line(n);
  const auto op = assemble(g, epanechnikov(), bump(g), OperatorVariant::L_plus_a, 0);
  for (auto _ : state) benchmark::DoNotOptimize(lambda_v_min(op).lambda_v);
}
BENCHMARK(BM_LambdaVMin)->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
