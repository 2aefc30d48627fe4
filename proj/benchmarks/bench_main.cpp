#include <benchmark/benchmark.h>

#include <complex>

#include "basins/basin.hpp"
#include "basins/flows.hpp"
#include "basins/function.hpp"
#include "basins/methods.hpp"
#include "basins/voronoi.hpp"

using namespace basins;

namespace {

const FunctionExpr& f1() {
  static const FunctionExpr fn = catalog_lookup("f1");
  return fn;
}

void bm_eval_jet(benchmark::State& state) {
  const Complex z{1.7, -2.3};
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval_jet(f1(), z));
  }
}
BENCHMARK(bm_eval_jet);

void bm_eval_jet_f23(benchmark::State& state) {
  static const FunctionExpr fn = catalog_lookup("f23");
  const Complex z{0.3, 0.4};
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval_jet(fn, z));
  }
}
BENCHMARK(bm_eval_jet_f23);

void bm_objective_jet(benchmark::State& state) {
  const Complex z{1.7, -2.3};
  for (auto _ : state) {
    benchmark::DoNotOptimize(objective_jet(f1(), z));
  }
}
BENCHMARK(bm_objective_jet);

void bm_newton_step(benchmark::State& state) {
  const Complex z{1.7, -2.3};
  for (auto _ : state) {
    benchmark::DoNotOptimize(newton_step(f1(), z));
  }
}
BENCHMARK(bm_newton_step);

void bm_bnqn_step(benchmark::State& state) {
  const MethodConfig cfg;
  const Complex z{1.7, -2.3};
  for (auto _ : state) {
    benchmark::DoNotOptimize(bnqn_step(f1(), z, cfg));
  }
}
BENCHMARK(bm_bnqn_step);

void bm_rk4_plain_step(benchmark::State& state) {
  const Complex z{1.7, -2.3};
  auto rhs = [](Complex y) { return flow_rhs(FlowKind::Plain, f1(), y); };
  for (auto _ : state) {
    benchmark::DoNotOptimize(rk4_step(rhs, z, 0.01));
  }
}
BENCHMARK(bm_rk4_plain_step);

void bm_sweep(benchmark::State& state) {
  const Engine engine = static_cast<Engine>(state.range(0));
  SweepConfig cfg;
  cfg.grid.nx = 32;
  cfg.grid.ny = 32;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sweep(engine, f1(), cfg));
  }
}
BENCHMARK(bm_sweep)
    ->Arg(static_cast<int>(Engine::Newton))
    ->Arg(static_cast<int>(Engine::Bnqn))
    ->Arg(static_cast<int>(Engine::Voronoi))
    ->Unit(benchmark::kMillisecond);

void bm_render_voronoi(benchmark::State& state) {
  const SiteSet sites = reduced_sites(catalog_lookup("f23"));
  GridSpec grid;
  grid.nx = 128;
  grid.ny = 128;
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_voronoi(sites, grid));
  }
  state.SetItemsProcessed(state.iterations() * grid.pixel_count());
}
BENCHMARK(bm_render_voronoi)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
