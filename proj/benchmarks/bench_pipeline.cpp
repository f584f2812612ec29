#include "facetcvt/cvt_engine.hpp"
#include "facetcvt/extractor.hpp"
#include "facetcvt/metrics.hpp"
#include "facetcvt/primitives.hpp"

#include <benchmark/benchmark.h>

using namespace facetcvt;

namespace {

void BM_LloydIterate(benchmark::State& state) {
  const TriangleMesh mesh = icosphere(4);
  Config cfg;
  cfg.n = static_cast<std::size_t>(state.range(0));
  cfg.threads = static_cast<unsigned>(state.range(1));
  const RemeshContext ctx(mesh, cfg);
  const SiteSet sites = sample_uniform(mesh, cfg.n, cfg.seed);
  for (auto _ : state) {
    auto step = lloyd_iterate(sites, ctx);
    benchmark::DoNotOptimize(step.second.delta);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LloydIterate)->Args({1000, 1})->Args({1000, 0})->Args({10000, 0})->Unit(benchmark::kMillisecond);

void BM_RestrictedVoronoi(benchmark::State& state) {
  const TriangleMesh mesh = rounded_cube(20);
  const SiteSet sites = sample_uniform(mesh, static_cast<std::size_t>(state.range(0)), 7);
  const PointIndex index(sites.positions);
  for (auto _ : state) {
    const RestrictedVoronoiDiagram rvd = compute_rvd(mesh, sites, index, 24, 1);
    benchmark::DoNotOptimize(rvd.facets.data());
  }
}
BENCHMARK(BM_RestrictedVoronoi)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_DualTriangulate(benchmark::State& state) {
  const TriangleMesh mesh = rounded_cube(20);
  const SiteSet sites = sample_uniform(mesh, 2000, 8);
  const RestrictedVoronoiDiagram rvd = compute_rvd(mesh, sites, PointIndex(sites.positions), 24, 1);
  for (auto _ : state) {
    TriangleMesh out = dual_triangulate(rvd, sites);
    benchmark::DoNotOptimize(out.face_count());
  }
}
BENCHMARK(BM_DualTriangulate)->Unit(benchmark::kMillisecond);

void BM_SurfaceDistance(benchmark::State& state) {
  const TriangleMesh a = icosphere(5);
  const TriangleMesh b = icosphere(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(surface_distance(a, b, static_cast<std::size_t>(state.range(0)), 42, 1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 2);
}
BENCHMARK(BM_SurfaceDistance)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
