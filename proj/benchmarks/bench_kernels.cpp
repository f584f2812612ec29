#include "facetcvt/adaptive_clipper.hpp"
#include "facetcvt/convex_cell.hpp"
#include "facetcvt/primitives.hpp"
#include "facetcvt/spatial_index.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace facetcvt;

namespace {

std::vector<Vec3> random_points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<Vec3> pts(n);
  for (Vec3& p : pts) p = Vec3(U(rng), U(rng), U(rng));
  return pts;
}

std::vector<HalfSpace> random_planes(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_real_distribution<double> U(0.2, 0.9);
  std::vector<HalfSpace> planes(n);
  for (std::size_t i = 0; i < n; ++i) {
    planes[i].normal = Vec3(N(rng), N(rng), N(rng)).normalized();
    planes[i].offset = U(rng);
    planes[i].tag = PlaneTag::bisector(static_cast<SiteId>(i));
  }
  return planes;
}

void BM_ClipSequence(benchmark::State& state) {
  const auto planes = random_planes(static_cast<std::size_t>(state.range(0)), 1);
  const ConvexCell box = ConvexCell::box(Vec3::Constant(-1), Vec3::Constant(1), 1e-12);
  for (auto _ : state) {
    ConvexCell cell = box;
    for (const HalfSpace& h : planes) cell.clip(h);
    benchmark::DoNotOptimize(cell.vertices().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ClipSequence)->Arg(8)->Arg(24)->Arg(48);

void BM_KnnQuery(benchmark::State& state) {
  const auto pts = random_points(static_cast<std::size_t>(state.range(0)), 2);
  const PointIndex index(pts);
  const auto queries = random_points(1024, 3);
  std::vector<Neighbor> out;
  std::size_t q = 0;
  for (auto _ : state) {
    index.knn(queries[q++ & 1023], 24, std::nullopt, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_KnnQuery)->Arg(1000)->Arg(100000);

void BM_IndexBuild(benchmark::State& state) {
  const auto pts = random_points(static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state) {
    PointIndex index(pts);
    benchmark::DoNotOptimize(index.size());
  }
}
BENCHMARK(BM_IndexBuild)->Arg(1000)->Arg(100000);

void BM_VoronoiCell(benchmark::State& state) {
  const auto pts = random_points(static_cast<std::size_t>(state.range(0)), 5);
  const PointIndex index(pts);
  const ConvexCell box = ConvexCell::box(Vec3::Zero(), Vec3::Ones(), 1e-9);
  SiteId i = 0;
  for (auto _ : state) {
    VoronoiCell vc = compute_voronoi_cell(i, pts, index, 24, box);
    benchmark::DoNotOptimize(vc.cell.vertices().data());
    i = (i + 1) % static_cast<SiteId>(pts.size());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_VoronoiCell)->Arg(1000)->Arg(20000);

void BM_CurvatureLevel(benchmark::State& state) {
  const TriangleMesh mesh = rounded_cube(20);
  FaceId f = 0;
  for (auto _ : state) {
    const NeighborFacetSet fn = build_fnear(mesh, f, 0.1);
    benchmark::DoNotOptimize(curvature_level(mesh, fn, f, 0.8, 0.7));
    f = (f + 1) % static_cast<FaceId>(mesh.face_count());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_CurvatureLevel);

}  // namespace

BENCHMARK_MAIN();
