#include "facetcvt/cvt_engine.hpp"
#include "facetcvt/primitives.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace facetcvt;

namespace {

ClippedFacets from_polygons(const std::vector<std::vector<Vec3>>& polys) {
  ClippedFacets cf;
  for (const auto& p : polys) {
    const PolygonMoments pm = polygon_moments(p);
    cf.polygons.push_back(p);
    cf.facets.push_back(0);
    cf.areas.push_back(pm.area);
    cf.centroids.push_back(pm.centroid);
  }
  return cf;
}

Config small_config(std::size_t n) {
  Config cfg;
  cfg.n = n;
  cfg.max_iterations = 20;
  cfg.threads = 1;
  return cfg;
}

}  // namespace

TEST(CentroidOfClipped, SingleSquare) {
  const ClippedFacets cf = from_polygons({{Vec3(0, 0, 0), Vec3(2, 0, 0), Vec3(2, 2, 0), Vec3(0, 2, 0)}});
  EXPECT_TRUE(centroid_of_clipped(cf).isApprox(Vec3(1, 1, 0), 1e-15));
}

TEST(CentroidOfClipped, AreaWeightedAcrossPlanes) {
  // Unit square on z = 0 and a 1 x 2 rectangle on x = 1.
  const ClippedFacets cf = from_polygons({{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)},
                                          {Vec3(1, 0, 0), Vec3(1, 0, 2), Vec3(1, 1, 2), Vec3(1, 1, 0)}});
  const Vec3 want = (1.0 * Vec3(0.5, 0.5, 0) + 2.0 * Vec3(1, 0.5, 1)) / 3.0;
  EXPECT_TRUE(centroid_of_clipped(cf).isApprox(want, 1e-14));
}

TEST(CentroidOfClipped, MatchesMonteCarlo) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<Vec3>> polys;
    for (int j = 0; j < 3; ++j) {
      const Vec3 c(U(rng), U(rng), U(rng));
      const Vec3 n = oracle::random_unit(rng);
      const Vec3 t1 = n.unitOrthogonal();
      const Vec3 t2 = n.cross(t1);
      const double r = 0.2 + 0.6 * std::abs(U(rng));
      const double phase = U(rng);
      const int sides = 3 + trial % 4;
      std::vector<Vec3> poly;
      for (int k = 0; k < sides; ++k) {
        const double a = phase + 2.0 * 3.14159265358979323846 * k / sides;
        poly.push_back(c + r * (std::cos(a) * t1 + std::sin(a) * t2));
      }
      polys.push_back(poly);
    }
    const Vec3 got = centroid_of_clipped(from_polygons(polys));
    const Vec3 mc = oracle::monte_carlo_centroid(polys, 400000, rng);
    EXPECT_LT((got - mc).norm(), 1e-2);
  }
}

TEST(CentroidOfClipped, ZeroAreaThrows) {
  EXPECT_THROW((void)centroid_of_clipped(ClippedFacets{}), InvalidArgument);
}

TEST(ProjectToSurface, PointOnSurfaceIsFixed) {
  const TriangleMesh m = icosphere(2);
  const PointIndex idx(std::vector<Vec3>(m.vertices().begin(), m.vertices().end()));
  const SiteSet s = sample_uniform(m, 200, 1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Projection p = project_to_surface(s.positions[i], m, idx, 8);
    EXPECT_LT(p.distance, 1e-12);
    EXPECT_LT((p.point - s.positions[i]).norm(), 1e-12);
  }
}

TEST(ProjectToSurface, PerpendicularFoot) {
  const TriangleMesh m = flat_grid(4, 4);
  const PointIndex idx(std::vector<Vec3>(m.vertices().begin(), m.vertices().end()));
  const Projection p = project_to_surface(Vec3(0.3, 0.6, 0.25), m, idx, 8);
  EXPECT_TRUE(p.point.isApprox(Vec3(0.3, 0.6, 0.0), 1e-15));
  EXPECT_NEAR(p.distance, 0.25, 1e-15);
}

TEST(ProjectToSurface, AgreesWithAllFacesNearTheSurface) {
  const TriangleMesh m = oracle::bumpy_sphere(3, 0.1, 21);
  const PointIndex idx(std::vector<Vec3>(m.vertices().begin(), m.vertices().end()));
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> U(-0.03, 0.03);
  const SiteSet s = sample_uniform(m, 2000, 2);
  std::size_t misses = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Vec3 q = s.positions[i] + m.bbox_diag() * Vec3(U(rng), U(rng), U(rng));
    const double want = oracle::all_faces_distance(m, q);
    const Projection p = project_to_surface(q, m, idx, 8);
    if (p.distance > want + 1e-12) ++misses;
    EXPECT_GE(p.distance, want - 1e-12);
  }
  EXPECT_EQ(misses, 0u);
}

TEST(LloydIterate, SymmetricConfigurationIsAFixedPoint) {
  const TriangleMesh m = cube(3);
  SiteSet s;
  for (int axis = 0; axis < 3; ++axis) {
    for (double sign : {-1.0, 1.0}) {
      Vec3 p = Vec3::Zero();
      p[axis] = sign;
      FaceId f = kNoFace;
      oracle::all_faces_distance(m, p, &f);
      s.positions.push_back(p);
      s.host_facet.push_back(f);
    }
  }
  Config cfg = small_config(6);
  const auto [next, stats] = lloyd_iterate(s, m, cfg);
  EXPECT_LT(stats.delta, 1e-12);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_LT((next.positions[i] - s.positions[i]).norm(), 1e-12);
}

TEST(LloydIterate, FlatGridIsAllLevelOneAndStaysInPlane) {
  const TriangleMesh m = flat_grid(10, 10);
  const SiteSet s = sample_uniform(m, 50, 4);
  const auto [next, stats] = lloyd_iterate(s, m, small_config(50));
  EXPECT_EQ(stats.level_counts[0], 50u);
  EXPECT_EQ(stats.level_counts[1] + stats.level_counts[2], 0u);
  for (const Vec3& p : next.positions) EXPECT_EQ(p.z(), 0.0);
}

TEST(LloydIterate, DiagnosticsPerSite) {
  const TriangleMesh m = cube(6);
  const SiteSet s = sample_uniform(m, 120, 4);
  Config cfg = small_config(120);
  const RemeshContext ctx(m, cfg);
  std::vector<SiteDiagnostics> diag;
  const auto [next, stats] = lloyd_iterate(s, ctx, &diag);
  ASSERT_EQ(diag.size(), 120u);
  std::array<std::size_t, 3> counts{};
  for (const SiteDiagnostics& d : diag) {
    EXPECT_TRUE(d.decision.valid());
    ++counts[static_cast<std::size_t>(d.decision.level - 1)];
  }
  EXPECT_EQ(counts, stats.level_counts);
  EXPECT_GT(stats.level_counts[1] + stats.level_counts[2], 0u);
}

TEST(RunRemesh, SitesStayOnTheSurfaceAndSettle) {
  const TriangleMesh m = icosphere(3);
  Config cfg = small_config(100);
  cfg.max_iterations = 40;
  const RemeshResult r = run_remesh(m, cfg);
  ASSERT_FALSE(r.trace.empty());
  for (std::size_t i = 0; i < r.sites.size(); ++i) {
    const Vec3& p = r.sites.positions[i];
    EXPECT_LT(oracle::all_faces_distance(m, p), 1e-12);
    EXPECT_TRUE(site_on_host_facet(m, p, r.sites.host_facet[i], 1e-9));
  }
  EXPECT_LT(r.trace.back().delta, r.trace.front().delta);
  EXPECT_EQ(r.trace.back().unsecured, 0u);
}

TEST(RunRemesh, HugeEpsilonStopsAfterOneStep) {
  Config cfg = small_config(50);
  cfg.epsilon = 1e9;
  EXPECT_EQ(run_remesh(icosphere(2), cfg).trace.size(), 1u);
}

TEST(RunRemesh, ZeroIterationsReturnsTheSample) {
  Config cfg = small_config(50);
  cfg.max_iterations = 0;
  const TriangleMesh m = icosphere(2);
  const RemeshResult r = run_remesh(m, cfg);
  EXPECT_TRUE(r.trace.empty());
  EXPECT_EQ(r.sites.positions, sample_uniform(m, 50, cfg.seed).positions);
}

TEST(RunRemesh, IdenticalAcrossThreadCounts) {
  const TriangleMesh m = rounded_cube(8);
  Config cfg = small_config(300);
  cfg.max_iterations = 5;
  const RemeshResult a = run_remesh(m, cfg);
  cfg.threads = 4;
  const RemeshResult b = run_remesh(m, cfg);
  EXPECT_EQ(a.sites.positions, b.sites.positions);
  EXPECT_EQ(a.sites.host_facet, b.sites.host_facet);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) EXPECT_EQ(a.trace[i].delta, b.trace[i].delta);
}

TEST(RunRemesh, MaxClipsOneForcesLevelOne) {
  Config cfg = small_config(200);
  cfg.max_clips = 1;
  cfg.max_iterations = 3;
  for (const IterationStats& st : run_remesh(cube(6), cfg).trace) {
    EXPECT_EQ(st.level_counts[0], 200u);
  }
}

TEST(Config, Validate) {
  Config ok;
  EXPECT_NO_THROW(ok.validate());
  auto bad = [](auto mutate) {
    Config c;
    mutate(c);
    EXPECT_THROW(c.validate(), InvalidArgument);
  };
  bad([](Config& c) { c.n = 3; });
  bad([](Config& c) { c.alpha = 1.5; });
  bad([](Config& c) { c.alpha = -0.1; });
  bad([](Config& c) { c.beta = 0.0; });
  bad([](Config& c) { c.max_clips = 0; });
  bad([](Config& c) { c.max_clips = 4; });
  bad([](Config& c) { c.knn = 0; });
  bad([](Config& c) { c.k_proj = 0; });
  bad([](Config& c) { c.epsilon = -1.0; });
  bad([](Config& c) { c.padding = 0.0; });
}
