#include "facetcvt/convex_cell.hpp"
#include "facetcvt/primitives.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace facetcvt;

namespace {

constexpr double kEps = 1e-12;

ConvexCell unit_cube() { return ConvexCell::box(Vec3::Zero(), Vec3::Ones(), kEps); }

HalfSpace plane(const Vec3& n, double d, PlaneTag tag = PlaneTag::bisector(0)) {
  HalfSpace h;
  h.normal = n.normalized();
  h.offset = d / n.norm();
  h.tag = tag;
  return h;
}

std::vector<Vec3> verts(const ConvexCell& c) { return {c.vertices().begin(), c.vertices().end()}; }

std::vector<HalfSpace> box_planes(const Vec3& lo, const Vec3& hi) {
  return {plane(-Vec3::UnitX(), -lo.x()), plane(Vec3::UnitX(), hi.x()), plane(-Vec3::UnitY(), -lo.y()),
          plane(Vec3::UnitY(), hi.y()),  plane(-Vec3::UnitZ(), -lo.z()), plane(Vec3::UnitZ(), hi.z())};
}

double polygon_area(const std::vector<Vec3>& p) { return polygon_moments(p).area; }

}  // namespace

TEST(ConvexCell, BoxIsValid) {
  const ConvexCell c = unit_cube();
  const CellCheck chk = c.check();
  EXPECT_TRUE(chk.ok());
  EXPECT_EQ(chk.vertex_count, 8u);
  EXPECT_EQ(chk.edge_count, 12u);
  EXPECT_EQ(chk.face_count, 6u);
  EXPECT_NEAR(c.volume(), 1.0, 1e-14);
  EXPECT_EQ(c.provenance().size(), 6u);
}

TEST(ConvexCell, InitBoundingCellOfUnitCube) {
  const TriangleMesh cube = TriangleMesh::build(
      {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0, 0, 1}, {1, 0, 1}, {0, 1, 1}, {1, 1, 1}},
      {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4}, {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6},
       {1, 3, 5}, {3, 7, 5}});
  const ConvexCell c = init_bounding_cell(cube);
  const double pad = 0.05 * std::sqrt(3.0);
  EXPECT_NEAR(pad, 0.0866, 1e-4);
  for (const Vec3& v : c.vertices()) {
    for (int a = 0; a < 3; ++a) {
      EXPECT_TRUE(std::abs(v[a] + pad) < 1e-12 || std::abs(v[a] - 1.0 - pad) < 1e-12);
    }
  }
  EXPECT_NEAR(c.eps(), 1e-9 * std::sqrt(3.0), 1e-20);
  const CellCheck chk = c.check();
  EXPECT_TRUE(chk.ok());
  EXPECT_EQ(static_cast<long>(chk.vertex_count) - static_cast<long>(chk.edge_count) +
                static_cast<long>(chk.face_count),
            2);
  for (const Vec3& p : cube.vertices()) {
    for (const HalfSpace& h : c.provenance()) EXPECT_LT(h.signed_distance(p), 0.0);
  }
}

TEST(ConvexCell, HalfCube) {
  ConvexCell c = unit_cube();
  const HalfSpace h = plane(Vec3::UnitX(), 0.5, PlaneTag::bisector(7));
  EXPECT_TRUE(c.clip(h));
  EXPECT_NEAR(c.volume(), 0.5, 1e-14);
  EXPECT_TRUE(c.check().ok());
  const auto face = c.face_on_plane(PlaneTag::bisector(7));
  ASSERT_TRUE(face.has_value());
  EXPECT_EQ(face->size(), 4u);
  EXPECT_NEAR(polygon_area(*face), 1.0, 1e-14);
  for (const Vec3& p : *face) EXPECT_NEAR(p.x(), 0.5, 1e-15);
}

TEST(ConvexCell, KeptSideClipIsIdentity) {
  ConvexCell c = unit_cube();
  EXPECT_FALSE(c.clip(plane(Vec3::UnitX(), 2.0)));
  EXPECT_EQ(verts(c), verts(unit_cube()));
  EXPECT_EQ(c.faces().size(), 6u);
  // The plane is recorded but produced no face.
  EXPECT_FALSE(c.face_on_plane(PlaneTag::bisector(0)).has_value());
}

TEST(ConvexCell, EverythingRemovedIsEmpty) {
  ConvexCell c = unit_cube();
  c.clip(plane(Vec3::UnitX(), -1.0));
  EXPECT_TRUE(c.empty());
  EXPECT_EQ(c.volume(), 0.0);
}

TEST(ConvexCell, FaceCutAwayLaterIsNone) {
  ConvexCell c = unit_cube();
  c.clip(plane(Vec3::UnitX(), 0.8, PlaneTag::bisector(1)));
  ASSERT_TRUE(c.face_on_plane(PlaneTag::bisector(1)).has_value());
  c.clip(plane(Vec3::UnitX(), 0.5, PlaneTag::bisector(2)));
  EXPECT_FALSE(c.face_on_plane(PlaneTag::bisector(1)).has_value());
  EXPECT_THROW((void)c.face_on_plane(PlaneTag::bisector(3)), InvalidArgument);
}

TEST(ConvexCell, TangentCutAtVertexIsIdentity) {
  ConvexCell c = unit_cube();
  // Touches only the corner (1,1,1).
  EXPECT_FALSE(c.clip(plane(Vec3(1, 1, 1), 3.0)));
  EXPECT_EQ(c.faces().size(), 6u);
  EXPECT_TRUE(c.check().ok());
}

TEST(ConvexCell, CutThroughAnEdgeAndVertices) {
  ConvexCell c = unit_cube();
  // Diagonal plane x + y <= 1 passes through two vertical edges exactly.
  c.clip(plane(Vec3(1, 1, 0), 1.0, PlaneTag::bisector(4)));
  EXPECT_NEAR(c.volume(), 0.5, 1e-14);
  EXPECT_TRUE(c.check().ok());
  const auto face = c.face_on_plane(PlaneTag::bisector(4));
  ASSERT_TRUE(face.has_value());
  EXPECT_NEAR(polygon_area(*face), std::sqrt(2.0), 1e-14);
}

TEST(Bisector, PlaneXEqualsOne) {
  const HalfSpace h = bisector(Vec3(0, 0, 0), Vec3(2, 0, 0), 5);
  EXPECT_EQ(h.normal, Vec3(1, 0, 0));
  EXPECT_DOUBLE_EQ(h.offset, 1.0);
  EXPECT_EQ(h.tag, PlaneTag::bisector(5));
  EXPECT_THROW((void)bisector(Vec3(1, 1, 1), Vec3(1, 1, 1), 0), InvalidArgument);
}

TEST(Bisector, KeptSideAgreesWithDistances) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-3, 3);
  for (int t = 0; t < 5000; ++t) {
    const Vec3 a(U(rng), U(rng), U(rng));
    const Vec3 b(U(rng), U(rng), U(rng));
    const Vec3 x(U(rng), U(rng), U(rng));
    const HalfSpace h = bisector(a, b, 0);
    EXPECT_NEAR(h.normal.norm(), 1.0, 1e-12);
    EXPECT_NEAR(h.signed_distance(0.5 * (a + b)), 0.0, 1e-12);
    const double margin = (x - a).norm() - (x - b).norm();
    if (std::abs(margin) < 1e-9) continue;
    EXPECT_EQ(h.signed_distance(x) <= 0.0, margin < 0.0);
  }
}

TEST(ConvexCell, MatchesTripleIntersectionEnumeration) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    const auto hs = oracle::random_half_spaces(20, 0.3, 1.0, rng);
    ConvexCell c = ConvexCell::box(Vec3::Constant(-2), Vec3::Constant(2), kEps);
    for (const HalfSpace& h : hs) c.clip(h);
    std::vector<HalfSpace> all = box_planes(Vec3::Constant(-2), Vec3::Constant(2));
    all.insert(all.end(), hs.begin(), hs.end());
    const auto want = oracle::enumerate_vertices(all, 1e-9);
    EXPECT_TRUE(oracle::same_point_sets(verts(c), want, 1e-7)) << "trial " << t;
    EXPECT_TRUE(c.check().ok());
  }
}

TEST(ConvexCell, ClipOrderDoesNotMatter) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 300; ++t) {
    std::uniform_int_distribution<int> count(1, 12);
    auto hs = oracle::random_half_spaces(static_cast<std::size_t>(count(rng)), 0.2, 1.2, rng);
    ConvexCell a = unit_cube();
    ConvexCell b = unit_cube();
    for (HalfSpace& h : hs) h.offset += h.normal.dot(Vec3::Constant(0.5));
    for (const HalfSpace& h : hs) a.clip(h);
    std::shuffle(hs.begin(), hs.end(), rng);
    for (const HalfSpace& h : hs) b.clip(h);
    ASSERT_EQ(a.empty(), b.empty());
    EXPECT_TRUE(oracle::same_point_sets(verts(a), verts(b), 1e-7)) << "trial " << t;
  }
}

TEST(ConvexCell, FuzzedClipsKeepInvariants) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-0.2, 1.2);
  std::size_t failures = 0;
  for (int t = 0; t < 10000; ++t) {
    ConvexCell c = unit_cube();
    const int n = 1 + t % 8;
    for (int k = 0; k < n && !c.empty(); ++k) {
      const Vec3 p(U(rng), U(rng), U(rng));
      HalfSpace h;
      h.normal = oracle::random_unit(rng);
      h.offset = h.normal.dot(p);
      h.tag = PlaneTag::bisector(k);
      const double before = c.volume();
      const bool removed = c.clip(h);
      const double after = c.volume();
      if (after > before + 1e-12) ++failures;
      if (!removed && std::abs(after - before) > 1e-12) ++failures;
      if (!c.empty() && !c.check().ok()) ++failures;
      ConvexCell again = c;
      if (again.clip(h) || !oracle::same_point_sets(verts(again), verts(c), 1e-9)) ++failures;
    }
  }
  EXPECT_EQ(failures, 0u);
}

TEST(ConvexCell, FaceAreaMatchesHullOracle) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 300; ++t) {
    ConvexCell c = ConvexCell::box(Vec3::Constant(-2), Vec3::Constant(2), kEps);
    for (const HalfSpace& h : oracle::random_half_spaces(10, 0.4, 1.2, rng)) c.clip(h);
    HalfSpace cut;
    cut.normal = oracle::random_unit(rng);
    cut.offset = 0.2;
    cut.tag = PlaneTag::facet(3);
    const ConvexCell before = c;
    c.clip(cut);
    const double want = oracle::section_area(before, cut);
    const auto face = c.face_on_plane(PlaneTag::facet(3));
    const double got = face ? polygon_area(*face) : 0.0;
    EXPECT_NEAR(got, want, 1e-9) << "trial " << t;
    if (face) {
      for (const Vec3& p : *face) EXPECT_NEAR(cut.signed_distance(p), 0.0, 1e-9);
    }
  }
}

TEST(VoronoiCell, SingleSiteIsTheBox) {
  const std::vector<Vec3> sites{Vec3(0.5, 0.5, 0.5)};
  const PointIndex idx(sites);
  const ConvexCell box = unit_cube();
  const VoronoiCell vc = compute_voronoi_cell(0, sites, idx, 24, box);
  EXPECT_TRUE(vc.secured);
  EXPECT_EQ(vc.neighbors_used, 0u);
  EXPECT_NEAR(vc.cell.volume(), 1.0, 1e-14);
}

TEST(VoronoiCell, TwoSitesHalveTheBox) {
  const std::vector<Vec3> sites{Vec3(0.25, 0.5, 0.5), Vec3(0.75, 0.5, 0.5)};
  const PointIndex idx(sites);
  for (SiteId i = 0; i < 2; ++i) {
    const VoronoiCell vc = compute_voronoi_cell(i, sites, idx, 24, unit_cube());
    EXPECT_NEAR(vc.cell.volume(), 0.5, 1e-14);
    EXPECT_TRUE(vc.secured);
  }
}

TEST(VoronoiCell, MatchesAllPairsCell) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(0, 1);
  std::vector<Vec3> sites(200);
  for (Vec3& s : sites) s = Vec3(U(rng), U(rng), U(rng));
  const PointIndex idx(sites);
  const ConvexCell box = unit_cube();
  std::size_t secured = 0;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const VoronoiCell vc = compute_voronoi_cell(static_cast<SiteId>(i), sites, idx, 24, box);
    const ConvexCell ref = oracle::all_pairs_cell(i, sites, box);
    if (vc.secured) {
      ++secured;
      EXPECT_TRUE(oracle::same_point_sets(verts(vc.cell), verts(ref), 1e-7)) << "site " << i;
    }
    // The cell always contains its site.
    for (const HalfSpace& h : vc.cell.provenance()) EXPECT_LE(h.signed_distance(sites[i]), 1e-12);
  }
  EXPECT_GT(secured, 0u);
  // With every other site available each cell is secured and exact.
  for (std::size_t i = 0; i < sites.size(); i += 7) {
    const VoronoiCell vc = compute_voronoi_cell(static_cast<SiteId>(i), sites, idx, sites.size() - 1, box);
    EXPECT_TRUE(vc.secured);
    EXPECT_TRUE(oracle::same_point_sets(verts(vc.cell), verts(oracle::all_pairs_cell(i, sites, box)), 1e-7));
  }
}

TEST(VoronoiCell, SecuredCellCannotBeCutByFartherSites) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> U(0, 1);
  std::vector<Vec3> sites(400);
  for (Vec3& s : sites) s = Vec3(U(rng), U(rng), U(rng));
  const PointIndex idx(sites);
  for (std::size_t i = 0; i < sites.size(); i += 5) {
    const VoronoiCell vc = compute_voronoi_cell(static_cast<SiteId>(i), sites, idx, 60, unit_cube());
    if (!vc.secured) continue;
    const double R = vc.cell.max_distance_from(sites[i]);
    EXPECT_GE(vc.next_distance, 2.0 * R);
  }
}

TEST(PolygonMoments, SquareAndTriangle) {
  const std::vector<Vec3> sq{{0, 0, 0}, {2, 0, 0}, {2, 2, 0}, {0, 2, 0}};
  const PolygonMoments m = polygon_moments(sq);
  EXPECT_DOUBLE_EQ(m.area, 4.0);
  EXPECT_NEAR((m.centroid - Vec3(1, 1, 0)).norm(), 0.0, 1e-15);
  const std::vector<Vec3> tri{{0, 0, 0}, {3, 0, 0}, {0, 3, 0}};
  EXPECT_NEAR((polygon_moments(tri).centroid - Vec3(1, 1, 0)).norm(), 0.0, 1e-15);
}
