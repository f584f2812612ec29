#include "facetcvt/adaptive_clipper.hpp"

#include <cmath>
#include <limits>

namespace facetcvt {

bool ClipDecision::valid() const {
  switch (level) {
    case 1: return f_t != kNoFace && f_u == kNoFace && f_v == kNoFace;
    case 2: return f_t != kNoFace && f_u != kNoFace && f_v == kNoFace && f_u != f_t;
    case 3:
      return f_t != kNoFace && f_u != kNoFace && f_v != kNoFace && f_u != f_t && f_v != f_t && f_v != f_u;
    default: return false;
  }
}

double ClippedFacets::total_area() const {
  double sum = 0.0;
  for (double a : areas) sum += a;
  return sum;
}

NeighborFacetSet build_fnear(const TriangleMesh& mesh, FaceId host, double d_max) {
  if (!(d_max > 0.0)) throw InvalidArgument("build_fnear: d_max must be positive");
  NeighborFacetSet out;
  out.d_max = d_max;
  const Vec3 c = mesh.face_centroid(host);
  const double limit = 2.0 * d_max;
  for (FaceId f : face_ring(mesh, host, 2)) {
    if ((mesh.face_centroid(f) - c).norm() <= limit) out.facets.push_back(f);
  }
  return out;
}

double abs_normal_cosine(const TriangleMesh& mesh, FaceId a, FaceId b) {
  return std::abs(mesh.face_normal(a).dot(mesh.face_normal(b)));
}

double score_a(const TriangleMesh& mesh, FaceId host, FaceId candidate, double d_max) {
  const double dis = (mesh.face_centroid(candidate) - mesh.face_centroid(host)).norm();
  return abs_normal_cosine(mesh, candidate, host) + dis / d_max;
}

double score_b_candidate_part(const TriangleMesh& mesh, FaceId host, FaceId second, FaceId candidate, double d_max) {
  const Vec3 c = mesh.face_centroid(candidate);
  const double dis_b = (c - mesh.face_centroid(host)).norm();
  const double dis_c = (c - mesh.face_centroid(second)).norm();
  return abs_normal_cosine(mesh, candidate, host) + dis_b / d_max + abs_normal_cosine(mesh, candidate, second) +
         dis_c / d_max;
}

FaceId select_second_facet(const TriangleMesh& mesh, const NeighborFacetSet& fnear, FaceId host, double alpha,
                           double d_max) {
  FaceId best = kNoFace;
  double best_score = std::numeric_limits<double>::infinity();
  for (FaceId f : fnear.facets) {
    if (f == host || !(abs_normal_cosine(mesh, f, host) < alpha)) continue;
    const double s = score_a(mesh, host, f, d_max);
    if (s < best_score || (s == best_score && f < best)) {
      best = f;
      best_score = s;
    }
  }
  if (best == kNoFace) throw InvalidArgument("select_second_facet: no facet below alpha");
  return best;
}

FaceId select_third_facet(const TriangleMesh& mesh, const NeighborFacetSet& fnear, FaceId host, FaceId second,
                          double beta, double d_max) {
  FaceId best = kNoFace;
  double best_score = std::numeric_limits<double>::infinity();
  for (FaceId f : fnear.facets) {
    if (f == host || f == second) continue;
    if (!(abs_normal_cosine(mesh, f, host) < beta) || !(abs_normal_cosine(mesh, f, second) < beta)) continue;
    const double s = score_b_candidate_part(mesh, host, second, f, d_max);
    if (s < best_score || (s == best_score && f < best)) {
      best = f;
      best_score = s;
    }
  }
  if (best == kNoFace) throw InvalidArgument("select_third_facet: no facet below beta against both planes");
  return best;
}

ClipDecision curvature_level(const TriangleMesh& mesh, const NeighborFacetSet& fnear, FaceId host, double alpha,
                             double beta, int max_clips) {
  ClipDecision d;
  d.f_t = host;
  if (max_clips < 2) return d;

  bool curved = false;
  for (FaceId f : fnear.facets) {
    if (abs_normal_cosine(mesh, f, host) < alpha) {
      curved = true;
      break;
    }
  }
  if (!curved) return d;

  d.level = 2;
  d.f_u = select_second_facet(mesh, fnear, host, alpha, fnear.d_max);
  d.score_u = score_a(mesh, host, d.f_u, fnear.d_max);
  if (max_clips < 3) return d;

  for (FaceId f : fnear.facets) {
    if (abs_normal_cosine(mesh, f, host) < beta && abs_normal_cosine(mesh, f, d.f_u) < beta) {
      d.level = 3;
      d.f_v = select_third_facet(mesh, fnear, host, d.f_u, beta, fnear.d_max);
      d.score_v = d.score_u + score_b_candidate_part(mesh, host, d.f_u, d.f_v, fnear.d_max);
      break;
    }
  }
  return d;
}

namespace {

void collect(const ConvexCell& cell, FaceId f, double min_area, ClippedFacets& out) {
  const ConvexCell::Face* face = cell.find_face(PlaneTag::facet(f));
  if (face == nullptr) return;
  std::vector<Vec3> poly;
  for (std::int32_t v : cell.loop(*face)) poly.push_back(cell.vertices()[static_cast<std::size_t>(v)]);
  const PolygonMoments mom = polygon_moments(poly);
  if (!(mom.area >= min_area)) return;
  out.polygons.push_back(std::move(poly));
  out.facets.push_back(f);
  out.areas.push_back(mom.area);
  out.centroids.push_back(mom.centroid);
}

}  // namespace

ClipOutcome clip_cell_by_facets(const ConvexCell& cell, const ClipDecision& decision, const TriangleMesh& mesh) {
  const double diag = mesh.bbox_diag();
  const double min_area = 1e-12 * diag * diag;
  ClipOutcome out;

  ConvexCell host_only = cell;
  host_only.clip(facet_half_space(mesh, decision.f_t));
  if (host_only.empty()) {
    out.status = ClipStatus::EmptyAfterHost;
    out.applied_level = 0;
    return out;
  }

  if (decision.level >= 2) {
    ConvexCell multi = host_only;
    multi.clip(facet_half_space(mesh, decision.f_u));
    if (decision.level >= 3 && !multi.empty()) multi.clip(facet_half_space(mesh, decision.f_v));
    if (!multi.empty()) {
      collect(multi, decision.f_t, min_area, out.facets);
      if (!out.facets.polygons.empty()) {
        collect(multi, decision.f_u, min_area, out.facets);
        if (decision.level >= 3) collect(multi, decision.f_v, min_area, out.facets);
        out.applied_level = decision.level;
        return out;
      }
    }
    out.facets = {};
    out.status = ClipStatus::FellBackToLevel1;
  }

  collect(host_only, decision.f_t, min_area, out.facets);
  out.applied_level = 1;
  if (out.facets.polygons.empty()) out.status = ClipStatus::NoCrossSection;
  return out;
}

}  // namespace facetcvt
