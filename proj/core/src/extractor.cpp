#include "facetcvt/extractor.hpp"

#include "facetcvt/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <unordered_map>

namespace facetcvt {

namespace {

struct EdgeInterval {
  std::uint64_t key;  // (lo vertex << 32) | hi vertex
  double t0;
  double t1;
  SiteId site;
  FaceId facet;
};

std::uint64_t edge_key(VertexId a, VertexId b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

// Pieces' stretches of mesh edges, in the edge parameter t in [0, 1] measured
// from the lower vertex id.
std::vector<EdgeInterval> edge_intervals(const RestrictedVoronoiDiagram& rvd) {
  const TriangleMesh& mesh = *rvd.mesh;
  std::vector<EdgeInterval> intervals;
  for (std::size_t fi = 0; fi < rvd.facets.size(); ++fi) {
    const auto f = static_cast<FaceId>(fi);
    const Triangle& tri = mesh.face(f);
    for (const RvdPiece& piece : rvd.facets[fi]) {
      const std::size_t m = piece.polygon.size();
      for (std::size_t k = 0; k < m; ++k) {
        const RvdEdgeLabel& out = piece.edges[k];
        if (out.kind != RvdEdgeLabel::Kind::FacetEdge) continue;
        const VertexId va = tri[static_cast<std::size_t>(out.id)];
        const VertexId vb = tri[static_cast<std::size_t>((out.id + 1) % 3)];
        const Vec3& lo = mesh.vertex(std::min(va, vb));
        const Vec3 dir = mesh.vertex(std::max(va, vb)) - lo;
        const double inv = 1.0 / dir.squaredNorm();
        const double ta = (piece.polygon[k] - lo).dot(dir) * inv;
        const double tb = (piece.polygon[(k + 1) % m] - lo).dot(dir) * inv;
        intervals.push_back({edge_key(va, vb), std::min(ta, tb), std::max(ta, tb), piece.site, f});
      }
    }
  }
  std::sort(intervals.begin(), intervals.end(), [](const EdgeInterval& a, const EdgeInterval& b) {
    return a.key < b.key || (a.key == b.key && (a.t0 < b.t0 || (a.t0 == b.t0 && a.facet < b.facet)));
  });
  return intervals;
}

constexpr double kParamTol = 1e-9;

}  // namespace

std::vector<std::pair<SiteId, SiteId>> RestrictedVoronoiDiagram::adjacency() const {
  std::vector<std::pair<SiteId, SiteId>> pairs;
  for (const auto& pieces : facets) {
    for (const RvdPiece& p : pieces) {
      for (const RvdEdgeLabel& e : p.edges) {
        if (e.kind == RvdEdgeLabel::Kind::Bisector) {
          pairs.emplace_back(std::min(p.site, e.id), std::max(p.site, e.id));
        }
      }
    }
  }
  // Regions meeting along a mesh edge, seen from the two sides of the edge.
  if (mesh != nullptr) {
    const std::vector<EdgeInterval> intervals = edge_intervals(*this);
    for (std::size_t begin = 0; begin < intervals.size();) {
      std::size_t end = begin;
      while (end < intervals.size() && intervals[end].key == intervals[begin].key) ++end;
      for (std::size_t i = begin; i < end; ++i) {
        for (std::size_t j = i + 1; j < end && intervals[j].t0 < intervals[i].t1 - kParamTol; ++j) {
          const EdgeInterval& a = intervals[i];
          const EdgeInterval& b = intervals[j];
          if (a.facet == b.facet || a.site == b.site) continue;
          if (std::min(a.t1, b.t1) - std::max(a.t0, b.t0) > kParamTol) {
            pairs.emplace_back(std::min(a.site, b.site), std::max(a.site, b.site));
          }
        }
      }
      begin = end;
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

namespace {

// Orthonormal frame in a facet's plane; 2D coordinates are (u, v).
struct FacetFrame {
  Vec3 origin;
  Vec3 e1;
  Vec3 e2;

  [[nodiscard]] Vec2 to2d(const Vec3& p) const { return {(p - origin).dot(e1), (p - origin).dot(e2)}; }
  [[nodiscard]] Vec3 to3d(const Vec2& q) const { return origin + q.x() * e1 + q.y() * e2; }
};

FacetFrame frame_of(const TriangleMesh& mesh, FaceId f) {
  const auto [a, b, c] = mesh.corners(f);
  FacetFrame fr;
  fr.origin = a;
  fr.e1 = (b - a).normalized();
  const Vec3 n = (b - a).cross(c - a).normalized();
  fr.e2 = n.cross(fr.e1);
  return fr;
}

struct Poly2 {
  std::vector<Vec2> pts;
  std::vector<RvdEdgeLabel> edges;
};

// Keeps g(x) = c0 + c . x <= 0; the new edge is labelled `label`.
void clip_polygon(Poly2& poly, double c0, const Vec2& c, RvdEdgeLabel label, Poly2& scratch) {
  const std::size_t m = poly.pts.size();
  thread_local std::vector<double> g;
  g.resize(m);
  bool any_out = false;
  bool any_in = false;
  for (std::size_t k = 0; k < m; ++k) {
    g[k] = c0 + c.dot(poly.pts[k]);
    if (g[k] > 0.0) {
      any_out = true;
    } else {
      any_in = true;
    }
  }
  if (!any_out) return;
  if (!any_in) {
    poly.pts.clear();
    poly.edges.clear();
    return;
  }
  scratch.pts.clear();
  scratch.edges.clear();
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t n = (k + 1) % m;
    const bool in_k = g[k] <= 0.0;
    const bool in_n = g[n] <= 0.0;
    if (in_k) {
      scratch.pts.push_back(poly.pts[k]);
      if (in_n) {
        scratch.edges.push_back(poly.edges[k]);
      } else {
        // Leaving: the remainder of edge k survives up to the crossing, then
        // the clip line runs to the re-entry point.
        scratch.edges.push_back(poly.edges[k]);
        const double t = g[k] / (g[k] - g[n]);
        scratch.pts.push_back(poly.pts[k] + t * (poly.pts[n] - poly.pts[k]));
        scratch.edges.push_back(label);
      }
    } else if (in_n) {
      const double t = g[k] / (g[k] - g[n]);
      scratch.pts.push_back(poly.pts[k] + t * (poly.pts[n] - poly.pts[k]));
      scratch.edges.push_back(poly.edges[k]);
    }
  }
  // Collapse coincident consecutive points (crossings exactly at a vertex).
  poly.pts.clear();
  poly.edges.clear();
  const std::size_t s = scratch.pts.size();
  for (std::size_t k = 0; k < s; ++k) {
    const std::size_t n = (k + 1) % s;
    if (scratch.pts[k] == scratch.pts[n]) continue;
    poly.pts.push_back(scratch.pts[k]);
    poly.edges.push_back(scratch.edges[k]);
  }
  if (poly.pts.size() < 3) {
    poly.pts.clear();
    poly.edges.clear();
  }
}

double area2d(const std::vector<Vec2>& pts) {
  double a = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const Vec2& p = pts[k];
    const Vec2& q = pts[(k + 1) % pts.size()];
    a += p.x() * q.y() - p.y() * q.x();
  }
  return 0.5 * a;
}

// Neighbour lists with on-demand growth for sites whose pieces are not closed
// by their first K neighbours.
class NeighborCache {
 public:
  NeighborCache(const SiteSet& sites, const PointIndex& index, std::size_t K, unsigned threads)
      : sites_(sites), index_(index) {
    const std::size_t n = sites.size();
    const std::size_t k = std::min(K, n - 1);
    lists_.resize(n);
    parallel_for(n, threads, [&](std::size_t i) {
      lists_[i] = index.knn(sites.positions[i], k, static_cast<std::int32_t>(i));
    });
  }

  [[nodiscard]] const std::vector<Neighbor>& base(SiteId i) const { return lists_[static_cast<std::size_t>(i)]; }

  [[nodiscard]] std::vector<Neighbor> grown(SiteId i, std::size_t k) const {
    return index_.knn(sites_.positions[static_cast<std::size_t>(i)], std::min(k, sites_.size() - 1), i);
  }

  [[nodiscard]] std::size_t others() const { return sites_.size() - 1; }

 private:
  const SiteSet& sites_;
  const PointIndex& index_;
  std::vector<std::vector<Neighbor>> lists_;
};

// Clips `poly` (initially the whole facet) to the region of site i.
void cut_piece(SiteId i, const SiteSet& sites, const FacetFrame& frame, const NeighborCache& cache, Poly2& poly,
               Poly2& scratch) {
  const Vec3& s = sites.positions[static_cast<std::size_t>(i)];
  auto radius = [&] {
    double r2 = 0.0;
    for (const Vec2& q : poly.pts) r2 = std::max(r2, (frame.to3d(q) - s).squaredNorm());
    return std::sqrt(r2);
  };
  auto apply = [&](const Neighbor& nb) {
    const Vec3& t = sites.positions[static_cast<std::size_t>(nb.id)];
    const Vec3 d = t - s;
    const Vec3 mid = 0.5 * (s + t);
    clip_polygon(poly, d.dot(frame.origin - mid), Vec2(d.dot(frame.e1), d.dot(frame.e2)),
                 {RvdEdgeLabel::Kind::Bisector, nb.id}, scratch);
  };

  const std::vector<Neighbor>* list = &cache.base(i);
  std::vector<Neighbor> grown;
  std::size_t j = 0;
  for (;;) {
    for (; j < list->size(); ++j) {
      const Neighbor& nb = (*list)[j];
      if (poly.pts.empty() || nb.distance > 2.0 * radius()) return;
      if (nb.distance == 0.0) {
        // Coincident sites: the lower id keeps the region.
        if (nb.id < i) {
          poly.pts.clear();
          return;
        }
        continue;
      }
      apply(nb);
    }
    if (list->size() >= cache.others()) return;
    grown = cache.grown(i, 2 * list->size());
    list = &grown;
  }
}

}  // namespace

RestrictedVoronoiDiagram compute_rvd(const TriangleMesh& mesh, const SiteSet& sites, const PointIndex& index,
                                     std::size_t K, unsigned threads) {
  if (sites.size() == 0) throw InvalidArgument("compute_rvd: no sites");
  RestrictedVoronoiDiagram rvd;
  rvd.mesh = &mesh;
  rvd.site_count = sites.size();
  rvd.facets.resize(mesh.face_count());

  const NeighborCache cache(sites, index, std::max<std::size_t>(K, 1), threads);

  parallel_for(mesh.face_count(), threads, [&](std::size_t fi) {
    const auto f = static_cast<FaceId>(fi);
    const FacetFrame frame = frame_of(mesh, f);
    const auto corners = mesh.corners(f);
    Poly2 facet_poly;
    for (int e = 0; e < 3; ++e) {
      facet_poly.pts.push_back(frame.to2d(corners[static_cast<std::size_t>(e)]));
      facet_poly.edges.push_back({RvdEdgeLabel::Kind::FacetEdge, e});
    }

    std::vector<SiteId> visited;
    std::deque<SiteId> queue;
    const SiteId seed = index.knn(mesh.face_centroid(f), 1).front().id;
    queue.push_back(seed);
    visited.push_back(seed);
    Poly2 poly;
    Poly2 scratch;
    auto& pieces = rvd.facets[fi];
    while (!queue.empty()) {
      const SiteId i = queue.front();
      queue.pop_front();
      poly = facet_poly;
      cut_piece(i, sites, frame, cache, poly, scratch);
      if (poly.pts.empty()) continue;
      const double area = area2d(poly.pts);
      if (!(area > 0.0)) continue;
      RvdPiece piece;
      piece.site = i;
      piece.area = area;
      piece.edges = poly.edges;
      piece.polygon.reserve(poly.pts.size());
      for (const Vec2& q : poly.pts) piece.polygon.push_back(frame.to3d(q));
      for (const RvdEdgeLabel& e : poly.edges) {
        if (e.kind == RvdEdgeLabel::Kind::Bisector && std::find(visited.begin(), visited.end(), e.id) == visited.end()) {
          visited.push_back(e.id);
          queue.push_back(e.id);
        }
      }
      pieces.push_back(std::move(piece));
    }
    if (pieces.empty()) throw Error("facet " + std::to_string(f) + " received no RVD piece");
  });
  return rvd;
}

// ---------------------------------------------------------------------------
// Dual triangulation

namespace {

class TriangleCollector {
 public:
  TriangleCollector(const TriangleMesh& mesh, const SiteSet& sites) : mesh_(mesh), sites_(sites) {}

  void corner(std::vector<SiteId> labels, const Vec3& at, FaceId facet) {
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    if (labels.size() < 3) return;
    const Vec3 n = -mesh_.face_normal(facet);  // counter-clockwise normal
    if (labels.size() == 3) {
      emit(labels[0], labels[1], labels[2], n);
      return;
    }
    ++fan_split_;
    // Cyclic order around the corner, starting from the lowest id.
    const Vec3 e1 = n.unitOrthogonal();
    const Vec3 e2 = n.cross(e1);
    std::vector<std::pair<double, SiteId>> ring;
    for (SiteId s : labels) {
      const Vec3 d = sites_.positions[static_cast<std::size_t>(s)] - at;
      ring.emplace_back(std::atan2(d.dot(e2), d.dot(e1)), s);
    }
    std::sort(ring.begin(), ring.end());
    const auto lowest = std::min_element(ring.begin(), ring.end(), [](auto& a, auto& b) { return a.second < b.second; });
    std::rotate(ring.begin(), lowest, ring.end());
    for (std::size_t k = 1; k + 1 < ring.size(); ++k) emit(ring[0].second, ring[k].second, ring[k + 1].second, n);
  }

  std::vector<std::array<SiteId, 3>> triangles;
  std::size_t fan_split_ = 0;
  std::size_t degenerate_ = 0;

 private:
  void emit(SiteId a, SiteId b, SiteId c, const Vec3& n) {
    std::array<SiteId, 3> key{a, b, c};
    std::sort(key.begin(), key.end());
    if (!seen_.insert(key).second) return;
    const Vec3& pa = sites_.positions[static_cast<std::size_t>(a)];
    const Vec3& pb = sites_.positions[static_cast<std::size_t>(b)];
    const Vec3& pc = sites_.positions[static_cast<std::size_t>(c)];
    const Vec3 cross = (pb - pa).cross(pc - pa);
    const double diag = mesh_.bbox_diag();
    if (0.5 * cross.norm() <= 1e-12 * diag * diag) {
      ++degenerate_;
      return;
    }
    if (cross.dot(n) >= 0.0) {
      triangles.push_back({a, b, c});
    } else {
      triangles.push_back({a, c, b});
    }
  }

  const TriangleMesh& mesh_;
  const SiteSet& sites_;
  std::set<std::array<SiteId, 3>> seen_;
};

}  // namespace

TriangleMesh dual_triangulate(const RestrictedVoronoiDiagram& rvd, const SiteSet& sites, DualStats* stats) {
  if (rvd.mesh == nullptr || rvd.facets.empty()) throw Error("dual_triangulate: empty RVD");
  const TriangleMesh& mesh = *rvd.mesh;
  TriangleCollector collect(mesh, sites);

  std::vector<std::vector<SiteId>> vertex_labels(mesh.vertex_count());
  std::vector<char> has_region(sites.size(), 0);

  for (std::size_t fi = 0; fi < rvd.facets.size(); ++fi) {
    const auto f = static_cast<FaceId>(fi);
    const Triangle& tri = mesh.face(f);
    for (const RvdPiece& piece : rvd.facets[fi]) {
      has_region[static_cast<std::size_t>(piece.site)] = 1;
      const std::size_t m = piece.polygon.size();
      for (std::size_t k = 0; k < m; ++k) {
        const RvdEdgeLabel& in = piece.edges[(k + m - 1) % m];
        const RvdEdgeLabel& out = piece.edges[k];
        using Kind = RvdEdgeLabel::Kind;
        if (in.kind == Kind::Bisector && out.kind == Kind::Bisector) {
          collect.corner({piece.site, in.id, out.id}, piece.polygon[k], f);
        } else if (in.kind == Kind::FacetEdge && out.kind == Kind::FacetEdge) {
          vertex_labels[static_cast<std::size_t>(tri[static_cast<std::size_t>(out.id)])].push_back(piece.site);
        }
      }
    }
  }

  // Region changes along mesh edges, merged from both incident facets.
  const std::vector<EdgeInterval> intervals = edge_intervals(rvd);
  std::vector<SiteId> labels;
  for (std::size_t begin = 0; begin < intervals.size();) {
    std::size_t end = begin;
    while (end < intervals.size() && intervals[end].key == intervals[begin].key) ++end;
    const auto lo_v = static_cast<VertexId>(intervals[begin].key >> 32);
    const auto hi_v = static_cast<VertexId>(intervals[begin].key & 0xffffffffu);
    const Vec3& lo = mesh.vertex(lo_v);
    const Vec3 dir = mesh.vertex(hi_v) - lo;
    std::vector<double> breaks;
    for (std::size_t i = begin; i < end; ++i) {
      for (double t : {intervals[i].t0, intervals[i].t1}) {
        if (t > kParamTol && t < 1.0 - kParamTol) breaks.push_back(t);
      }
    }
    std::sort(breaks.begin(), breaks.end());
    for (double t : breaks) {
      labels.clear();
      for (std::size_t i = begin; i < end; ++i) {
        if (intervals[i].t0 - kParamTol <= t && t <= intervals[i].t1 + kParamTol) labels.push_back(intervals[i].site);
      }
      collect.corner(labels, lo + t * dir, intervals[begin].facet);
    }
    // Endpoints contribute to the mesh-vertex corners.
    for (std::size_t i = begin; i < end; ++i) {
      if (intervals[i].t0 <= kParamTol) vertex_labels[static_cast<std::size_t>(lo_v)].push_back(intervals[i].site);
      if (intervals[i].t1 >= 1.0 - kParamTol) vertex_labels[static_cast<std::size_t>(hi_v)].push_back(intervals[i].site);
    }
    begin = end;
  }

  for (std::size_t v = 0; v < vertex_labels.size(); ++v) {
    if (vertex_labels[v].size() < 3) continue;
    const auto incident = mesh.faces_of_vertex(static_cast<VertexId>(v));
    if (incident.empty()) continue;
    collect.corner(vertex_labels[v], mesh.vertex(static_cast<VertexId>(v)), incident.front());
  }

  // Keep sites that own a region, in ascending id order.
  std::vector<VertexId> remap(sites.size(), -1);
  std::vector<Vec3> vertices;
  for (std::size_t s = 0; s < sites.size(); ++s) {
    if (has_region[s]) {
      remap[s] = static_cast<VertexId>(vertices.size());
      vertices.push_back(sites.positions[s]);
    }
  }
  std::vector<Triangle> faces;
  faces.reserve(collect.triangles.size());
  for (const auto& t : collect.triangles) {
    faces.push_back({remap[static_cast<std::size_t>(t[0])], remap[static_cast<std::size_t>(t[1])],
                     remap[static_cast<std::size_t>(t[2])]});
  }
  if (faces.empty()) throw Error("dual_triangulate: no triangle could be formed");
  TriangleMesh out = TriangleMesh::build(std::move(vertices), std::move(faces));

  if (stats) {
    stats->triangles = out.face_count();
    stats->corners_fan_split = collect.fan_split_;
    stats->degenerate_dropped = collect.degenerate_;
    stats->sites_without_region = sites.size() - out.vertex_count();
    stats->non_manifold_edges = count_non_manifold_edges(out);
  }
  return out;
}

std::size_t count_non_manifold_edges(const TriangleMesh& mesh) {
  std::vector<std::uint64_t> keys;
  keys.reserve(mesh.face_count() * 3);
  for (const Triangle& t : mesh.faces()) {
    for (int e = 0; e < 3; ++e) keys.push_back(edge_key(t[static_cast<std::size_t>(e)], t[static_cast<std::size_t>((e + 1) % 3)]));
  }
  std::sort(keys.begin(), keys.end());
  std::size_t bad = 0;
  for (std::size_t i = 0; i < keys.size();) {
    std::size_t j = i;
    while (j < keys.size() && keys[j] == keys[i]) ++j;
    if (j - i > 2) ++bad;
    i = j;
  }
  return bad;
}

}  // namespace facetcvt
