#include "facetcvt/convex_cell.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <limits>
#include <numeric>
#include <sstream>

namespace facetcvt {

std::ostream& operator<<(std::ostream& os, const PlaneTag& tag) {
  switch (tag.kind) {
    case PlaneTag::Kind::Box: return os << "box:" << tag.id;
    case PlaneTag::Kind::Bisector: return os << "bisector:" << tag.id;
    case PlaneTag::Kind::Facet: return os << "facet:" << tag.id;
  }
  return os;
}

HalfSpace bisector(const Vec3& s_i, const Vec3& s_k, SiteId k) {
  const Vec3 d = s_k - s_i;
  const double len = d.norm();
  if (!(len > 0.0)) throw InvalidArgument("bisector of coincident sites (neighbour " + std::to_string(k) + ")");
  HalfSpace hs;
  hs.normal = d / len;
  hs.offset = hs.normal.dot(0.5 * (s_i + s_k));
  hs.tag = PlaneTag::bisector(k);
  return hs;
}

HalfSpace facet_half_space(const TriangleMesh& mesh, FaceId f) {
  HalfSpace hs;
  hs.normal = mesh.outward_normal(f);
  hs.offset = hs.normal.dot(mesh.vertex(mesh.face(f)[0]));
  hs.tag = PlaneTag::facet(f);
  return hs;
}

ConvexCell ConvexCell::box(const Vec3& lo, const Vec3& hi, double eps) {
  ConvexCell c;
  c.eps_ = eps;
  c.empty_ = false;
  c.vertices_.reserve(8);
  // Vertex i has coordinates (bit0 ? hi.x : lo.x, bit1 ? hi.y : lo.y, bit2 ? hi.z : lo.z).
  for (int i = 0; i < 8; ++i) {
    c.vertices_.emplace_back((i & 1) ? hi.x() : lo.x(), (i & 2) ? hi.y() : lo.y(), (i & 4) ? hi.z() : lo.z());
  }
  static constexpr std::int32_t kLoops[6][4] = {
      {0, 4, 6, 2}, {1, 3, 7, 5}, {0, 1, 5, 4}, {2, 6, 7, 3}, {0, 2, 3, 1}, {4, 5, 7, 6}};
  for (int side = 0; side < 6; ++side) {
    const int axis = side / 2;
    const bool upper = side % 2 == 1;
    HalfSpace hs;
    hs.normal = Vec3::Zero();
    hs.normal[axis] = upper ? 1.0 : -1.0;
    hs.offset = upper ? hi[axis] : -lo[axis];
    hs.tag = PlaneTag::box(side);
    c.faces_.push_back({hs, static_cast<std::int32_t>(c.loops_.size()), 4});
    c.loops_.insert(c.loops_.end(), std::begin(kLoops[side]), std::end(kLoops[side]));
    c.provenance_.push_back(hs);
  }
  return c;
}

namespace {

// Per-thread scratch so the hot clip path does not allocate.
struct ClipScratch {
  std::vector<double> dist;
  std::vector<std::int32_t> remap;
  std::vector<Vec3> new_vertices;
  std::vector<std::int32_t> new_loops;
  std::vector<ConvexCell::Face> new_faces;
  std::vector<std::int32_t> face_out;
  std::vector<std::array<std::int32_t, 3>> crossings;  // (lo, hi, new index)
  std::vector<std::pair<std::int32_t, std::int32_t>> cap_edges;  // from -> to
  std::vector<std::int32_t> cap_loop;
  std::vector<std::int32_t> used;
};

thread_local ClipScratch g_scratch;

void orient_loop_by_angle(std::vector<std::int32_t>& loop, std::span<const Vec3> vertices, const Vec3& normal) {
  Vec3 center = Vec3::Zero();
  for (std::int32_t v : loop) center += vertices[static_cast<std::size_t>(v)];
  center /= static_cast<double>(loop.size());
  Vec3 u = normal.unitOrthogonal();
  Vec3 w = normal.cross(u);
  std::vector<std::pair<double, std::int32_t>> keyed;
  keyed.reserve(loop.size());
  for (std::int32_t v : loop) {
    const Vec3 d = vertices[static_cast<std::size_t>(v)] - center;
    keyed.emplace_back(std::atan2(d.dot(w), d.dot(u)), v);
  }
  std::sort(keyed.begin(), keyed.end());
  for (std::size_t i = 0; i < loop.size(); ++i) loop[i] = keyed[i].second;
}

}  // namespace

bool ConvexCell::clip(const HalfSpace& hs) {
  if (empty_) return false;
  ClipScratch& s = g_scratch;
  const std::size_t nv = vertices_.size();

  s.dist.resize(nv);
  std::size_t removed = 0;
  for (std::size_t v = 0; v < nv; ++v) {
    s.dist[v] = hs.signed_distance(vertices_[v]);
    if (s.dist[v] > eps_) ++removed;
  }
  if (removed == 0) {
    provenance_.push_back(hs);
    return false;
  }
  if (removed == nv) {
    *this = ConvexCell{};
    empty_ = true;
    return true;
  }

  auto kept = [&](std::int32_t v) { return s.dist[static_cast<std::size_t>(v)] <= eps_; };

  s.new_vertices.clear();
  s.remap.assign(nv, -1);
  for (std::size_t v = 0; v < nv; ++v) {
    if (s.dist[v] <= eps_) {
      s.remap[v] = static_cast<std::int32_t>(s.new_vertices.size());
      s.new_vertices.push_back(vertices_[v]);
    }
  }

  s.crossings.clear();
  // Point where the edge (in, out) meets the plane. A kept vertex lying on
  // the plane is reused instead of creating a coincident copy.
  auto crossing = [&](std::int32_t in, std::int32_t out) -> std::int32_t {
    const double d_in = s.dist[static_cast<std::size_t>(in)];
    if (d_in >= -eps_) return s.remap[static_cast<std::size_t>(in)];
    const std::int32_t lo = std::min(in, out);
    const std::int32_t hi = std::max(in, out);
    for (const auto& c : s.crossings) {
      if (c[0] == lo && c[1] == hi) return c[2];
    }
    const double d_out = s.dist[static_cast<std::size_t>(out)];
    const double t = d_in / (d_in - d_out);
    const Vec3& a = vertices_[static_cast<std::size_t>(in)];
    const Vec3& b = vertices_[static_cast<std::size_t>(out)];
    const auto id = static_cast<std::int32_t>(s.new_vertices.size());
    s.new_vertices.push_back(a + t * (b - a));
    s.crossings.push_back({lo, hi, id});
    return id;
  };

  s.new_loops.clear();
  s.new_faces.clear();
  s.cap_edges.clear();
  for (const Face& face : faces_) {
    const auto L = loop(face);
    const std::size_t m = L.size();
    std::size_t start = m;
    for (std::size_t j = 0; j < m; ++j) {
      if (kept(L[j])) {
        start = j;
        break;
      }
    }
    if (start == m) continue;  // face entirely on the removed side

    s.face_out.clear();
    auto push = [&](std::int32_t v) {
      if (s.face_out.empty() || s.face_out.back() != v) s.face_out.push_back(v);
    };
    std::int32_t exit_point = -1;
    for (std::size_t j = 0; j < m; ++j) {
      const std::int32_t cur = L[(start + j) % m];
      const std::int32_t nxt = L[(start + j + 1) % m];
      if (kept(cur)) {
        push(s.remap[static_cast<std::size_t>(cur)]);
        if (!kept(nxt)) {
          exit_point = crossing(cur, nxt);
          push(exit_point);
        }
      } else if (kept(nxt)) {
        const std::int32_t entry_point = crossing(nxt, cur);
        push(entry_point);
        // The clipped face gains edge exit->entry; the cap owns its reverse.
        if (entry_point != exit_point) s.cap_edges.emplace_back(entry_point, exit_point);
      }
    }
    if (s.face_out.size() > 1 && s.face_out.front() == s.face_out.back()) s.face_out.pop_back();
    if (s.face_out.size() < 3) continue;
    s.new_faces.push_back({face.plane, static_cast<std::int32_t>(s.new_loops.size()),
                           static_cast<std::int32_t>(s.face_out.size())});
    s.new_loops.insert(s.new_loops.end(), s.face_out.begin(), s.face_out.end());
  }

  // Chain the cap edges into one loop.
  s.cap_loop.clear();
  if (s.cap_edges.size() >= 3) {
    std::sort(s.cap_edges.begin(), s.cap_edges.end());
    const bool unique_sources = std::adjacent_find(s.cap_edges.begin(), s.cap_edges.end(), [](auto& a, auto& b) {
                                  return a.first == b.first;
                                }) == s.cap_edges.end();
    if (unique_sources) {
      std::int32_t cur = s.cap_edges.front().first;
      for (std::size_t step = 0; step < s.cap_edges.size(); ++step) {
        s.cap_loop.push_back(cur);
        auto it = std::lower_bound(s.cap_edges.begin(), s.cap_edges.end(), std::make_pair(cur, std::numeric_limits<std::int32_t>::min()));
        if (it == s.cap_edges.end() || it->first != cur) {
          s.cap_loop.clear();
          break;
        }
        cur = it->second;
      }
      if (!s.cap_loop.empty() && cur != s.cap_loop.front()) s.cap_loop.clear();
    }
    if (s.cap_loop.empty()) {
      // Inconsistent chain from round-off: every cap point lies on the plane
      // and the cap is convex, so an angular sort recovers the loop.
      for (const auto& e : s.cap_edges) {
        s.cap_loop.push_back(e.first);
        s.cap_loop.push_back(e.second);
      }
      std::sort(s.cap_loop.begin(), s.cap_loop.end());
      s.cap_loop.erase(std::unique(s.cap_loop.begin(), s.cap_loop.end()), s.cap_loop.end());
      orient_loop_by_angle(s.cap_loop, s.new_vertices, hs.normal);
    }
  }
  if (s.cap_loop.size() < 3) {
    // Tangent contact: nothing of substance was cut off.
    return false;
  }
  s.new_faces.push_back({hs, static_cast<std::int32_t>(s.new_loops.size()),
                         static_cast<std::int32_t>(s.cap_loop.size())});
  s.new_loops.insert(s.new_loops.end(), s.cap_loop.begin(), s.cap_loop.end());

  if (s.new_faces.size() < 4) {
    *this = ConvexCell{};
    empty_ = true;
    return true;
  }

  // Drop vertices no face references any more.
  s.used.assign(s.new_vertices.size(), -1);
  for (std::int32_t v : s.new_loops) s.used[static_cast<std::size_t>(v)] = 0;
  vertices_.clear();
  for (std::size_t v = 0; v < s.new_vertices.size(); ++v) {
    if (s.used[v] == 0) {
      s.used[v] = static_cast<std::int32_t>(vertices_.size());
      vertices_.push_back(s.new_vertices[v]);
    }
  }
  loops_.resize(s.new_loops.size());
  for (std::size_t i = 0; i < s.new_loops.size(); ++i) loops_[i] = s.used[static_cast<std::size_t>(s.new_loops[i])];
  faces_.assign(s.new_faces.begin(), s.new_faces.end());
  provenance_.push_back(hs);
  return true;
}

double ConvexCell::volume() const {
  if (empty_ || vertices_.empty()) return 0.0;
  const Vec3& origin = vertices_.front();
  double v6 = 0.0;
  for (const Face& f : faces_) {
    const auto L = loop(f);
    const Vec3& a = vertices_[static_cast<std::size_t>(L[0])];
    for (std::size_t j = 1; j + 1 < L.size(); ++j) {
      const Vec3& b = vertices_[static_cast<std::size_t>(L[j])];
      const Vec3& c = vertices_[static_cast<std::size_t>(L[j + 1])];
      v6 += (a - origin).dot((b - origin).cross(c - origin));
    }
  }
  return v6 / 6.0;
}

double ConvexCell::max_distance_from(const Vec3& p) const {
  double best = 0.0;
  for (const Vec3& v : vertices_) best = std::max(best, (v - p).squaredNorm());
  return std::sqrt(best);
}

const ConvexCell::Face* ConvexCell::find_face(const PlaneTag& tag) const {
  for (const Face& f : faces_) {
    if (f.plane.tag == tag) return &f;
  }
  return nullptr;
}

std::optional<std::vector<Vec3>> ConvexCell::face_on_plane(const PlaneTag& tag) const {
  if (const Face* f = find_face(tag)) {
    std::vector<Vec3> poly;
    poly.reserve(static_cast<std::size_t>(f->size));
    for (std::int32_t v : loop(*f)) poly.push_back(vertices_[static_cast<std::size_t>(v)]);
    return poly;
  }
  const bool applied = std::any_of(provenance_.begin(), provenance_.end(),
                                   [&](const HalfSpace& h) { return h.tag == tag; });
  if (!applied && !empty_) {
    std::ostringstream os;
    os << "no half-space tagged " << tag << " was applied to this cell";
    throw InvalidArgument(os.str());
  }
  return std::nullopt;
}

CellCheck ConvexCell::check() const {
  CellCheck r;
  if (empty_) return r;
  r.vertex_count = vertices_.size();
  r.face_count = faces_.size();
  // Kept vertices may sit up to eps outside a plane; crossing points add
  // round-off on top, bounded by a few ulps of the coordinates.
  double scale = 0.0;
  for (const Vec3& v : vertices_) scale = std::max(scale, v.cwiseAbs().maxCoeff());
  const double tol = eps_ + 64.0 * std::numeric_limits<double>::epsilon() * std::max(scale, 1.0);
  for (const HalfSpace& h : provenance_) {
    for (const Vec3& v : vertices_) {
      if (h.signed_distance(v) > tol) r.convex = false;
    }
  }
  std::vector<std::pair<std::int32_t, std::int32_t>> half_edges;
  for (const Face& f : faces_) {
    const auto L = loop(f);
    for (std::size_t j = 0; j < L.size(); ++j) half_edges.emplace_back(L[j], L[(j + 1) % L.size()]);
  }
  std::sort(half_edges.begin(), half_edges.end());
  for (std::size_t i = 0; i < half_edges.size(); ++i) {
    if (i > 0 && half_edges[i] == half_edges[i - 1]) r.edges_paired = false;
    const auto twin = std::make_pair(half_edges[i].second, half_edges[i].first);
    if (!std::binary_search(half_edges.begin(), half_edges.end(), twin)) r.edges_paired = false;
  }
  r.edge_count = half_edges.size() / 2;
  r.euler = static_cast<long>(r.vertex_count) - static_cast<long>(r.edge_count) + static_cast<long>(r.face_count) == 2 &&
            half_edges.size() % 2 == 0;
  return r;
}

void ConvexCell::write_obj(std::ostream& os) const {
  for (const Vec3& v : vertices_) os << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const Face& f : faces_) {
    os << "# " << f.plane.tag << "\nf";
    for (std::int32_t v : loop(f)) os << ' ' << v + 1;
    os << '\n';
  }
}

ConvexCell clip_halfspace(ConvexCell cell, const HalfSpace& hs) {
  cell.clip(hs);
  return cell;
}

ConvexCell init_bounding_cell(const TriangleMesh& mesh, double padding) {
  const double diag = mesh.bbox_diag();
  const Vec3 pad = Vec3::Constant(padding * diag);
  return ConvexCell::box(mesh.bbox_min() - pad, mesh.bbox_max() + pad, 1e-9 * diag);
}

std::optional<std::vector<Vec3>> extract_face_on_plane(const ConvexCell& cell, const PlaneTag& tag) {
  return cell.face_on_plane(tag);
}

VoronoiCell compute_voronoi_cell(SiteId site, std::span<const Vec3> sites, const PointIndex& index, std::size_t K,
                                 const ConvexCell& bounds) {
  if (K < 1) throw InvalidArgument("compute_voronoi_cell: K must be >= 1");
  const Vec3& s = sites[static_cast<std::size_t>(site)];
  const std::size_t others = sites.size() - 1;
  const std::size_t used_k = std::min(K, others);
  // One extra neighbour tells whether the sites beyond K could still cut.
  thread_local std::vector<Neighbor> neighbors;
  index.knn(s, std::min(used_k + 1, others), site, neighbors);

  VoronoiCell out{bounds, 0, 0.0, false, std::numeric_limits<double>::infinity()};
  for (std::size_t j = 0; j < used_k; ++j) {
    const Neighbor& nb = neighbors[j];
    if (nb.distance > 2.0 * out.cell.max_distance_from(s)) {
      out.secured = true;
      out.next_distance = nb.distance;
      return out;
    }
    if (nb.distance == 0.0) continue;  // duplicate site: no defined bisector
    out.cell.clip(bisector(s, sites[static_cast<std::size_t>(nb.id)], nb.id));
    ++out.neighbors_used;
    out.d_max = nb.distance;
  }
  if (used_k == others) {
    out.secured = true;
  } else {
    out.next_distance = neighbors[used_k].distance;
    out.secured = out.next_distance > 2.0 * out.cell.max_distance_from(s);
  }
  return out;
}

VoronoiCell compute_voronoi_cell(SiteId site, const SiteSet& sites, const PointIndex& index, std::size_t K,
                                 const TriangleMesh& mesh) {
  return compute_voronoi_cell(site, sites.positions, index, K, init_bounding_cell(mesh));
}

PolygonMoments polygon_moments(std::span<const Vec3> polygon) {
  PolygonMoments m;
  if (polygon.size() < 3) return m;
  const Vec3& a = polygon[0];
  Vec3 weighted = Vec3::Zero();
  for (std::size_t j = 1; j + 1 < polygon.size(); ++j) {
    const double area = 0.5 * (polygon[j] - a).cross(polygon[j + 1] - a).norm();
    m.area += area;
    weighted += area * (a + polygon[j] + polygon[j + 1]) / 3.0;
  }
  m.centroid = m.area > 0.0 ? Vec3(weighted / m.area) : Vec3(a);
  return m;
}

}  // namespace facetcvt
