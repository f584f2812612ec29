#include "facetcvt/mesh.hpp"

#include "facetcvt/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string_view>

namespace facetcvt {

namespace {

constexpr double kDegenerateAreaFactor = 1e-12;

double bbox_diagonal(std::span<const Vec3> vertices, Vec3* lo_out = nullptr, Vec3* hi_out = nullptr) {
  if (vertices.empty()) return 0.0;
  Vec3 lo = vertices.front();
  Vec3 hi = vertices.front();
  for (const Vec3& v : vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  if (lo_out) *lo_out = lo;
  if (hi_out) *hi_out = hi;
  return (hi - lo).norm();
}

std::string face_label(std::size_t f) { return "face " + std::to_string(f + 1); }

}  // namespace

std::vector<Vec3> compute_face_normals(std::span<const Vec3> vertices, std::span<const Triangle> faces) {
  const double diag = bbox_diagonal(vertices);
  const double min_area = kDegenerateAreaFactor * diag * diag;
  std::vector<Vec3> normals;
  normals.reserve(faces.size());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const Vec3& v1 = vertices[static_cast<std::size_t>(faces[f][0])];
    const Vec3& v2 = vertices[static_cast<std::size_t>(faces[f][1])];
    const Vec3& v3 = vertices[static_cast<std::size_t>(faces[f][2])];
    const Vec3 raw = (v3 - v1).cross(v2 - v1);
    const double len = raw.norm();
    if (!(0.5 * len > min_area)) {
      throw MeshError("degenerate " + face_label(f) + ": area " + std::to_string(0.5 * len) +
                      " below tolerance");
    }
    normals.push_back(raw / len);
  }
  return normals;
}

TriangleMesh TriangleMesh::build(std::vector<Vec3> vertices, std::vector<Triangle> faces) {
  const auto nv = static_cast<std::int64_t>(vertices.size());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const Triangle& t = faces[f];
    for (VertexId v : t) {
      if (v < 0 || v >= nv) {
        throw MeshError(face_label(f) + " references vertex " + std::to_string(static_cast<std::int64_t>(v) + 1) +
                        " but only " + std::to_string(nv) + " vertices exist");
      }
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw MeshError(face_label(f) + " repeats a vertex index");
    }
  }
  for (const Vec3& v : vertices) {
    if (!v.allFinite()) throw MeshError("non-finite vertex coordinate");
  }

  TriangleMesh m;
  m.face_normals_ = compute_face_normals(vertices, faces);
  m.bbox_diag_ = bbox_diagonal(vertices, &m.bbox_min_, &m.bbox_max_);
  m.vertices_ = std::move(vertices);
  m.faces_ = std::move(faces);

  const std::size_t nf = m.faces_.size();
  m.centroids_.resize(nf);
  m.areas_.resize(nf);
  double volume6 = 0.0;
  for (std::size_t f = 0; f < nf; ++f) {
    const Vec3& a = m.vertices_[static_cast<std::size_t>(m.faces_[f][0])];
    const Vec3& b = m.vertices_[static_cast<std::size_t>(m.faces_[f][1])];
    const Vec3& c = m.vertices_[static_cast<std::size_t>(m.faces_[f][2])];
    m.centroids_[f] = (a + b + c) / 3.0;
    m.areas_[f] = 0.5 * (b - a).cross(c - a).norm();
    m.total_area_ += m.areas_[f];
    volume6 += a.dot(b.cross(c));
    m.longest_edge_ = std::max({m.longest_edge_, (b - a).norm(), (c - b).norm(), (a - c).norm()});
  }
  m.signed_volume_ = volume6 / 6.0;
  // Positive volume means counter-clockwise faces wind outward, so the literal
  // (v3-v1)x(v2-v1) normal points inward and must be flipped.
  m.orientation_ = m.signed_volume_ < 0.0 ? 1.0 : -1.0;

  m.vertex_offsets_.assign(m.vertices_.size() + 1, 0);
  for (const Triangle& t : m.faces_) {
    for (VertexId v : t) ++m.vertex_offsets_[static_cast<std::size_t>(v) + 1];
  }
  std::partial_sum(m.vertex_offsets_.begin(), m.vertex_offsets_.end(), m.vertex_offsets_.begin());
  m.vertex_faces_.resize(static_cast<std::size_t>(m.vertex_offsets_.back()));
  std::vector<std::int32_t> fill(m.vertex_offsets_.begin(), m.vertex_offsets_.end() - 1);
  for (std::size_t f = 0; f < nf; ++f) {
    for (VertexId v : m.faces_[f]) {
      m.vertex_faces_[static_cast<std::size_t>(fill[static_cast<std::size_t>(v)]++)] = static_cast<FaceId>(f);
    }
  }
  return m;
}

std::array<Vec3, 3> TriangleMesh::corners(FaceId f) const {
  const Triangle& t = face(f);
  return {vertex(t[0]), vertex(t[1]), vertex(t[2])};
}

std::span<const FaceId> TriangleMesh::faces_of_vertex(VertexId v) const {
  const auto begin = static_cast<std::size_t>(vertex_offsets_[static_cast<std::size_t>(v)]);
  const auto end = static_cast<std::size_t>(vertex_offsets_[static_cast<std::size_t>(v) + 1]);
  return std::span<const FaceId>(vertex_faces_).subspan(begin, end - begin);
}

// ---------------------------------------------------------------------------
// OBJ I/O

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool next_token(std::string_view& rest, std::string_view& token) {
  const auto b = rest.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return false;
  rest.remove_prefix(b);
  const auto e = rest.find_first_of(" \t\r");
  token = rest.substr(0, e);
  rest.remove_prefix(e == std::string_view::npos ? rest.size() : e);
  return true;
}

double parse_double(std::string_view tok, std::size_t line_no) {
  // std::from_chars for double is unavailable on some older toolchains.
  std::string s(tok);
  char* end = nullptr;
  const double value = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw MeshError("line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return value;
}

}  // namespace

TriangleMesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file " + path.string());

  std::vector<Vec3> vertices;
  std::vector<Triangle> faces;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::int64_t> corner;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest = trim(line);
    std::string_view key;
    if (!next_token(rest, key) || key.front() == '#') continue;
    if (key == "v") {
      std::array<double, 3> xyz{};
      for (double& c : xyz) {
        std::string_view tok;
        if (!next_token(rest, tok)) throw MeshError("line " + std::to_string(line_no) + ": vertex needs 3 coordinates");
        c = parse_double(tok, line_no);
      }
      vertices.emplace_back(xyz[0], xyz[1], xyz[2]);
    } else if (key == "f") {
      corner.clear();
      std::string_view tok;
      while (next_token(rest, tok)) {
        const std::string_view idx = tok.substr(0, tok.find('/'));
        std::int64_t value = 0;
        const auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), value);
        if (ec != std::errc{} || ptr != idx.data() + idx.size() || value == 0) {
          throw MeshError("line " + std::to_string(line_no) + ": bad face index '" + std::string(tok) + "'");
        }
        // Negative indices count back from the most recent vertex.
        corner.push_back(value > 0 ? value - 1 : static_cast<std::int64_t>(vertices.size()) + value);
      }
      if (corner.size() < 3) {
        throw MeshError("line " + std::to_string(line_no) + ": face with fewer than 3 vertices");
      }
      for (std::size_t k = 1; k + 1 < corner.size(); ++k) {
        Triangle t{};
        const std::array<std::int64_t, 3> ids{corner[0], corner[k], corner[k + 1]};
        for (std::size_t j = 0; j < 3; ++j) {
          if (ids[j] < 0 || ids[j] > std::numeric_limits<VertexId>::max()) {
            throw MeshError("face " + std::to_string(faces.size() + 1) + " (line " + std::to_string(line_no) +
                            ") references vertex index out of range");
          }
          t[j] = static_cast<VertexId>(ids[j]);
        }
        faces.push_back(t);
      }
    }
    // vt, vn, g, o, s, usemtl, mtllib... carry no surface information here.
  }
  return TriangleMesh::build(std::move(vertices), std::move(faces));
}

std::string to_obj_string(const TriangleMesh& mesh) {
  std::string out;
  out.reserve(mesh.vertex_count() * 40 + mesh.face_count() * 24);
  char buf[128];
  for (const Vec3& v : mesh.vertices()) {
    const int n = std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", v.x(), v.y(), v.z());
    out.append(buf, static_cast<std::size_t>(n));
  }
  for (const Triangle& t : mesh.faces()) {
    const int n = std::snprintf(buf, sizeof buf, "f %d %d %d\n", t[0] + 1, t[1] + 1, t[2] + 1);
    out.append(buf, static_cast<std::size_t>(n));
  }
  return out;
}

void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path) {
  if (mesh.face_count() == 0) throw MeshError("refusing to save a mesh without faces");
  const std::string text = to_obj_string(mesh);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw MeshError("cannot write mesh file " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw MeshError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Queries

std::vector<FaceId> face_ring(const TriangleMesh& mesh, FaceId facet, int depth) {
  if (facet < 0 || static_cast<std::size_t>(facet) >= mesh.face_count()) {
    throw InvalidArgument("face_ring: facet " + std::to_string(facet) + " out of range");
  }
  if (depth != 1 && depth != 2) throw InvalidArgument("face_ring: depth must be 1 or 2");

  std::vector<FaceId> ring;
  auto collect = [&](FaceId f, std::vector<FaceId>& into) {
    for (VertexId v : mesh.face(f)) {
      for (FaceId g : mesh.faces_of_vertex(v)) into.push_back(g);
    }
  };
  collect(facet, ring);
  std::sort(ring.begin(), ring.end());
  ring.erase(std::unique(ring.begin(), ring.end()), ring.end());

  if (depth == 2) {
    std::vector<FaceId> outer = ring;
    for (FaceId f : ring) {
      if (f != facet) collect(f, outer);
    }
    std::sort(outer.begin(), outer.end());
    outer.erase(std::unique(outer.begin(), outer.end()), outer.end());
    ring = std::move(outer);
  }
  ring.erase(std::remove(ring.begin(), ring.end(), facet), ring.end());
  return ring;
}

ClosestPoint point_triangle_closest(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  // Voronoi-region walk over vertices, edges and interior.
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  auto result = [&p](const Vec3& q) { return ClosestPoint{q, (p - q).norm()}; };

  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return result(a);

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return result(b);

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return result(a + (d1 / (d1 - d3)) * ab);

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return result(c);

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return result(a + (d2 / (d2 - d6)) * ac);

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return result(b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b));
  }

  const double denom = 1.0 / (va + vb + vc);
  return result(a + ab * (vb * denom) + ac * (vc * denom));
}

SiteSet sample_surface_points(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed) {
  if (mesh.face_count() == 0) throw InvalidArgument("cannot sample an empty mesh");
  std::vector<double> cdf(mesh.face_count());
  double acc = 0.0;
  for (std::size_t f = 0; f < cdf.size(); ++f) {
    acc += mesh.face_area(static_cast<FaceId>(f));
    cdf[f] = acc;
  }

  Rng rng(seed);
  SiteSet sites;
  sites.positions.reserve(n);
  sites.host_facet.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double target = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    if (it == cdf.end()) --it;
    const auto f = static_cast<FaceId>(it - cdf.begin());
    const double r1 = std::sqrt(rng.uniform());
    const double r2 = rng.uniform();
    const auto [a, b, c] = mesh.corners(f);
    sites.positions.push_back((1.0 - r1) * a + r1 * (1.0 - r2) * b + r1 * r2 * c);
    sites.host_facet.push_back(f);
  }
  return sites;
}

SiteSet sample_uniform(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed) {
  if (n < 4) throw InvalidArgument("sample_uniform needs at least 4 sites, got " + std::to_string(n));
  return sample_surface_points(mesh, n, seed);
}

bool site_on_host_facet(const TriangleMesh& mesh, const Vec3& p, FaceId host, double tolerance) {
  if (host < 0 || static_cast<std::size_t>(host) >= mesh.face_count()) return false;
  const auto [a, b, c] = mesh.corners(host);
  const Vec3& n = mesh.face_normal(host);
  if (std::abs(n.dot(p - a)) > tolerance) return false;
  // Barycentric slack expressed as distance to the nearest edge line.
  const ClosestPoint cp = point_triangle_closest(p, a, b, c);
  return cp.distance <= 2.0 * tolerance;
}

}  // namespace facetcvt
