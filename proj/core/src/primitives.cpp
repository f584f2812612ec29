#include "facetcvt/primitives.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace facetcvt {

TriangleMesh icosphere(int level, double radius) {
  if (level < 0 || level > 8) throw InvalidArgument("icosphere level must be in [0, 8]");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                         {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& p : v) p.normalize();
  std::vector<Triangle> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                             {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                             {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<VertexId, VertexId>, VertexId> mid;
    auto midpoint = [&](VertexId a, VertexId b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back((v[static_cast<std::size_t>(a)] + v[static_cast<std::size_t>(b)]).normalized());
      const auto id = static_cast<VertexId>(v.size() - 1);
      mid.emplace(key, id);
      return id;
    };
    std::vector<Triangle> next;
    next.reserve(f.size() * 4);
    for (const Triangle& tri : f) {
      const VertexId a = midpoint(tri[0], tri[1]);
      const VertexId b = midpoint(tri[1], tri[2]);
      const VertexId c = midpoint(tri[2], tri[0]);
      next.push_back({tri[0], a, c});
      next.push_back({tri[1], b, a});
      next.push_back({tri[2], c, b});
      next.push_back({a, b, c});
    }
    f = std::move(next);
  }
  for (Vec3& p : v) p *= radius;
  return TriangleMesh::build(std::move(v), std::move(f));
}

TriangleMesh uv_sphere(int segments, int rings, double radius) {
  if (segments < 3 || rings < 1) throw InvalidArgument("uv_sphere needs segments >= 3 and rings >= 1");
  std::vector<Vec3> v;
  v.reserve(static_cast<std::size_t>(segments) * static_cast<std::size_t>(rings) + 2);
  v.emplace_back(0, 0, radius);
  for (int r = 0; r < rings; ++r) {
    const double phi = std::numbers::pi * (r + 1) / (rings + 1);
    for (int s = 0; s < segments; ++s) {
      const double th = 2.0 * std::numbers::pi * s / segments;
      v.emplace_back(radius * std::sin(phi) * std::cos(th), radius * std::sin(phi) * std::sin(th),
                     radius * std::cos(phi));
    }
  }
  v.emplace_back(0, 0, -radius);
  const auto south = static_cast<VertexId>(v.size() - 1);
  auto at = [&](int r, int s) { return static_cast<VertexId>(1 + r * segments + (s % segments)); };
  std::vector<Triangle> f;
  for (int s = 0; s < segments; ++s) f.push_back({0, at(0, s), at(0, s + 1)});
  for (int r = 0; r + 1 < rings; ++r) {
    for (int s = 0; s < segments; ++s) {
      f.push_back({at(r, s), at(r + 1, s), at(r + 1, s + 1)});
      f.push_back({at(r, s), at(r + 1, s + 1), at(r, s + 1)});
    }
  }
  for (int s = 0; s < segments; ++s) f.push_back({at(rings - 1, s), south, at(rings - 1, s + 1)});
  return TriangleMesh::build(std::move(v), std::move(f));
}

namespace {

// Surface of the lattice cube [0, res]^3, counter-clockwise from outside.
// Lattice index k along each axis sits at knots[k]; `place` maps the
// resulting point of the cube [-h, h]^3 to the output position.
template <class Place>
TriangleMesh lattice_cube(const std::vector<double>& knots, Place place) {
  const int res = static_cast<int>(knots.size()) - 1;
  std::map<std::array<int, 3>, VertexId> ids;
  std::vector<Vec3> v;
  auto vid = [&](std::array<int, 3> c) {
    auto it = ids.find(c);
    if (it != ids.end()) return it->second;
    v.push_back(place(Vec3(knots[static_cast<std::size_t>(c[0])], knots[static_cast<std::size_t>(c[1])],
                           knots[static_cast<std::size_t>(c[2])])));
    const auto id = static_cast<VertexId>(v.size() - 1);
    ids.emplace(c, id);
    return id;
  };
  std::vector<Triangle> f;
  for (int axis = 0; axis < 3; ++axis) {
    const int u = (axis + 1) % 3;
    const int w = (axis + 2) % 3;
    for (int side = 0; side < 2; ++side) {
      for (int i = 0; i < res; ++i) {
        for (int j = 0; j < res; ++j) {
          auto corner = [&](int di, int dj) {
            std::array<int, 3> c{};
            c[static_cast<std::size_t>(axis)] = side * res;
            c[static_cast<std::size_t>(u)] = i + di;
            c[static_cast<std::size_t>(w)] = j + dj;
            return vid(c);
          };
          const VertexId a = corner(0, 0);
          const VertexId b = corner(1, 0);
          const VertexId c = corner(1, 1);
          const VertexId d = corner(0, 1);
          // (u, w, axis) is right-handed, so u x w points along +axis.
          // Split along the diagonal pointing away from the cube centre so
          // the mesh is symmetric under the cube's reflections.
          const bool flip = (knots[static_cast<std::size_t>(i)] + knots[static_cast<std::size_t>(i + 1)] < 0.0) !=
                            (knots[static_cast<std::size_t>(j)] + knots[static_cast<std::size_t>(j + 1)] < 0.0);
          std::array<Triangle, 2> quad = flip ? std::array<Triangle, 2>{Triangle{a, b, d}, Triangle{b, c, d}}
                                              : std::array<Triangle, 2>{Triangle{a, b, c}, Triangle{a, c, d}};
          for (Triangle t : quad) {
            if (side == 0) std::swap(t[1], t[2]);
            f.push_back(t);
          }
        }
      }
    }
  }
  return TriangleMesh::build(std::move(v), std::move(f));
}

}  // namespace

TriangleMesh cube(int res, double half) {
  if (res < 1) throw InvalidArgument("cube resolution must be >= 1");
  if (!(half > 0.0)) throw InvalidArgument("cube half-size must be positive");
  std::vector<double> knots;
  for (int k = 0; k <= res; ++k) knots.push_back(-half + 2.0 * half * k / res);
  return lattice_cube(knots, [](const Vec3& q) { return q; });
}

TriangleMesh rounded_cube(int res, double half, double radius) {
  if (!(radius > 0.0) || !(radius < half)) throw InvalidArgument("rounded_cube needs 0 < radius < half");
  if (res < 4) throw InvalidArgument("rounded_cube resolution must be >= 4");
  const double core = half - radius;
  // Cells are shared between the flat part and the two half-fillets (45
  // degrees each) in proportion to arc length; fillet knots are spaced by
  // equal angle.
  const double arc = radius * std::numbers::pi / 4.0;
  const int na = std::max(1, static_cast<int>(std::lround(res * arc / (2.0 * core + 2.0 * arc))));
  const int nf = res - 2 * na;
  if (nf < 1) throw InvalidArgument("rounded_cube resolution too low for this radius");
  std::vector<double> knots;
  for (int k = na; k > 0; --k) knots.push_back(-core - radius * std::tan(std::numbers::pi / 4.0 * k / na));
  for (int k = 0; k <= nf; ++k) knots.push_back(-core + 2.0 * core * k / nf);
  for (int k = 1; k <= na; ++k) knots.push_back(core + radius * std::tan(std::numbers::pi / 4.0 * k / na));
  return lattice_cube(knots, [&](const Vec3& q) {
    const Vec3 c = q.cwiseMax(Vec3::Constant(-core)).cwiseMin(Vec3::Constant(core));
    const Vec3 d = q - c;
    return Vec3(c + radius * d / d.norm());
  });
}

TriangleMesh torus(int nu, int nv, double major, double minor) {
  if (nu < 3 || nv < 3) throw InvalidArgument("torus needs nu, nv >= 3");
  if (!(minor > 0.0) || !(minor < major)) throw InvalidArgument("torus needs 0 < minor < major");
  std::vector<Vec3> v;
  for (int i = 0; i < nu; ++i) {
    const double a = 2.0 * std::numbers::pi * i / nu;
    for (int j = 0; j < nv; ++j) {
      const double b = 2.0 * std::numbers::pi * j / nv;
      const double rr = major + minor * std::cos(b);
      v.emplace_back(rr * std::cos(a), rr * std::sin(a), minor * std::sin(b));
    }
  }
  auto at = [&](int i, int j) { return static_cast<VertexId>((i % nu) * nv + (j % nv)); };
  std::vector<Triangle> f;
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      f.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
      f.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
    }
  }
  return TriangleMesh::build(std::move(v), std::move(f));
}

TriangleMesh flat_grid(int nx, int ny) {
  if (nx < 1 || ny < 1) throw InvalidArgument("flat_grid needs nx, ny >= 1");
  std::vector<Vec3> v;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) v.emplace_back(static_cast<double>(i) / nx, static_cast<double>(j) / ny, 0.0);
  }
  auto at = [&](int i, int j) { return static_cast<VertexId>(j * (nx + 1) + i); };
  std::vector<Triangle> f;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      f.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
      f.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
    }
  }
  return TriangleMesh::build(std::move(v), std::move(f));
}

TriangleMesh make_primitive(const std::string& name, int resolution) {
  if (name == "icosphere") return icosphere(resolution);
  if (name == "uvsphere") return uv_sphere(2 * resolution, resolution);
  if (name == "cube") return cube(resolution);
  if (name == "rounded-cube") return rounded_cube(resolution, 1.0, 0.25);
  if (name == "fillet-cube") return rounded_cube(resolution, 1.0, 0.08);
  if (name == "torus") return torus(2 * resolution, resolution);
  if (name == "grid") return flat_grid(resolution, resolution);
  throw InvalidArgument("unknown primitive '" + name + "'");
}

}  // namespace facetcvt
