#pragma once

#include "facetcvt/mesh.hpp"
#include "facetcvt/spatial_index.hpp"
#include "facetcvt/types.hpp"

#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace facetcvt {

/// Where a clipping plane came from.
struct PlaneTag {
  enum class Kind : std::uint8_t { Box, Bisector, Facet };
  Kind kind = Kind::Box;
  std::int32_t id = 0;  // box side 0..5, neighbour site id, or face id

  static PlaneTag box(std::int32_t side) { return {Kind::Box, side}; }
  static PlaneTag bisector(SiteId k) { return {Kind::Bisector, k}; }
  static PlaneTag facet(FaceId f) { return {Kind::Facet, f}; }

  friend bool operator==(const PlaneTag&, const PlaneTag&) = default;
};

std::ostream& operator<<(std::ostream& os, const PlaneTag& tag);

/// Closed half-space normal . x <= offset, with a unit normal.
struct HalfSpace {
  Vec3 normal = Vec3::UnitX();
  double offset = 0.0;
  PlaneTag tag;

  [[nodiscard]] double signed_distance(const Vec3& p) const { return normal.dot(p) - offset; }
};

/// Points at least as close to s_i as to s_k. Throws InvalidArgument when the
/// sites coincide.
HalfSpace bisector(const Vec3& s_i, const Vec3& s_k, SiteId k);

/// Supporting plane of face f oriented to keep the side opposite its outward
/// normal.
HalfSpace facet_half_space(const TriangleMesh& mesh, FaceId f);

/// Result of the structural self-check.
struct CellCheck {
  bool convex = true;          // every vertex inside every applied half-space (within eps)
  bool edges_paired = true;    // every directed edge has exactly one reversed twin
  bool euler = true;           // V - E + F == 2
  std::size_t vertex_count = 0;
  std::size_t edge_count = 0;
  std::size_t face_count = 0;

  [[nodiscard]] bool ok() const { return convex && edges_paired && euler; }
};

/// Bounded convex polyhedron stored as vertex positions plus faces given as
/// counter-clockwise (seen from outside) vertex loops. Each face remembers the
/// half-space that produced it, so the cross-section on any clipping plane can
/// be read back directly.
class ConvexCell {
 public:
  struct Face {
    HalfSpace plane;
    std::int32_t begin = 0;
    std::int32_t size = 0;
  };

  ConvexCell() = default;

  /// Axis-aligned box [lo, hi] with six faces tagged Box(0..5)
  /// (-x, +x, -y, +y, -z, +z).
  static ConvexCell box(const Vec3& lo, const Vec3& hi, double eps);

  [[nodiscard]] bool empty() const { return empty_; }
  [[nodiscard]] double eps() const { return eps_; }

  [[nodiscard]] std::span<const Vec3> vertices() const { return vertices_; }
  [[nodiscard]] std::span<const Face> faces() const { return faces_; }
  [[nodiscard]] std::span<const std::int32_t> loop(const Face& face) const {
    return std::span<const std::int32_t>(loops_).subspan(static_cast<std::size_t>(face.begin),
                                                         static_cast<std::size_t>(face.size));
  }
  /// Every half-space applied so far, in order (box sides first).
  [[nodiscard]] std::span<const HalfSpace> provenance() const { return provenance_; }

  /// Clips in place. Vertices with signed distance > eps are removed, crossing
  /// edges are split and the crossing points joined into one new face tagged
  /// by `hs`. Returns true when any vertex was removed. A cut that would create
  /// a face with fewer than three distinct corners is treated as tangent.
  bool clip(const HalfSpace& hs);

  [[nodiscard]] double volume() const;
  [[nodiscard]] double max_distance_from(const Vec3& p) const;

  /// Cyclic corners of the face generated by `tag`, or nullopt when that
  /// plane no longer bounds the cell. Throws InvalidArgument when `tag` was
  /// never applied to this cell.
  [[nodiscard]] std::optional<std::vector<Vec3>> face_on_plane(const PlaneTag& tag) const;

  /// Non-throwing lookup: the face generated by `tag`, if it still exists.
  [[nodiscard]] const Face* find_face(const PlaneTag& tag) const;

  [[nodiscard]] CellCheck check() const;

  /// Debug dump as a polygonal OBJ.
  void write_obj(std::ostream& os) const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<std::int32_t> loops_;
  std::vector<Face> faces_;
  std::vector<HalfSpace> provenance_;
  double eps_ = 0.0;
  bool empty_ = true;
};

/// Functional form of ConvexCell::clip.
ConvexCell clip_halfspace(ConvexCell cell, const HalfSpace& hs);

/// Padded bounding box of the mesh; eps = 1e-9 * bbox_diag.
ConvexCell init_bounding_cell(const TriangleMesh& mesh, double padding = 0.05);

/// Face loop of `tag` as points; free-function spelling of face_on_plane.
std::optional<std::vector<Vec3>> extract_face_on_plane(const ConvexCell& cell, const PlaneTag& tag);

struct VoronoiCell {
  ConvexCell cell;
  std::size_t neighbors_used = 0;  // bisectors actually applied
  double d_max = 0.0;              // distance to the farthest neighbour applied
  bool secured = false;            // security radius proved the cell complete
  double next_distance = std::numeric_limits<double>::infinity();  // first neighbour not applied
};

/// Voronoi cell of `site` by sequential bisector clipping against its (up to)
/// K nearest sites, in ascending distance order, starting from `bounds`. Stops
/// as soon as the next neighbour is farther than twice the largest distance
/// from the site to a cell vertex. If the K neighbours run out first the cell
/// is returned with secured == false (unless no other sites remain).
VoronoiCell compute_voronoi_cell(SiteId site, std::span<const Vec3> sites, const PointIndex& index, std::size_t K,
                                 const ConvexCell& bounds);

/// Convenience overload that builds the bounds from the mesh.
VoronoiCell compute_voronoi_cell(SiteId site, const SiteSet& sites, const PointIndex& index, std::size_t K,
                                 const TriangleMesh& mesh);

/// Area and area centroid of a planar convex polygon (fan triangulation).
struct PolygonMoments {
  double area = 0.0;
  Vec3 centroid = Vec3::Zero();
};
PolygonMoments polygon_moments(std::span<const Vec3> polygon);

}  // namespace facetcvt
