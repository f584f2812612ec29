#pragma once

#include "facetcvt/types.hpp"

#include <array>
#include <filesystem>
#include <span>
#include <vector>

namespace facetcvt {

using Triangle = std::array<VertexId, 3>;

/// Indexed triangle surface. Immutable once built; construct through
/// TriangleMesh::build or load_mesh so that every invariant is checked.
class TriangleMesh {
 public:
  TriangleMesh() = default;

  /// Validates the input and derives normals, adjacency and the bbox.
  /// Throws MeshError on out-of-range or repeated indices and on faces whose
  /// area is below 1e-12 * bbox_diag^2 (the message names the face).
  static TriangleMesh build(std::vector<Vec3> vertices, std::vector<Triangle> faces);

  [[nodiscard]] std::span<const Vec3> vertices() const { return vertices_; }
  [[nodiscard]] std::span<const Triangle> faces() const { return faces_; }
  [[nodiscard]] std::size_t vertex_count() const { return vertices_.size(); }
  [[nodiscard]] std::size_t face_count() const { return faces_.size(); }

  [[nodiscard]] const Vec3& vertex(VertexId v) const { return vertices_[static_cast<std::size_t>(v)]; }
  [[nodiscard]] const Triangle& face(FaceId f) const { return faces_[static_cast<std::size_t>(f)]; }
  [[nodiscard]] std::array<Vec3, 3> corners(FaceId f) const;

  /// Unit normal from (v3 - v1) x (v2 - v1), evaluated literally. For a
  /// counter-clockwise face this points to the back side of the winding.
  [[nodiscard]] const Vec3& face_normal(FaceId f) const { return face_normals_[static_cast<std::size_t>(f)]; }
  [[nodiscard]] std::span<const Vec3> face_normals() const { return face_normals_; }

  /// face_normal(f) flipped by the global orientation flag so that it points
  /// out of the enclosed volume.
  [[nodiscard]] Vec3 outward_normal(FaceId f) const { return orientation_ * face_normal(f); }

  /// +1 when the literal normals already point outward, -1 otherwise.
  /// Decided from the signed volume; open or zero-volume meshes get -1
  /// (counter-clockwise winding assumed to face outward).
  [[nodiscard]] double orientation() const { return orientation_; }
  [[nodiscard]] double signed_volume() const { return signed_volume_; }

  [[nodiscard]] std::span<const FaceId> faces_of_vertex(VertexId v) const;

  [[nodiscard]] Vec3 face_centroid(FaceId f) const { return centroids_[static_cast<std::size_t>(f)]; }
  [[nodiscard]] double face_area(FaceId f) const { return areas_[static_cast<std::size_t>(f)]; }
  [[nodiscard]] double total_area() const { return total_area_; }

  [[nodiscard]] const Vec3& bbox_min() const { return bbox_min_; }
  [[nodiscard]] const Vec3& bbox_max() const { return bbox_max_; }
  [[nodiscard]] double bbox_diag() const { return bbox_diag_; }
  [[nodiscard]] double longest_edge() const { return longest_edge_; }

 private:
  std::vector<Vec3> vertices_;
  std::vector<Triangle> faces_;
  std::vector<Vec3> face_normals_;
  std::vector<Vec3> centroids_;
  std::vector<double> areas_;
  // CSR layout: faces incident to vertex v are
  // vertex_faces_[vertex_offsets_[v] .. vertex_offsets_[v+1]).
  std::vector<std::int32_t> vertex_offsets_;
  std::vector<FaceId> vertex_faces_;
  Vec3 bbox_min_ = Vec3::Zero();
  Vec3 bbox_max_ = Vec3::Zero();
  double bbox_diag_ = 0.0;
  double longest_edge_ = 0.0;
  double total_area_ = 0.0;
  double signed_volume_ = 0.0;
  double orientation_ = -1.0;
};

/// Sample sites constrained to the mesh surface.
struct SiteSet {
  std::vector<Vec3> positions;
  std::vector<FaceId> host_facet;

  [[nodiscard]] std::size_t size() const { return positions.size(); }
};

/// Reads an ASCII Wavefront OBJ. Only `v` and `f` records are used; faces
/// with more than three corners are fan-triangulated, negative (relative)
/// indices are resolved, and `vt`/`vn` references inside `f` are ignored.
TriangleMesh load_mesh(const std::filesystem::path& path);

/// Writes `v x y z` (9 significant digits) and 1-based `f i j k` records.
/// Throws MeshError for a mesh without faces or an unwritable path; nothing is
/// written in either case.
void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path);

/// Serializes the same text save_mesh would write.
std::string to_obj_string(const TriangleMesh& mesh);

/// Per-face unit normals (v3 - v1) x (v2 - v1) / |...|. Throws MeshError naming
/// the first face whose area is below 1e-12 * bbox_diag^2.
std::vector<Vec3> compute_face_normals(std::span<const Vec3> vertices, std::span<const Triangle> faces);

/// Faces sharing at least one vertex with `facet` (depth 1), or with `facet`
/// or any depth-1 face (depth 2). `facet` itself is never included. The result
/// is sorted by face id.
std::vector<FaceId> face_ring(const TriangleMesh& mesh, FaceId facet, int depth);

struct ClosestPoint {
  Vec3 point;
  double distance = 0.0;
};

/// Exact closest point of the closed triangle (a, b, c) to p.
ClosestPoint point_triangle_closest(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Area-weighted random surface points, deterministic in `seed`. Works for any
/// n >= 1; used both for initial sites and for distance sampling.
SiteSet sample_surface_points(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed);

/// Initial CVT sites. Requires n >= 4.
SiteSet sample_uniform(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed);

/// Checks the on-surface contract: within `tolerance` of the host plane and
/// with barycentric coordinates in [0, 1] (up to the same tolerance).
bool site_on_host_facet(const TriangleMesh& mesh, const Vec3& p, FaceId host, double tolerance);

}  // namespace facetcvt
