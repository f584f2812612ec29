#pragma once

#include "facetcvt/convex_cell.hpp"
#include "facetcvt/mesh.hpp"

#include <vector>

namespace facetcvt {

/// Original facets that may intersect a site's cell: the two-ring of the host
/// facet, capped to centroids within 2 * d_max of the host centroid.
struct NeighborFacetSet {
  std::vector<FaceId> facets;  // sorted, host excluded
  double d_max = 0.0;
};

/// How many original-facet planes clip a cell, and which ones.
struct ClipDecision {
  int level = 1;
  FaceId f_t = kNoFace;
  FaceId f_u = kNoFace;
  FaceId f_v = kNoFace;
  double score_u = 0.0;  // scoreA of f_u (level >= 2)
  double score_v = 0.0;  // full scoreB of f_v (level 3)

  [[nodiscard]] bool valid() const;
};

/// Cross-section polygons kept after facet clipping, one per surviving plane.
struct ClippedFacets {
  std::vector<std::vector<Vec3>> polygons;
  std::vector<FaceId> facets;
  std::vector<double> areas;
  std::vector<Vec3> centroids;

  [[nodiscard]] std::size_t m() const { return polygons.size(); }
  [[nodiscard]] double total_area() const;
};

enum class ClipStatus {
  Ok,
  FellBackToLevel1,  // the host cross-section vanished under the extra clips
  EmptyAfterHost,    // the host plane removed the whole cell
  NoCrossSection,    // even the single host clip left no polygon
};

struct ClipOutcome {
  ClippedFacets facets;
  ClipStatus status = ClipStatus::Ok;
  int applied_level = 1;
};

NeighborFacetSet build_fnear(const TriangleMesh& mesh, FaceId host, double d_max);

/// |cos| of the angle between the normals of two faces.
double abs_normal_cosine(const TriangleMesh& mesh, FaceId a, FaceId b);

/// scoreA for `candidate` relative to the host: |cos A| + disA / d_max.
double score_a(const TriangleMesh& mesh, FaceId host, FaceId candidate, double d_max);

/// Candidate-dependent part of scoreB: |cos B| + disB/d_max + |cos C| + disC/d_max,
/// where B is measured against the host and C against the second facet.
double score_b_candidate_part(const TriangleMesh& mesh, FaceId host, FaceId second, FaceId candidate, double d_max);

/// Argmin of scoreA over facets with |cos| < alpha against the host; ties go
/// to the lower face id. Throws InvalidArgument when nothing is eligible.
FaceId select_second_facet(const TriangleMesh& mesh, const NeighborFacetSet& fnear, FaceId host, double alpha,
                           double d_max);

/// Argmin of scoreB over facets with |cos| < beta against both host and
/// second. The scoreA terms of the already chosen second facet are a common
/// constant and do not affect the choice.
FaceId select_third_facet(const TriangleMesh& mesh, const NeighborFacetSet& fnear, FaceId host, FaceId second,
                          double beta, double d_max);

/// Level 1 when every neighbour facet is within the alpha cone of the host,
/// level 2 otherwise, level 3 when some facet is below beta against both the
/// host and the second facet. Never exceeds `max_clips`.
ClipDecision curvature_level(const TriangleMesh& mesh, const NeighborFacetSet& fnear, FaceId host, double alpha,
                             double beta, int max_clips = 3);

/// Clips `cell` by the planes of f_t, f_u, f_v in that order and reads back
/// the cross-section on each plane. Polygons below 1e-12 * bbox_diag^2 are
/// dropped. If the host cross-section is lost, the host-only result is used.
ClipOutcome clip_cell_by_facets(const ConvexCell& cell, const ClipDecision& decision, const TriangleMesh& mesh);

}  // namespace facetcvt
