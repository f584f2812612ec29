#pragma once

#include "facetcvt/mesh.hpp"
#include "facetcvt/spatial_index.hpp"

#include <vector>

namespace facetcvt {

/// Label of one edge of an RVD piece: part of the original facet boundary
/// (edge e runs from corner e to corner e+1) or the bisector with site `id`.
struct RvdEdgeLabel {
  enum class Kind : std::uint8_t { FacetEdge, Bisector };
  Kind kind = Kind::FacetEdge;
  std::int32_t id = 0;

  friend bool operator==(const RvdEdgeLabel&, const RvdEdgeLabel&) = default;
};

/// Part of one facet closest to `site`. Edge k joins polygon[k] and
/// polygon[k+1] and carries edges[k].
struct RvdPiece {
  SiteId site = -1;
  std::vector<Vec3> polygon;
  std::vector<RvdEdgeLabel> edges;
  double area = 0.0;
};

/// The surface partitioned by nearest site: per original facet, the convex
/// pieces that tile it.
struct RestrictedVoronoiDiagram {
  const TriangleMesh* mesh = nullptr;
  std::size_t site_count = 0;
  std::vector<std::vector<RvdPiece>> facets;

  /// Sorted, unique pairs (i, j), i < j, of sites whose pieces share an edge.
  [[nodiscard]] std::vector<std::pair<SiteId, SiteId>> adjacency() const;
};

/// Restricted Voronoi diagram of `sites` on `mesh`. Each facet is seeded with
/// the site nearest its centroid and flooded across bisector edges; every
/// piece is cut in the facet's own 2D frame by the bisectors of its site's
/// neighbours until the security radius closes it (K is doubled as needed).
RestrictedVoronoiDiagram compute_rvd(const TriangleMesh& mesh, const SiteSet& sites, const PointIndex& index,
                                     std::size_t K = 24, unsigned threads = 0);

struct DualStats {
  std::size_t triangles = 0;
  std::size_t corners_fan_split = 0;  // corners where four or more regions met
  std::size_t degenerate_dropped = 0;
  std::size_t sites_without_region = 0;
  std::size_t non_manifold_edges = 0;  // edges used by more than two triangles
};

/// Triangle per RVD corner where three regions meet; corners with more
/// regions are fanned from the lowest site id in cyclic order. Triangles take
/// the winding of the facet they were found on. Sites owning no region are
/// dropped and the rest re-indexed in ascending id order. Throws Error on an
/// empty diagram.
TriangleMesh dual_triangulate(const RestrictedVoronoiDiagram& rvd, const SiteSet& sites, DualStats* stats = nullptr);

/// Number of undirected edges referenced by more than two faces.
std::size_t count_non_manifold_edges(const TriangleMesh& mesh);

}  // namespace facetcvt
