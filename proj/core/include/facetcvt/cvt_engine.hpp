#pragma once

#include "facetcvt/adaptive_clipper.hpp"
#include "facetcvt/convex_cell.hpp"
#include "facetcvt/mesh.hpp"
#include "facetcvt/spatial_index.hpp"

#include <array>
#include <functional>
#include <limits>
#include <vector>

namespace facetcvt {

struct Config {
  std::size_t n = 1000;          // site count
  double alpha = 0.8;            // level-2 cosine threshold
  double beta = 0.7;             // level-3 cosine threshold
  int max_clips = 3;             // 1..3
  std::size_t knn = 24;          // neighbours per Voronoi cell
  double epsilon = 1e-4;         // stop when delta <= epsilon
  std::size_t max_iterations = 100;
  std::size_t k_proj = 8;        // mesh vertices gathered for projection
  std::uint64_t seed = 42;
  double padding = 0.05;         // bounding-box pad, fraction of bbox_diag
  unsigned threads = 0;          // 0 = hardware concurrency

  /// Throws InvalidArgument describing the first bad field.
  void validate() const;
};

/// Per-site outcome of one Lloyd step; used for verbose diagnostics.
struct SiteDiagnostics {
  ClipDecision decision;
  ClipStatus status = ClipStatus::Ok;
  int applied_level = 1;
  bool secured = true;
  bool escalated = false;
  std::size_t neighbors_used = 0;
  double d_max = 0.0;
};

struct IterationStats {
  std::size_t iteration = 0;
  double delta = 0.0;  // max site displacement / bbox_diag
  std::array<std::size_t, 3> level_counts{};
  std::size_t unsecured = 0;
  std::size_t escalated = 0;
  std::size_t fallbacks = 0;  // sites whose clip fell back or produced nothing
  double seconds = 0.0;
};

struct Projection {
  Vec3 point;
  FaceId face = kNoFace;
  double distance = 0.0;
};

/// Area-weighted mean of the polygon centroids. Throws InvalidArgument when
/// the total area is zero.
Vec3 centroid_of_clipped(const ClippedFacets& cf);

/// Closest point among the triangles incident to the k_proj mesh vertices
/// nearest to p (ties to the lower face id).
Projection project_to_surface(const Vec3& p, const TriangleMesh& mesh, const PointIndex& vertex_index,
                              std::size_t k_proj);

/// Read-only data shared by every iteration of a run.
class RemeshContext {
 public:
  RemeshContext(const TriangleMesh& mesh, Config cfg);

  [[nodiscard]] const TriangleMesh& mesh() const { return *mesh_; }
  [[nodiscard]] const Config& config() const { return cfg_; }
  [[nodiscard]] const PointIndex& vertex_index() const { return vertex_index_; }
  [[nodiscard]] const ConvexCell& bounds() const { return bounds_; }

 private:
  const TriangleMesh* mesh_;
  Config cfg_;
  PointIndex vertex_index_;
  ConvexCell bounds_;
};

/// One Lloyd step over all sites. `diagnostics`, when non-null, receives one
/// entry per site.
std::pair<SiteSet, IterationStats> lloyd_iterate(const SiteSet& sites, const RemeshContext& ctx,
                                                 std::vector<SiteDiagnostics>* diagnostics = nullptr);

std::pair<SiteSet, IterationStats> lloyd_iterate(const SiteSet& sites, const TriangleMesh& mesh, const Config& cfg);

struct RemeshResult {
  SiteSet initial_sites;
  SiteSet sites;
  std::vector<IterationStats> trace;
  double sampling_seconds = 0.0;
  double iteration_seconds = 0.0;
};

/// Called after each iteration with its stats and (when requested through
/// RemeshObserver::want_diagnostics) the per-site diagnostics.
struct RemeshObserver {
  std::function<void(const IterationStats&, const std::vector<SiteDiagnostics>&)> on_iteration;
  bool want_diagnostics = false;
};

/// Samples cfg.n sites and runs Lloyd steps while delta > epsilon and fewer
/// than max_iterations steps were taken. Throws Error if a site becomes
/// non-finite.
RemeshResult run_remesh(const TriangleMesh& mesh, const Config& cfg, const RemeshObserver* observer = nullptr);

}  // namespace facetcvt
