#include "facetcvt/cvt_engine.hpp"

#include "facetcvt/parallel.hpp"

#include <chrono>
#include <cmath>

namespace facetcvt {

void Config::validate() const {
  auto fail = [](const std::string& msg) { throw InvalidArgument("invalid config: " + msg); };
  if (n < 4) fail("site count must be >= 4");
  // alpha = 0 is allowed: it forces every site to level 1.
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha must lie in [0, 1]");
  if (!(beta > 0.0 && beta <= 1.0)) fail("beta must lie in (0, 1]");
  if (max_clips < 1 || max_clips > 3) fail("max_clips must be 1, 2 or 3");
  if (knn < 1) fail("knn must be >= 1");
  if (k_proj < 1) fail("k_proj must be >= 1");
  if (!(epsilon >= 0.0)) fail("epsilon must be non-negative");
  if (!(padding > 0.0)) fail("padding must be positive");
}

Vec3 centroid_of_clipped(const ClippedFacets& cf) {
  double area = 0.0;
  Vec3 weighted = Vec3::Zero();
  for (std::size_t j = 0; j < cf.m(); ++j) {
    area += cf.areas[j];
    weighted += cf.areas[j] * cf.centroids[j];
  }
  if (!(area > 0.0)) throw InvalidArgument("centroid_of_clipped: zero total area");
  return weighted / area;
}

Projection project_to_surface(const Vec3& p, const TriangleMesh& mesh, const PointIndex& vertex_index,
                              std::size_t k_proj) {
  thread_local std::vector<Neighbor> near;
  thread_local std::vector<FaceId> candidates;
  vertex_index.knn(p, std::min(k_proj, vertex_index.size()), std::nullopt, near);
  candidates.clear();
  for (const Neighbor& nb : near) {
    for (FaceId f : mesh.faces_of_vertex(nb.id)) candidates.push_back(f);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  Projection best{p, kNoFace, std::numeric_limits<double>::infinity()};
  for (FaceId f : candidates) {
    const auto [a, b, c] = mesh.corners(f);
    const ClosestPoint cp = point_triangle_closest(p, a, b, c);
    // Ascending face order makes the strict comparison a lowest-id tie-break.
    if (cp.distance < best.distance) best = {cp.point, f, cp.distance};
  }
  return best;
}

RemeshContext::RemeshContext(const TriangleMesh& mesh, Config cfg)
    : mesh_(&mesh),
      cfg_(cfg),
      vertex_index_(std::vector<Vec3>(mesh.vertices().begin(), mesh.vertices().end())),
      bounds_(init_bounding_cell(mesh, cfg.padding)) {
  cfg_.validate();
}

namespace {

struct SiteUpdate {
  Vec3 position;
  FaceId host = kNoFace;
  SiteDiagnostics diag;
};

double max_polygon_radius(const ClippedFacets& cf, const Vec3& s) {
  double r2 = 0.0;
  for (const auto& poly : cf.polygons) {
    for (const Vec3& v : poly) r2 = std::max(r2, (v - s).squaredNorm());
  }
  return std::sqrt(r2);
}

struct CellAttempt {
  VoronoiCell voronoi;
  ClipDecision decision;
  ClipOutcome outcome;
  bool secured = false;
};

CellAttempt attempt(SiteId i, const SiteSet& sites, const PointIndex& index, std::size_t K,
                    const RemeshContext& ctx) {
  const TriangleMesh& mesh = ctx.mesh();
  const Config& cfg = ctx.config();
  CellAttempt a;
  a.voronoi = compute_voronoi_cell(i, sites.positions, index, K, ctx.bounds());
  const FaceId host = sites.host_facet[static_cast<std::size_t>(i)];
  const double d_max = a.voronoi.d_max > 0.0 ? a.voronoi.d_max : mesh.bbox_diag();
  const NeighborFacetSet fnear = build_fnear(mesh, host, d_max);
  a.decision = curvature_level(mesh, fnear, host, cfg.alpha, cfg.beta, cfg.max_clips);
  a.outcome = clip_cell_by_facets(a.voronoi.cell, a.decision, mesh);
  // Only the retained cross-sections feed the update, so they are complete
  // once no unapplied neighbour is close enough to cut them.
  a.secured = a.voronoi.secured ||
              a.voronoi.next_distance > 2.0 * max_polygon_radius(a.outcome.facets,
                                                                 sites.positions[static_cast<std::size_t>(i)]);
  return a;
}

SiteUpdate update_site(SiteId i, const SiteSet& sites, const PointIndex& index, const RemeshContext& ctx) {
  const Config& cfg = ctx.config();
  CellAttempt a = attempt(i, sites, index, cfg.knn, ctx);
  bool escalated = false;
  if (!a.secured && cfg.knn < sites.size() - 1) {
    a = attempt(i, sites, index, 2 * cfg.knn, ctx);
    escalated = true;
  }

  SiteUpdate u;
  u.diag.decision = a.decision;
  u.diag.status = a.outcome.status;
  u.diag.applied_level = a.outcome.applied_level;
  u.diag.secured = a.secured;
  u.diag.escalated = escalated;
  u.diag.neighbors_used = a.voronoi.neighbors_used;
  u.diag.d_max = a.voronoi.d_max;

  const Vec3& s = sites.positions[static_cast<std::size_t>(i)];
  const Vec3 target = a.outcome.facets.total_area() > 0.0 ? centroid_of_clipped(a.outcome.facets) : s;
  const Projection proj = project_to_surface(target, ctx.mesh(), ctx.vertex_index(), cfg.k_proj);
  u.position = proj.point;
  u.host = proj.face;
  return u;
}

}  // namespace

std::pair<SiteSet, IterationStats> lloyd_iterate(const SiteSet& sites, const RemeshContext& ctx,
                                                 std::vector<SiteDiagnostics>* diagnostics) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = sites.size();
  const PointIndex index(sites.positions);

  std::vector<SiteUpdate> updates(n);
  parallel_for(n, ctx.config().threads,
               [&](std::size_t i) { updates[i] = update_site(static_cast<SiteId>(i), sites, index, ctx); });

  SiteSet next;
  next.positions.resize(n);
  next.host_facet.resize(n);
  IterationStats stats;
  double max_move = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const SiteUpdate& u = updates[i];
    if (!u.position.allFinite()) {
      throw Error("site " + std::to_string(i) + " became non-finite during a Lloyd step");
    }
    next.positions[i] = u.position;
    next.host_facet[i] = u.host;
    max_move = std::max(max_move, (u.position - sites.positions[i]).norm());
    ++stats.level_counts[static_cast<std::size_t>(u.diag.decision.level - 1)];
    if (!u.diag.secured) ++stats.unsecured;
    if (u.diag.escalated) ++stats.escalated;
    if (u.diag.status != ClipStatus::Ok) ++stats.fallbacks;
  }
  stats.delta = max_move / ctx.mesh().bbox_diag();
  stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (diagnostics) {
    diagnostics->clear();
    diagnostics->reserve(n);
    for (const SiteUpdate& u : updates) diagnostics->push_back(u.diag);
  }
  return {std::move(next), stats};
}

std::pair<SiteSet, IterationStats> lloyd_iterate(const SiteSet& sites, const TriangleMesh& mesh, const Config& cfg) {
  const RemeshContext ctx(mesh, cfg);
  return lloyd_iterate(sites, ctx);
}

RemeshResult run_remesh(const TriangleMesh& mesh, const Config& cfg, const RemeshObserver* observer) {
  using clock = std::chrono::steady_clock;
  const RemeshContext ctx(mesh, cfg);
  RemeshResult result;

  const auto t0 = clock::now();
  result.initial_sites = sample_uniform(mesh, cfg.n, cfg.seed);
  result.sites = result.initial_sites;
  const auto t1 = clock::now();
  result.sampling_seconds = std::chrono::duration<double>(t1 - t0).count();

  std::vector<SiteDiagnostics> diagnostics;
  const bool want_diag = observer && observer->want_diagnostics;
  double delta = std::numeric_limits<double>::infinity();
  std::size_t it = 0;
  while (delta > cfg.epsilon && it < cfg.max_iterations) {
    auto [next, stats] = lloyd_iterate(result.sites, ctx, want_diag ? &diagnostics : nullptr);
    stats.iteration = it;
    delta = stats.delta;
    if (!std::isfinite(delta)) throw Error("non-finite displacement at iteration " + std::to_string(it));
    result.sites = std::move(next);
    result.trace.push_back(stats);
    if (observer && observer->on_iteration) observer->on_iteration(stats, diagnostics);
    ++it;
  }
  result.iteration_seconds = std::chrono::duration<double>(clock::now() - t1).count();
  return result;
}

}  // namespace facetcvt
