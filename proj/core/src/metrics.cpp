#include "facetcvt/metrics.hpp"

#include "facetcvt/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace facetcvt {

double triangle_quality(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double la = (b - c).norm();
  const double lb = (c - a).norm();
  const double lc = (a - b).norm();
  const double area = 0.5 * (b - a).cross(c - a).norm();
  const double s = 0.5 * (la + lb + lc);
  const double e = std::max({la, lb, lc});
  if (!(area > 0.0) || !(s * e > 0.0)) return 0.0;
  return std::clamp(6.0 / std::sqrt(3.0) * area / (s * e), 0.0, 1.0);
}

QualityStats quality_stats(const TriangleMesh& mesh) {
  QualityStats st;
  if (mesh.face_count() == 0) return st;
  st.q_min = 1.0;
  double sum = 0.0;
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    const auto [a, b, c] = mesh.corners(static_cast<FaceId>(f));
    const double q = triangle_quality(a, b, c);
    st.q_min = std::min(st.q_min, q);
    sum += q;
  }
  st.q_avg = sum / static_cast<double>(mesh.face_count());
  return st;
}

std::array<double, 3> corner_angles(const Vec3& a, const Vec3& b, const Vec3& c) {
  auto angle = [](const Vec3& p, const Vec3& q, const Vec3& r) {
    const Vec3 u = q - p;
    const Vec3 v = r - p;
    return std::atan2(u.cross(v).norm(), u.dot(v)) * 180.0 / std::numbers::pi;
  };
  return {angle(a, b, c), angle(b, c, a), angle(c, a, b)};
}

AngleStats angle_stats(const TriangleMesh& mesh) {
  AngleStats st;
  if (mesh.face_count() == 0) return st;
  st.theta_min = 180.0;
  std::size_t lt = 0;
  std::size_t gt = 0;
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    const auto [a, b, c] = mesh.corners(static_cast<FaceId>(f));
    for (double t : corner_angles(a, b, c)) {
      st.theta_min = std::min(st.theta_min, t);
      st.theta_max = std::max(st.theta_max, t);
      if (t < 30.0) ++lt;
      if (t > 90.0) ++gt;
    }
  }
  const double corners = 3.0 * static_cast<double>(mesh.face_count());
  st.lt30 = static_cast<double>(lt) / corners;
  st.gt90 = static_cast<double>(gt) / corners;
  return st;
}

MeshDistance::MeshDistance(const TriangleMesh& mesh)
    : mesh_(&mesh), index_(std::vector<Vec3>(mesh.vertices().begin(), mesh.vertices().end())) {}

double MeshDistance::operator()(const Vec3& p) const {
  const double dv = index_.knn(p, 1).front().distance;
  const auto near = index_.within_radius(p, dv + mesh_->longest_edge());
  thread_local std::vector<FaceId> faces;
  faces.clear();
  for (const Neighbor& nb : near) {
    for (FaceId f : mesh_->faces_of_vertex(nb.id)) faces.push_back(f);
  }
  std::sort(faces.begin(), faces.end());
  faces.erase(std::unique(faces.begin(), faces.end()), faces.end());
  double best = dv;
  for (FaceId f : faces) {
    const auto [a, b, c] = mesh_->corners(f);
    best = std::min(best, point_triangle_closest(p, a, b, c).distance);
  }
  return best;
}

namespace {

bool same_mesh(const TriangleMesh& a, const TriangleMesh& b) {
  return std::equal(a.vertices().begin(), a.vertices().end(), b.vertices().begin(), b.vertices().end()) &&
         std::equal(a.faces().begin(), a.faces().end(), b.faces().begin(), b.faces().end());
}

}  // namespace

SurfaceDistance surface_distance(const TriangleMesh& a, const TriangleMesh& b, std::size_t samples,
                                 std::uint64_t seed, unsigned threads) {
  if (samples == 0) throw InvalidArgument("surface_distance: samples must be positive");
  if (a.face_count() == 0 || b.face_count() == 0) throw InvalidArgument("surface_distance: empty mesh");
  // A sample lying on a face does not always round back to distance 0.
  if (same_mesh(a, b)) return {};

  const SiteSet on_a = sample_surface_points(a, samples, seed);
  const SiteSet on_b = sample_surface_points(b, samples, seed ^ 0x9e3779b97f4a7c15ULL);
  const MeshDistance to_a(a);
  const MeshDistance to_b(b);
  std::vector<double> d(2 * samples);
  parallel_for(2 * samples, threads, [&](std::size_t i) {
    d[i] = i < samples ? to_b(on_a.positions[i]) : to_a(on_b.positions[i - samples]);
  });
  SurfaceDistance out;
  double sum2 = 0.0;
  for (double x : d) {
    out.hausdorff = std::max(out.hausdorff, x);
    sum2 += x * x;
  }
  out.rms = std::sqrt(sum2 / static_cast<double>(d.size()));
  return out;
}

double quality_improvement(double q_avg_in, double q_avg_out) {
  if (!(q_avg_in > 0.0)) throw InvalidArgument("input Q_avg must be positive");
  return (q_avg_out - q_avg_in) / q_avg_in * 100.0;
}

QualityReport quality_report(const TriangleMesh& input, const TriangleMesh& output, double T, std::size_t samples,
                             std::uint64_t seed, unsigned threads) {
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidArgument("T must be a positive number of seconds");
  const QualityStats qi = quality_stats(input);
  const QualityStats qo = quality_stats(output);
  const AngleStats ang = angle_stats(output);
  const SurfaceDistance dist = surface_distance(input, output, samples, seed, threads);
  const double scale = 100.0 / input.bbox_diag();

  QualityReport r;
  r.q_min = qo.q_min;
  r.q_avg = qo.q_avg;
  r.theta_min = ang.theta_min;
  r.theta_max = ang.theta_max;
  r.theta_lt30 = ang.lt30;
  r.theta_gt90 = ang.gt90;
  r.d_h = dist.hausdorff * scale;
  r.rms = dist.rms * scale;
  r.t = T;
  r.q_up = quality_improvement(qi.q_avg, qo.q_avg);
  r.q_up_per_t = r.q_up / T;
  r.n_in = input.vertex_count();
  r.n_out = output.vertex_count();
  return r;
}

std::string report_to_json(const QualityReport& r) {
  nlohmann::ordered_json j;
  j["Q_min"] = r.q_min;
  j["Q_avg"] = r.q_avg;
  j["theta_min"] = r.theta_min;
  j["theta_max"] = r.theta_max;
  j["theta_lt30"] = r.theta_lt30;
  j["theta_gt90"] = r.theta_gt90;
  j["d_H"] = r.d_h;
  j["RMS"] = r.rms;
  j["T"] = r.t;
  j["Q_up"] = r.q_up;
  j["Q_up_per_T"] = r.q_up_per_t;
  j["n_in"] = r.n_in;
  j["n_out"] = r.n_out;
  return j.dump(2) + "\n";
}

QualityReport report_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  auto get = [&](const char* key) {
    if (!j.contains(key)) throw InvalidArgument(std::string("report is missing \"") + key + "\"");
    return j.at(key);
  };
  QualityReport r;
  r.q_min = get("Q_min").get<double>();
  r.q_avg = get("Q_avg").get<double>();
  r.theta_min = get("theta_min").get<double>();
  r.theta_max = get("theta_max").get<double>();
  r.theta_lt30 = get("theta_lt30").get<double>();
  r.theta_gt90 = get("theta_gt90").get<double>();
  r.d_h = get("d_H").get<double>();
  r.rms = get("RMS").get<double>();
  r.t = get("T").get<double>();
  r.q_up = get("Q_up").get<double>();
  r.q_up_per_t = get("Q_up_per_T").get<double>();
  r.n_in = get("n_in").get<std::size_t>();
  r.n_out = get("n_out").get<std::size_t>();
  return r;
}

std::string report_table(const QualityReport& r) {
  char buf[512];
  std::string out;
  std::snprintf(buf, sizeof buf, "%8s %7s %7s %8s %8s %7s %7s %7s %7s %8s %8s %8s\n", "n", "Q_min", "Q_avg",
                "th_min", "th_max", "<30", ">90", "d_H", "RMS", "T(s)", "Q_up(%)", "Q_up/T");
  out += buf;
  std::snprintf(buf, sizeof buf, "%8zu %7.3f %7.3f %8.3f %8.3f %7.3f %7.3f %7.3f %7.3f %8.3f %8.3f %8.3f\n", r.n_out,
                r.q_min, r.q_avg, r.theta_min, r.theta_max, r.theta_lt30, r.theta_gt90, r.d_h, r.rms, r.t, r.q_up,
                r.q_up_per_t);
  out += buf;
  return out;
}

}  // namespace facetcvt
