#pragma once

#include "facetcvt/mesh.hpp"
#include "facetcvt/spatial_index.hpp"

#include <string>

namespace facetcvt {

/// (6/sqrt(3)) * A / (S * E): 1 for equilateral, 0 for degenerate triangles.
double triangle_quality(const Vec3& a, const Vec3& b, const Vec3& c);

struct QualityStats {
  double q_min = 0.0;
  double q_avg = 0.0;
};

QualityStats quality_stats(const TriangleMesh& mesh);

struct AngleStats {
  double theta_min = 0.0;  // degrees
  double theta_max = 0.0;
  double lt30 = 0.0;  // fraction of corner angles strictly below 30 degrees
  double gt90 = 0.0;  // fraction strictly above 90 degrees
};

AngleStats angle_stats(const TriangleMesh& mesh);

/// Corner angles of one triangle, in degrees, at a, b and c.
std::array<double, 3> corner_angles(const Vec3& a, const Vec3& b, const Vec3& c);

struct SurfaceDistance {
  double hausdorff = 0.0;  // raw, in model units
  double rms = 0.0;
};

/// Two-sided sampled distance: `samples` area-uniform points on each mesh,
/// each measured exactly against the other mesh.
SurfaceDistance surface_distance(const TriangleMesh& a, const TriangleMesh& b, std::size_t samples,
                                 std::uint64_t seed = 42, unsigned threads = 0);

/// Exact point-to-mesh distance. Candidates are the faces of every vertex
/// within (nearest-vertex distance + longest edge) of the query.
class MeshDistance {
 public:
  explicit MeshDistance(const TriangleMesh& mesh);
  [[nodiscard]] double operator()(const Vec3& p) const;

 private:
  const TriangleMesh* mesh_;
  PointIndex index_;
};

struct QualityReport {
  double q_min = 0.0;
  double q_avg = 0.0;
  double theta_min = 0.0;
  double theta_max = 0.0;
  double theta_lt30 = 0.0;
  double theta_gt90 = 0.0;
  double d_h = 0.0;  // Hausdorff / input bbox_diag, in units of 1e-2
  double rms = 0.0;  // same scaling
  double t = 0.0;    // seconds
  double q_up = 0.0;          // percent
  double q_up_per_t = 0.0;    // percent per second
  std::size_t n_in = 0;
  std::size_t n_out = 0;
};

/// (out - in) / in * 100.
double quality_improvement(double q_avg_in, double q_avg_out);

/// Full report for an input/output pair. Throws InvalidArgument when T <= 0
/// or samples is zero.
QualityReport quality_report(const TriangleMesh& input, const TriangleMesh& output, double T,
                             std::size_t samples = 100000, std::uint64_t seed = 42, unsigned threads = 0);

/// Flat JSON object keyed Q_min, Q_avg, theta_min, theta_max, theta_lt30,
/// theta_gt90, d_H, RMS, T, Q_up, Q_up_per_T, n_in, n_out.
std::string report_to_json(const QualityReport& r);

/// Parses the object written by report_to_json. Throws InvalidArgument on a
/// missing key.
QualityReport report_from_json(const std::string& text);

/// Header plus one aligned row in the column order
/// n | Q_min | Q_avg | theta_min | theta_max | <30 | >90 | d_H | RMS | T | Q_up | Q_up/T.
std::string report_table(const QualityReport& r);

}  // namespace facetcvt
