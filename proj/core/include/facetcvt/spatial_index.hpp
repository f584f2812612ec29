#pragma once

#include "facetcvt/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace facetcvt {

struct Neighbor {
  std::int32_t id = -1;
  double distance = 0.0;
};

/// Exact k-nearest-neighbour index over a fixed point set (kd-tree, median
/// splits). Results are ordered by (distance, id), so they agree exactly with
/// a sorted brute-force scan. Immutable after construction; concurrent
/// queries are safe.
class PointIndex {
 public:
  PointIndex() = default;

  /// Throws InvalidArgument for an empty point list.
  explicit PointIndex(std::vector<Vec3> points);

  [[nodiscard]] std::size_t size() const { return points_.size(); }
  [[nodiscard]] const Vec3& point(std::int32_t id) const { return points_[static_cast<std::size_t>(id)]; }
  [[nodiscard]] std::span<const Vec3> points() const { return points_; }

  /// The k nearest stored points to q, skipping `exclude` if given.
  /// Throws InvalidArgument when k exceeds the number of eligible points.
  [[nodiscard]] std::vector<Neighbor> knn(const Vec3& q, std::size_t k,
                                          std::optional<std::int32_t> exclude = std::nullopt) const;

  /// Same as knn but writes into `out` (cleared first), for hot loops.
  void knn(const Vec3& q, std::size_t k, std::optional<std::int32_t> exclude, std::vector<Neighbor>& out) const;

  /// All points with distance <= radius, ordered by (distance, id).
  [[nodiscard]] std::vector<Neighbor> within_radius(const Vec3& q, double radius) const;

 private:
  struct Node {
    // Leaf when count > 0: points perm_[begin, begin+count).
    double split = 0.0;
    std::int32_t begin = 0;
    std::int32_t count = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int8_t axis = 0;
  };

  std::int32_t build(std::int32_t begin, std::int32_t end, int depth);

  std::vector<Vec3> points_;
  std::vector<std::int32_t> perm_;
  std::vector<Node> nodes_;
};

/// Reference scan used by tests and benchmarks: sort every point by
/// (distance, id) and take the first k.
std::vector<Neighbor> brute_force_knn(std::span<const Vec3> points, const Vec3& q, std::size_t k,
                                      std::optional<std::int32_t> exclude = std::nullopt);

}  // namespace facetcvt
