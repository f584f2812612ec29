#include "facetcvt/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace facetcvt {

namespace {

constexpr std::int32_t kLeafSize = 8;

// Candidate ordering shared by the tree and the brute-force scan.
struct Candidate {
  double d2;
  std::int32_t id;
  friend bool operator<(const Candidate& a, const Candidate& b) {
    return a.d2 < b.d2 || (a.d2 == b.d2 && a.id < b.id);
  }
};

// Bounded max-heap keeping the k best candidates.
class BestK {
 public:
  explicit BestK(std::size_t k) : k_(k) { heap_.reserve(k + 1); }

  [[nodiscard]] bool full() const { return heap_.size() == k_; }
  [[nodiscard]] double worst_d2() const { return heap_.front().d2; }

  void offer(const Candidate& c) {
    if (!full()) {
      heap_.push_back(c);
      std::push_heap(heap_.begin(), heap_.end());
    } else if (c < heap_.front()) {
      std::pop_heap(heap_.begin(), heap_.end());
      heap_.back() = c;
      std::push_heap(heap_.begin(), heap_.end());
    }
  }

  void drain_sorted(std::vector<Neighbor>& out) {
    std::sort_heap(heap_.begin(), heap_.end());
    out.clear();
    out.reserve(heap_.size());
    for (const Candidate& c : heap_) out.push_back({c.id, std::sqrt(c.d2)});
  }

 private:
  std::size_t k_;
  std::vector<Candidate> heap_;
};

}  // namespace

PointIndex::PointIndex(std::vector<Vec3> points) : points_(std::move(points)) {
  if (points_.empty()) throw InvalidArgument("PointIndex needs at least one point");
  perm_.resize(points_.size());
  std::iota(perm_.begin(), perm_.end(), 0);
  nodes_.reserve(2 * points_.size() / kLeafSize + 2);
  build(0, static_cast<std::int32_t>(points_.size()), 0);
}

std::int32_t PointIndex::build(std::int32_t begin, std::int32_t end, int depth) {
  const auto node_id = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();
  if (end - begin <= kLeafSize) {
    nodes_[static_cast<std::size_t>(node_id)].begin = begin;
    nodes_[static_cast<std::size_t>(node_id)].count = end - begin;
    return node_id;
  }

  // Split the widest extent at the median.
  Vec3 lo = points_[static_cast<std::size_t>(perm_[static_cast<std::size_t>(begin)])];
  Vec3 hi = lo;
  for (std::int32_t i = begin; i < end; ++i) {
    const Vec3& p = points_[static_cast<std::size_t>(perm_[static_cast<std::size_t>(i)])];
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  Eigen::Index axis = 0;
  (hi - lo).maxCoeff(&axis);
  (void)depth;

  const std::int32_t mid = begin + (end - begin) / 2;
  std::nth_element(perm_.begin() + begin, perm_.begin() + mid, perm_.begin() + end,
                   [&](std::int32_t a, std::int32_t b) {
                     const double pa = points_[static_cast<std::size_t>(a)][axis];
                     const double pb = points_[static_cast<std::size_t>(b)][axis];
                     return pa < pb || (pa == pb && a < b);
                   });
  const double split = points_[static_cast<std::size_t>(perm_[static_cast<std::size_t>(mid)])][axis];

  const std::int32_t left = build(begin, mid, depth + 1);
  const std::int32_t right = build(mid, end, depth + 1);
  Node& node = nodes_[static_cast<std::size_t>(node_id)];
  node.axis = static_cast<std::int8_t>(axis);
  node.split = split;
  node.left = left;
  node.right = right;
  return node_id;
}

void PointIndex::knn(const Vec3& q, std::size_t k, std::optional<std::int32_t> exclude,
                     std::vector<Neighbor>& out) const {
  std::size_t eligible = points_.size();
  if (exclude && *exclude >= 0 && static_cast<std::size_t>(*exclude) < points_.size()) --eligible;
  if (k > eligible) {
    throw InvalidArgument("knn: k=" + std::to_string(k) + " exceeds " + std::to_string(eligible) + " eligible points");
  }
  out.clear();
  if (k == 0) return;

  BestK best(k);
  // Explicit stack of (node, squared lower bound on distance to its region).
  struct Pending {
    std::int32_t node;
    double bound2;
  };
  Pending stack[128];
  int top = 0;
  stack[top++] = {0, 0.0};
  while (top > 0) {
    const Pending cur = stack[--top];
    // `<=` rather than `<` keeps equal-distance, lower-id points reachable.
    if (best.full() && cur.bound2 > best.worst_d2()) continue;
    const Node& node = nodes_[static_cast<std::size_t>(cur.node)];
    if (node.count > 0) {
      for (std::int32_t i = node.begin; i < node.begin + node.count; ++i) {
        const std::int32_t id = perm_[static_cast<std::size_t>(i)];
        if (exclude && id == *exclude) continue;
        best.offer({(points_[static_cast<std::size_t>(id)] - q).squaredNorm(), id});
      }
      continue;
    }
    const double diff = q[node.axis] - node.split;
    const std::int32_t near = diff < 0.0 ? node.left : node.right;
    const std::int32_t far = diff < 0.0 ? node.right : node.left;
    const double far_bound = std::max(cur.bound2, diff * diff);
    stack[top++] = {far, far_bound};
    stack[top++] = {near, cur.bound2};
  }
  best.drain_sorted(out);
}

std::vector<Neighbor> PointIndex::knn(const Vec3& q, std::size_t k, std::optional<std::int32_t> exclude) const {
  std::vector<Neighbor> out;
  knn(q, k, exclude, out);
  return out;
}

std::vector<Neighbor> PointIndex::within_radius(const Vec3& q, double radius) const {
  std::vector<Candidate> found;
  const double r2 = radius * radius;
  std::vector<std::pair<std::int32_t, double>> stack{{0, 0.0}};
  while (!stack.empty()) {
    const auto [node_id, bound2] = stack.back();
    stack.pop_back();
    if (bound2 > r2) continue;
    const Node& node = nodes_[static_cast<std::size_t>(node_id)];
    if (node.count > 0) {
      for (std::int32_t i = node.begin; i < node.begin + node.count; ++i) {
        const std::int32_t id = perm_[static_cast<std::size_t>(i)];
        const double d2 = (points_[static_cast<std::size_t>(id)] - q).squaredNorm();
        if (d2 <= r2) found.push_back({d2, id});
      }
      continue;
    }
    const double diff = q[node.axis] - node.split;
    const double far_bound = std::max(bound2, diff * diff);
    stack.emplace_back(diff < 0.0 ? node.right : node.left, far_bound);
    stack.emplace_back(diff < 0.0 ? node.left : node.right, bound2);
  }
  std::sort(found.begin(), found.end());
  std::vector<Neighbor> out;
  out.reserve(found.size());
  for (const Candidate& c : found) out.push_back({c.id, std::sqrt(c.d2)});
  return out;
}

std::vector<Neighbor> brute_force_knn(std::span<const Vec3> points, const Vec3& q, std::size_t k,
                                      std::optional<std::int32_t> exclude) {
  std::vector<Candidate> all;
  all.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto id = static_cast<std::int32_t>(i);
    if (exclude && id == *exclude) continue;
    all.push_back({(points[i] - q).squaredNorm(), id});
  }
  if (k > all.size()) throw InvalidArgument("brute_force_knn: k too large");
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end());
  std::vector<Neighbor> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back({all[i].id, std::sqrt(all[i].d2)});
  return out;
}

}  // namespace facetcvt
