#include "arbor/geom/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "arbor/common/error.hpp"

namespace arbor {

KdTree::KdTree(std::span<const Vec3> points, std::size_t leaf_size)
    : points_(points.begin(), points.end()), leaf_size_(std::max<std::size_t>(1, leaf_size)) {
  require(points_.size() < std::numeric_limits<std::uint32_t>::max(), "kd-tree: too many points");
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / leaf_size_ + 1);
    build(0, static_cast<std::uint32_t>(points_.size()));
  }
  ordered_.resize(points_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) ordered_[i] = points_[order_[i]];
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  if (end - begin <= leaf_size_) return id;

  Vec3 lo = points_[order_[begin]];
  Vec3 hi = lo;
  for (auto i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  if (hi[axis] == lo[axis]) return id;  // all coincident: keep as leaf

  const auto mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double pa = points_[a][axis];
                     const double pb = points_[b][axis];
                     return pa < pb || (pa == pb && a < b);
                   });
  const double split = points_[order_[mid]][axis];
  const auto left = build(begin, mid);
  const auto right = build(mid, end);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

namespace {

bool better(double d2, std::size_t idx, double best_d2, std::size_t best) {
  return d2 < best_d2 || (d2 == best_d2 && idx < best);
}

}  // namespace

void KdTree::nearest_rec(std::int32_t id, const Vec3& q, double& best_d2, std::size_t& best) const {
  const Node& node = nodes_[id];
  if (node.axis < 0) {
    for (auto i = node.begin; i < node.end; ++i) {
      const double d2 = squared_distance(q, ordered_[i]);
      if (better(d2, order_[i], best_d2, best)) {
        best_d2 = d2;
        best = order_[i];
      }
    }
    return;
  }
  const double diff = q[node.axis] - node.split;
  const auto near_child = diff < 0 ? node.left : node.right;
  const auto far_child = diff < 0 ? node.right : node.left;
  nearest_rec(near_child, q, best_d2, best);
  // <= so that equidistant points with a lower index are still found.
  if (diff * diff <= best_d2) nearest_rec(far_child, q, best_d2, best);
}

KdTree::Hit KdTree::nearest(const Vec3& query) const {
  require(!points_.empty(), "kd-tree: nearest() on an empty index");
  double best_d2 = std::numeric_limits<double>::infinity();
  std::size_t best = std::numeric_limits<std::size_t>::max();
  nearest_rec(0, query, best_d2, best);
  return {best, std::sqrt(best_d2)};
}

KdTree::Hit KdTree::nearest_within(const Vec3& query, double max_distance) const {
  require(!points_.empty(), "kd-tree: nearest_within() on an empty index");
  require(max_distance >= 0, "kd-tree: max_distance must be non-negative");
  const Hit none{kNone, std::numeric_limits<double>::infinity()};
  // Padded so that rounding in max_distance^2 never drops a point whose
  // distance passes the final check.
  double best_d2 = max_distance * max_distance * (1.0 + 1e-12);
  std::size_t best = kNone;
  nearest_rec(0, query, best_d2, best);
  if (best == kNone) return none;
  const double d = std::sqrt(best_d2);
  return d <= max_distance ? Hit{best, d} : none;
}

std::vector<KdTree::Hit> KdTree::knn(const Vec3& query, std::size_t k) const {
  std::vector<Hit> result;
  if (k == 0 || points_.empty()) return result;

  struct Entry {
    double d2;
    std::size_t idx;
    bool operator<(const Entry& o) const { return d2 < o.d2 || (d2 == o.d2 && idx < o.idx); }
  };
  std::priority_queue<Entry> heap;  // worst on top

  struct Frame {
    std::int32_t node;
    double plane_d2;
  };
  std::vector<Frame> frames{{0, 0.0}};
  while (!frames.empty()) {
    const Frame f = frames.back();
    frames.pop_back();
    if (heap.size() == k && f.plane_d2 > heap.top().d2) continue;
    const Node& node = nodes_[f.node];
    if (node.axis < 0) {
      for (auto i = node.begin; i < node.end; ++i) {
        const Entry e{squared_distance(query, ordered_[i]), order_[i]};
        if (heap.size() < k) {
          heap.push(e);
        } else if (e < heap.top()) {
          heap.pop();
          heap.push(e);
        }
      }
      continue;
    }
    const double diff = query[node.axis] - node.split;
    const auto near_child = diff < 0 ? node.left : node.right;
    const auto far_child = diff < 0 ? node.right : node.left;
    // Far child pushed first so the near child is explored first.
    frames.push_back({far_child, std::max(f.plane_d2, diff * diff)});
    frames.push_back({near_child, f.plane_d2});
  }

  result.resize(heap.size());
  for (auto i = result.size(); i-- > 0;) {
    result[i] = {heap.top().idx, std::sqrt(heap.top().d2)};
    heap.pop();
  }
  return result;
}

std::vector<std::size_t> KdTree::radius(const Vec3& query, double r) const {
  std::vector<std::size_t> out;
  if (points_.empty() || !(r >= 0)) return out;
  const double r2 = r * r;
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (node.axis < 0) {
      for (auto i = node.begin; i < node.end; ++i) {
        if (squared_distance(query, ordered_[i]) <= r2) out.push_back(order_[i]);
      }
      continue;
    }
    const double diff = query[node.axis] - node.split;
    if (diff <= r) stack.push_back(node.left);
    if (diff >= -r) stack.push_back(node.right);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace arbor
