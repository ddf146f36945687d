#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "arbor/geom/types.hpp"

namespace arbor {

/// Immutable balanced kd-tree over 3D points.
///
/// Nodes split at the median of their widest bounding-box axis. Every query
/// is exact: results match an exhaustive scan, with distance ties resolved
/// toward the lowest point index. Concurrent const queries are safe.
class KdTree {
 public:
  struct Hit {
    std::size_t index;
    double distance;
  };

  KdTree() = default;
  explicit KdTree(std::span<const Vec3> points, std::size_t leaf_size = 8);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Vec3& point(std::size_t original_index) const { return points_[original_index]; }

  /// Throws InvalidInput on an empty index.
  Hit nearest(const Vec3& query) const;

  /// Nearest point at distance <= max_distance, or {kNone, inf} if there is
  /// none. Agrees with nearest() whenever nearest() lies within the bound.
  Hit nearest_within(const Vec3& query, double max_distance) const;

  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  /// Up to k nearest points sorted by (distance, index).
  std::vector<Hit> knn(const Vec3& query, std::size_t k) const;

  /// Indices of all points within `radius` (inclusive), ascending.
  std::vector<std::size_t> radius(const Vec3& query, double radius) const;

 private:
  struct Node {
    std::uint32_t begin;
    std::uint32_t end;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int32_t axis = -1;
    double split = 0.0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void nearest_rec(std::int32_t node, const Vec3& q, double& best_d2, std::size_t& best) const;

  std::vector<Vec3> points_;             // original order
  std::vector<std::uint32_t> order_;     // tree order -> original index
  std::vector<Vec3> ordered_;            // points in tree order
  std::vector<Node> nodes_;
  std::size_t leaf_size_ = 8;
};

/// Squared Euclidean distance, evaluated in a fixed operation order so that
/// independent reference computations reproduce it bit for bit.
inline double squared_distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  const double dz = a.z() - b.z();
  return dx * dx + dy * dy + dz * dz;
}

}  // namespace arbor
