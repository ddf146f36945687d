#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "arbor/geom/types.hpp"

namespace arbor {

using VoxelKey = std::array<std::int64_t, 3>;

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const noexcept;
};

/// Sparse occupancy counts on a regular grid.
struct VoxelGrid {
  Vec3 origin = Vec3::Zero();
  double voxel_size = 0.0;
  /// Extent of occupied keys along each axis (max - min + 1), zero when empty.
  std::array<std::int64_t, 3> dims{0, 0, 0};
  std::unordered_map<VoxelKey, std::uint64_t, VoxelKeyHash> counts;

  std::uint64_t total() const;
  /// Occupied cells ordered by (z, y, x).
  std::vector<std::pair<VoxelKey, std::uint64_t>> sorted() const;
};

inline VoxelKey voxel_key(const Vec3& p, const Vec3& origin, double voxel_size) {
  return {static_cast<std::int64_t>(std::floor((p.x() - origin.x()) / voxel_size)),
          static_cast<std::int64_t>(std::floor((p.y() - origin.y()) / voxel_size)),
          static_cast<std::int64_t>(std::floor((p.z() - origin.z()) / voxel_size))};
}

/// Bins each point to floor((p - origin) / voxel_size).
VoxelGrid voxelize(const PointCloud& cloud, double voxel_size, const Vec3& origin);

/// One point per occupied voxel at the centroid of its members (colors
/// averaged too). The grid is anchored at the cloud's bounding-box minimum;
/// output is in (z, y, x) voxel scan order.
PointCloud downsample(const PointCloud& cloud, double voxel_size);

}  // namespace arbor
