#include "arbor/geom/voxel.hpp"

#include <algorithm>
#include <map>

#include "arbor/common/error.hpp"

namespace arbor {

std::size_t VoxelKeyHash::operator()(const VoxelKey& k) const noexcept {
  std::uint64_t h = static_cast<std::uint64_t>(k[0]) * 0x9e3779b97f4a7c15ULL;
  h ^= static_cast<std::uint64_t>(k[1]) * 0xc2b2ae3d27d4eb4fULL + (h << 6) + (h >> 2);
  h ^= static_cast<std::uint64_t>(k[2]) * 0x165667b19e3779f9ULL + (h << 6) + (h >> 2);
  return static_cast<std::size_t>(h);
}

std::uint64_t VoxelGrid::total() const {
  std::uint64_t n = 0;
  for (const auto& [key, c] : counts) n += c;
  return n;
}

namespace {

bool scan_less(const VoxelKey& a, const VoxelKey& b) {
  if (a[2] != b[2]) return a[2] < b[2];
  if (a[1] != b[1]) return a[1] < b[1];
  return a[0] < b[0];
}

}  // namespace

std::vector<std::pair<VoxelKey, std::uint64_t>> VoxelGrid::sorted() const {
  std::vector<std::pair<VoxelKey, std::uint64_t>> out(counts.begin(), counts.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return scan_less(a.first, b.first); });
  return out;
}

VoxelGrid voxelize(const PointCloud& cloud, double voxel_size, const Vec3& origin) {
  require(std::isfinite(voxel_size) && voxel_size > 0, "voxelize: voxel size must be positive");
  VoxelGrid grid;
  grid.origin = origin;
  grid.voxel_size = voxel_size;
  VoxelKey lo{0, 0, 0};
  VoxelKey hi{-1, -1, -1};
  bool first = true;
  for (const auto& p : cloud.points) {
    const VoxelKey k = voxel_key(p, origin, voxel_size);
    ++grid.counts[k];
    for (int a = 0; a < 3; ++a) {
      lo[a] = first ? k[a] : std::min(lo[a], k[a]);
      hi[a] = first ? k[a] : std::max(hi[a], k[a]);
    }
    first = false;
  }
  for (int a = 0; a < 3; ++a) grid.dims[a] = first ? 0 : hi[a] - lo[a] + 1;
  return grid;
}

PointCloud downsample(const PointCloud& cloud, double voxel_size) {
  require(std::isfinite(voxel_size) && voxel_size > 0, "downsample: voxel size must be positive");
  PointCloud out;
  if (cloud.empty()) return out;
  const Vec3 origin = bounds(cloud.points).min;

  struct Acc {
    Vec3 sum = Vec3::Zero();
    Vec3 color = Vec3::Zero();
    std::uint64_t n = 0;
  };
  std::unordered_map<VoxelKey, std::uint32_t, VoxelKeyHash> slot;
  std::vector<Acc> acc;
  std::vector<VoxelKey> keys;
  slot.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const VoxelKey k = voxel_key(cloud.points[i], origin, voxel_size);
    auto [it, inserted] = slot.try_emplace(k, static_cast<std::uint32_t>(acc.size()));
    if (inserted) {
      acc.emplace_back();
      keys.push_back(k);
    }
    Acc& a = acc[it->second];
    a.sum += cloud.points[i];
    if (cloud.has_colors()) a.color += cloud.colors[i];
    ++a.n;
  }

  std::vector<std::uint32_t> order(acc.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::uint32_t a, std::uint32_t b) { return scan_less(keys[a], keys[b]); });

  out.points.reserve(order.size());
  for (auto i : order) {
    const double n = static_cast<double>(acc[i].n);
    out.points.push_back(acc[i].n == 1 ? acc[i].sum : Vec3(acc[i].sum / n));
    if (cloud.has_colors()) out.colors.push_back(acc[i].color / n);
  }
  return out;
}

}  // namespace arbor
