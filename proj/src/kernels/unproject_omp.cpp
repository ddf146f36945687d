#include "arbor/kernels/unproject.hpp"

#include <numeric>

#include "arbor/common/error.hpp"
#include "arbor/geom/camera.hpp"

namespace arbor::kernels {

PointCloud unproject(const DepthMap& depth, const CameraIntrinsics& intr, const Pose& pose) {
  require(depth.width == intr.width && depth.height == intr.height,
          "unproject: depth map and intrinsics dimensions differ");
  const int rows = depth.height;
  std::vector<std::size_t> offsets(static_cast<std::size_t>(rows) + 1, 0);

#pragma omp parallel for schedule(static)
  for (int v = 0; v < rows; ++v) {
    std::size_t n = 0;
    for (int u = 0; u < depth.width; ++u) n += std::isfinite(depth.at(u, v)) ? 1 : 0;
    offsets[v + 1] = n;
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());

  PointCloud cloud;
  cloud.points.resize(offsets.back());
#pragma omp parallel for schedule(static)
  for (int v = 0; v < rows; ++v) {
    std::size_t out = offsets[v];
    for (int u = 0; u < depth.width; ++u) {
      const double d = depth.at(u, v);
      if (!std::isfinite(d)) continue;
      cloud.points[out++] = pose.apply(back_project(u, v, d, intr));
    }
  }
  return cloud;
}

}  // namespace arbor::kernels
