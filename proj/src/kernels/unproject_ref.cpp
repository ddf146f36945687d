#include "arbor/kernels/unproject.hpp"

#include "arbor/common/error.hpp"
#include "arbor/geom/camera.hpp"

namespace arbor::kernels {

PointCloud unproject_ref(const DepthMap& depth, const CameraIntrinsics& intr, const Pose& pose) {
  require(depth.width == intr.width && depth.height == intr.height,
          "unproject: depth map and intrinsics dimensions differ");
  PointCloud cloud;
  for (int v = 0; v < depth.height; ++v) {
    for (int u = 0; u < depth.width; ++u) {
      const double d = depth.at(u, v);
      if (!std::isfinite(d)) continue;
      cloud.points.push_back(pose.apply(back_project(u, v, d, intr)));
    }
  }
  return cloud;
}

}  // namespace arbor::kernels
