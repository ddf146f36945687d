#include "arbor/geom/camera.hpp"

#include "arbor/common/error.hpp"
#include "arbor/kernels/unproject.hpp"

namespace arbor {

PointCloud unproject(const DepthMap& depth, const CameraIntrinsics& intr, const Pose& pose) {
  return kernels::unproject(depth, intr, pose);
}

std::vector<Vec3> unproject_dense(const DepthMap& depth, const CameraIntrinsics& intr,
                                  const Pose& pose) {
  require(depth.width == intr.width && depth.height == intr.height,
          "unproject: depth map and intrinsics dimensions differ");
  std::vector<Vec3> out(depth.size(), Vec3::Constant(kInvalidDepth));
#pragma omp parallel for schedule(static)
  for (int v = 0; v < depth.height; ++v) {
    for (int u = 0; u < depth.width; ++u) {
      const double d = depth.at(u, v);
      if (std::isfinite(d)) {
        out[static_cast<std::size_t>(v) * depth.width + u] = pose.apply(back_project(u, v, d, intr));
      }
    }
  }
  return out;
}

Mat3 look_rotation(const Vec3& forward) {
  const Vec3 z = forward.normalized();
  const Vec3 up = Vec3::UnitZ();
  require(z.cross(up).norm() > 1e-9, "look_rotation: forward direction is vertical");
  const Vec3 x = z.cross(up).normalized();
  const Vec3 y = z.cross(x);
  Mat3 r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;
  return r;
}

}  // namespace arbor
