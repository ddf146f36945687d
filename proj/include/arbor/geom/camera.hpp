#pragma once

#include "arbor/geom/types.hpp"

namespace arbor {

struct Projection {
  double u;
  double v;
  double depth;
};

/// Camera-frame point to pixel coordinates. Requires p.z() > 0.
inline Projection project(const Vec3& p_cam, const CameraIntrinsics& k) {
  return {k.fx * p_cam.x() / p_cam.z() + k.cx, k.fy * p_cam.y() / p_cam.z() + k.cy, p_cam.z()};
}

/// Pixel center and depth to a camera-frame point.
inline Vec3 back_project(double u, double v, double d, const CameraIntrinsics& k) {
  return {(u - k.cx) * d / k.fx, (v - k.cy) * d / k.fy, d};
}

/// One world-frame point per valid pixel, in row-major scan order.
/// Throws InvalidInput if the intrinsics and depth dimensions differ.
PointCloud unproject(const DepthMap& depth, const CameraIntrinsics& intr, const Pose& pose);

/// World-frame points for each pixel (NaN where invalid), same layout as depth.
std::vector<Vec3> unproject_dense(const DepthMap& depth, const CameraIntrinsics& intr,
                                  const Pose& pose);

/// Rotation for a camera looking along `forward` with world +Z up.
/// `forward` must not be vertical.
Mat3 look_rotation(const Vec3& forward);

}  // namespace arbor
