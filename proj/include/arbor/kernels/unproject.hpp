#pragma once

#include "arbor/geom/types.hpp"

namespace arbor::kernels {

/// Row-parallel unprojection. Output order is the row-major order of valid pixels.
PointCloud unproject(const DepthMap& depth, const CameraIntrinsics& intr, const Pose& pose);
PointCloud unproject_ref(const DepthMap& depth, const CameraIntrinsics& intr, const Pose& pose);

}  // namespace arbor::kernels
