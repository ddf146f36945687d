#pragma once

#include <optional>
#include <string>
#include <vector>

#include "arbor/geom/types.hpp"

namespace arbor {

struct IcpParams {
  int max_iter = 200;
  /// Stop when successive RMS values differ by less than this (m).
  double rms_delta = 1e-7;
  /// Correspondences farther than this are rejected. Zero selects
  /// 10x the median nearest-neighbour spacing of the (downsampled) target.
  double max_corr_dist = 0.0;
  /// Starting transform. Without one, centroid and principal-axis
  /// candidates are tried and the best coarse fit is refined.
  std::optional<Rigid> init;
  /// Voxel size for downsampling both clouds first; 0 disables.
  double voxel_size = 0.005;
  /// Optional box applied to both clouds before alignment.
  std::optional<Aabb> crop;

  void validate() const;
};

struct IcpReport {
  Rigid transform;
  std::vector<double> rms_history;
  int iterations = 0;
  bool converged = false;
  double inlier_fraction = 0.0;
  double max_corr_dist = 0.0;
  std::size_t source_points = 0;
  std::size_t target_points = 0;
  std::string init_method;
};

/// Point-to-point ICP returning the transform mapping source into the
/// target frame. Throws RegistrationFailure on degenerate correspondences.
IcpReport icp_align(const PointCloud& source, const PointCloud& target, const IcpParams& params = {});

/// Least-squares rigid transform taking src[i] onto dst[i].
/// Throws RegistrationFailure for fewer than 3 pairs or a rank-deficient
/// cross-covariance.
Rigid kabsch(const std::vector<Vec3>& src, const std::vector<Vec3>& dst);

PointCloud apply_transform(const PointCloud& cloud, const Rigid& t);

/// Points inside the box (inclusive), order preserved.
PointCloud crop(const PointCloud& cloud, const Aabb& box);

/// Rotation angle of r in radians.
double rotation_angle(const Mat3& r);

}  // namespace arbor
