#pragma once

#include <vector>

#include "arbor/geom/types.hpp"

namespace arbor {

enum class AimPolicy { kFixedPerpendicular, kTrackTrunk };

/// Straight traversal of a planting row.
struct RowSpec {
  Vec3 row_direction = Vec3::UnitX();
  /// Point on the trunk line (ground level) the traversal is centred on.
  Vec3 row_origin = Vec3::Zero();
  double camera_offset = 3.5;   // m, lateral distance to the trunk line
  double camera_height = 1.75;  // m above ground
  double speed = 0.89408;       // m/s (2 mph)
  double fps = 15.0;
  int n_frames = 15;
  AimPolicy aim = AimPolicy::kFixedPerpendicular;
  double pitch_deg = 0.0;  // held fixed for the whole traversal

  void validate() const;
  double frame_spacing() const { return speed / fps; }
};

/// Unit vector from the row toward the camera side is -lateral().
Vec3 row_lateral(const RowSpec& row);

/// Camera-to-world poses spaced speed/fps apart along the row and centred on
/// row_origin. Throws InvalidInput for zero frames.
std::vector<Pose> plan_trajectory(const RowSpec& row);

}  // namespace arbor
