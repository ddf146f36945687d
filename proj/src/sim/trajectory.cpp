#include "arbor/sim/trajectory.hpp"

#include <cmath>
#include <numbers>

#include "arbor/common/error.hpp"
#include "arbor/geom/camera.hpp"

namespace arbor {

void RowSpec::validate() const {
  require(row_direction.allFinite() && std::abs(row_direction.norm() - 1.0) < 1e-9 &&
              std::abs(row_direction.z()) < 1e-9,
          "row spec: row_direction must be a horizontal unit vector");
  require(speed > 0 && fps > 0, "row spec: speed and fps must be positive");
  require(camera_offset > 0, "row spec: camera_offset must be positive");
  require(std::isfinite(camera_height), "row spec: camera_height must be finite");
  require(std::abs(pitch_deg) < 89.0, "row spec: pitch must be within (-89, 89) degrees");
}

Vec3 row_lateral(const RowSpec& row) { return Vec3::UnitZ().cross(row.row_direction).normalized(); }

std::vector<Pose> plan_trajectory(const RowSpec& row) {
  row.validate();
  require(row.n_frames > 0, "plan_trajectory: at least one frame is required");
  const Vec3 lateral = row_lateral(row);
  const double spacing = row.frame_spacing();
  const double center = 0.5 * (row.n_frames - 1);
  const double pitch = row.pitch_deg * std::numbers::pi / 180.0;
  const Vec3 trunk_at_eye = row.row_origin + Vec3::UnitZ() * row.camera_height;

  std::vector<Pose> poses;
  poses.reserve(row.n_frames);
  for (int i = 0; i < row.n_frames; ++i) {
    const Vec3 eye =
        row.row_origin + (i - center) * spacing * row.row_direction - row.camera_offset * lateral +
        Vec3::UnitZ() * row.camera_height;
    Vec3 forward = lateral;
    if (row.aim == AimPolicy::kTrackTrunk) forward = (trunk_at_eye - eye).normalized();
    Mat3 r = look_rotation(forward);
    if (pitch != 0.0) {
      // Positive pitch tilts the optical axis up (toward world +Z).
      r = r * Eigen::AngleAxisd(pitch, Vec3::UnitX()).toRotationMatrix();
    }
    poses.push_back(Pose::from(r, eye));
  }
  return poses;
}

}  // namespace arbor
