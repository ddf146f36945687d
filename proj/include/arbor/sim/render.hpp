#pragma once

#include <cstdint>
#include <vector>

#include "arbor/geom/types.hpp"
#include "arbor/kernels/raster.hpp"

namespace arbor {

inline constexpr std::int32_t kLabelBackground = -1;
inline constexpr std::int32_t kLabelGround = 0;
inline constexpr std::int32_t kLabelTarget = 1;

/// Labeled scene geometry. Label 0 is the ground, 1 the target tree and
/// higher values neighbouring trees.
struct Scene {
  std::vector<TriMesh> meshes;
  std::vector<std::int32_t> labels;

  void add(TriMesh mesh, std::int32_t label);
};

struct RenderResult {
  DepthMap depth;
  std::vector<std::int32_t> labels;  // kLabelBackground where empty
};

/// Square ground patch at z = 0 centred on `center`, two triangles.
TriMesh ground_plane(const Vec3& center, double half_extent = 60.0);

/// Z-buffer render of camera z-depth; background pixels invalid.
RenderResult render_scene(const Scene& scene, const CameraIntrinsics& intr, const Pose& pose);

/// Depth of a single mesh. Throws InvalidInput for an empty mesh or degenerate intrinsics.
DepthMap render_depth(const TriMesh& mesh, const CameraIntrinsics& intr, const Pose& pose);

/// Idealized monocular stand-in: inverse depth divided by its maximum over
/// valid pixels, so values lie in (0, 1]; background pixels are 0.
DepthMap relative_inverse_depth(const DepthMap& depth);
DepthMap render_mono_reldepth(const TriMesh& mesh, const CameraIntrinsics& intr, const Pose& pose);

}  // namespace arbor
