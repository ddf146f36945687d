#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "arbor/geom/types.hpp"

namespace arbor::kernels {

struct RasterMesh {
  const TriMesh* mesh = nullptr;
  std::int32_t label = 0;
};

struct RasterBuffers {
  int width = 0;
  int height = 0;
  /// +inf where nothing was drawn.
  std::vector<double> depth;
  /// Label of the winning surface, -1 where nothing was drawn.
  std::vector<std::int32_t> label;
};

/// Z-buffer rasterization of triangle meshes into camera z-depth.
///
/// Each pixel center is tested against every triangle (edge functions,
/// inclusive edges); depth is the perspective-correct interpolation of 1/z.
/// Geometry in front of `near_plane` is clipped. A pixel keeps the first
/// triangle, in mesh order, that achieves the strictly smallest depth.
RasterBuffers rasterize(std::span<const RasterMesh> meshes, const CameraIntrinsics& intr,
                        const Pose& camera_to_world, double near_plane = 0.01);

/// Serial reference for rasterize. Results are bit-identical.
RasterBuffers rasterize_ref(std::span<const RasterMesh> meshes, const CameraIntrinsics& intr,
                            const Pose& camera_to_world, double near_plane = 0.01);

}  // namespace arbor::kernels
