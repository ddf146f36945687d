#include "arbor/kernels/raster.hpp"

#include "raster_setup.hpp"

namespace arbor::kernels {

RasterBuffers rasterize_ref(std::span<const RasterMesh> meshes, const CameraIntrinsics& intr,
                            const Pose& camera_to_world, double near_plane) {
  const auto tris = detail::setup_triangles(meshes, intr, camera_to_world, near_plane);
  RasterBuffers buf = detail::make_buffers(intr);
  for (const auto& t : tris) {
    for (int v = t.v0; v <= t.v1; ++v) {
      for (int u = t.u0; u <= t.u1; ++u) {
        const double z = detail::sample_depth(t, u, v);
        const std::size_t i = static_cast<std::size_t>(v) * intr.width + u;
        if (z < buf.depth[i]) {
          buf.depth[i] = z;
          buf.label[i] = t.label;
        }
      }
    }
  }
  return buf;
}

}  // namespace arbor::kernels
