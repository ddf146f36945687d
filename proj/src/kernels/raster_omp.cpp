#include "arbor/kernels/raster.hpp"

#include "raster_setup.hpp"

namespace arbor::kernels {

namespace {
constexpr int kBandRows = 16;
}

RasterBuffers rasterize(std::span<const RasterMesh> meshes, const CameraIntrinsics& intr,
                        const Pose& camera_to_world, double near_plane) {
  const auto tris = detail::setup_triangles(meshes, intr, camera_to_world, near_plane);
  RasterBuffers buf = detail::make_buffers(intr);
  const int bands = (intr.height + kBandRows - 1) / kBandRows;

  // Each band owns its rows, so pixels see triangles in the same order as the
  // serial reference.
#pragma omp parallel for schedule(dynamic)
  for (int band = 0; band < bands; ++band) {
    const int row0 = band * kBandRows;
    const int row1 = std::min(intr.height - 1, row0 + kBandRows - 1);
    for (const auto& t : tris) {
      if (t.v1 < row0 || t.v0 > row1) continue;
      const int v_lo = std::max(t.v0, row0);
      const int v_hi = std::min(t.v1, row1);
      for (int v = v_lo; v <= v_hi; ++v) {
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
  }
  return buf;
}

}  // namespace arbor::kernels
