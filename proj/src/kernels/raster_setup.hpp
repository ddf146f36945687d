#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "arbor/common/error.hpp"
#include "arbor/kernels/raster.hpp"

namespace arbor::kernels::detail {

/// Projected triangle ready for pixel tests.
struct ScreenTriangle {
  double x[3];
  double y[3];
  double inv_z[3];
  double area;  // signed twice-area in pixel units
  int u0, u1, v0, v1;  // inclusive pixel bounds, already clipped to the image
  std::int32_t label;
};

inline double edge(double ax, double ay, double bx, double by, double px, double py) {
  return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
}

/// Depth at pixel center (px, py), or +inf when the center lies outside.
inline double sample_depth(const ScreenTriangle& t, double px, double py) {
  double w0 = edge(t.x[1], t.y[1], t.x[2], t.y[2], px, py);
  double w1 = edge(t.x[2], t.y[2], t.x[0], t.y[0], px, py);
  double w2 = edge(t.x[0], t.y[0], t.x[1], t.y[1], px, py);
  double area = t.area;
  if (area < 0) {
    w0 = -w0;
    w1 = -w1;
    w2 = -w2;
    area = -area;
  }
  if (w0 < 0 || w1 < 0 || w2 < 0) return std::numeric_limits<double>::infinity();
  const double inv_z = (w0 * t.inv_z[0] + w1 * t.inv_z[1] + w2 * t.inv_z[2]) / area;
  return 1.0 / inv_z;
}

/// Clips every triangle against the near plane in camera space, projects the
/// pieces and drops those that are degenerate or off-screen. Order follows
/// (mesh, triangle, fan piece).
inline std::vector<ScreenTriangle> setup_triangles(std::span<const RasterMesh> meshes,
                                                   const CameraIntrinsics& k,
                                                   const Pose& camera_to_world,
                                                   double near_plane) {
  k.validate();
  require(near_plane > 0, "rasterize: near plane must be positive");
  const Rigid world_to_cam = camera_to_world.inverse();
  std::vector<ScreenTriangle> out;

  for (const auto& rm : meshes) {
    if (rm.mesh == nullptr) continue;
    const TriMesh& mesh = *rm.mesh;
    std::vector<Vec3> cam(mesh.vertices.size());
    for (std::size_t i = 0; i < cam.size(); ++i) cam[i] = world_to_cam.apply(mesh.vertices[i]);

    for (const auto& tri : mesh.triangles) {
      // Sutherland-Hodgman against z >= near.
      Vec3 poly[4];
      int n = 0;
      for (int e = 0; e < 3; ++e) {
        const Vec3& a = cam[tri[e]];
        const Vec3& b = cam[tri[(e + 1) % 3]];
        const bool a_in = a.z() >= near_plane;
        const bool b_in = b.z() >= near_plane;
        if (a_in) poly[n++] = a;
        if (a_in != b_in) {
          const double s = (near_plane - a.z()) / (b.z() - a.z());
          Vec3 c = a + s * (b - a);
          c.z() = near_plane;
          poly[n++] = c;
        }
      }
      if (n < 3) continue;

      double px[4], py[4], pz[4];
      for (int i = 0; i < n; ++i) {
        px[i] = k.fx * poly[i].x() / poly[i].z() + k.cx;
        py[i] = k.fy * poly[i].y() / poly[i].z() + k.cy;
        pz[i] = 1.0 / poly[i].z();
      }
      for (int f = 1; f + 1 < n; ++f) {
        const int ids[3] = {0, f, f + 1};
        ScreenTriangle st{};
        for (int j = 0; j < 3; ++j) {
          st.x[j] = px[ids[j]];
          st.y[j] = py[ids[j]];
          st.inv_z[j] = pz[ids[j]];
        }
        st.area = edge(st.x[0], st.y[0], st.x[1], st.y[1], st.x[2], st.y[2]);
        if (!(std::abs(st.area) > 1e-12)) continue;
        const double min_x = std::min({st.x[0], st.x[1], st.x[2]});
        const double max_x = std::max({st.x[0], st.x[1], st.x[2]});
        const double min_y = std::min({st.y[0], st.y[1], st.y[2]});
        const double max_y = std::max({st.y[0], st.y[1], st.y[2]});
        if (max_x < 0 || max_y < 0 || min_x > k.width - 1 || min_y > k.height - 1) continue;
        st.u0 = std::max(0, static_cast<int>(std::ceil(min_x)));
        st.u1 = std::min(k.width - 1, static_cast<int>(std::floor(max_x)));
        st.v0 = std::max(0, static_cast<int>(std::ceil(min_y)));
        st.v1 = std::min(k.height - 1, static_cast<int>(std::floor(max_y)));
        if (st.u0 > st.u1 || st.v0 > st.v1) continue;
        st.label = rm.label;
        out.push_back(st);
      }
    }
  }
  return out;
}

inline RasterBuffers make_buffers(const CameraIntrinsics& k) {
  RasterBuffers b;
  b.width = k.width;
  b.height = k.height;
  b.depth.assign(k.pixel_count(), std::numeric_limits<double>::infinity());
  b.label.assign(k.pixel_count(), -1);
  return b;
}

}  // namespace arbor::kernels::detail
