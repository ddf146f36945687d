#include "arbor/sim/render.hpp"

#include <algorithm>
#include <limits>

#include "arbor/common/error.hpp"

namespace arbor {

void Scene::add(TriMesh mesh, std::int32_t label) {
  meshes.push_back(std::move(mesh));
  labels.push_back(label);
}

TriMesh ground_plane(const Vec3& center, double half_extent) {
  TriMesh m;
  const double h = half_extent;
  m.vertices = {Vec3(center.x() - h, center.y() - h, 0.0), Vec3(center.x() + h, center.y() - h, 0.0),
                Vec3(center.x() + h, center.y() + h, 0.0), Vec3(center.x() - h, center.y() + h, 0.0)};
  m.triangles = {{0, 1, 2}, {0, 2, 3}};
  return m;
}

RenderResult render_scene(const Scene& scene, const CameraIntrinsics& intr, const Pose& pose) {
  intr.validate();
  require(scene.meshes.size() == scene.labels.size(), "render: scene labels mismatch");
  std::vector<kernels::RasterMesh> meshes;
  for (std::size_t i = 0; i < scene.meshes.size(); ++i) meshes.push_back({&scene.meshes[i], scene.labels[i]});
  kernels::RasterBuffers buf = kernels::rasterize(meshes, intr, pose);

  RenderResult out;
  out.depth = DepthMap(intr.width, intr.height);
  for (std::size_t i = 0; i < buf.depth.size(); ++i) {
    if (std::isfinite(buf.depth[i])) out.depth.depth[i] = buf.depth[i];
  }
  out.labels = std::move(buf.label);
  return out;
}

DepthMap render_depth(const TriMesh& mesh, const CameraIntrinsics& intr, const Pose& pose) {
  require(!mesh.empty(), "render: mesh is empty");
  Scene scene;
  scene.add(mesh, kLabelTarget);
  return render_scene(scene, intr, pose).depth;
}

DepthMap relative_inverse_depth(const DepthMap& depth) {
  DepthMap out(depth.width, depth.height, 0.0);
  double max_inv = 0.0;
  for (double d : depth.depth) {
    if (std::isfinite(d) && d > 0) max_inv = std::max(max_inv, 1.0 / d);
  }
  if (max_inv == 0.0) return out;
  for (std::size_t i = 0; i < depth.size(); ++i) {
    const double d = depth.depth[i];
    if (std::isfinite(d) && d > 0) out.depth[i] = (1.0 / d) / max_inv;
  }
  return out;
}

DepthMap render_mono_reldepth(const TriMesh& mesh, const CameraIntrinsics& intr, const Pose& pose) {
  return relative_inverse_depth(render_depth(mesh, intr, pose));
}

}  // namespace arbor
