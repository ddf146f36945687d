#include "arbor/scale/scale.hpp"

#include <cmath>
#include <limits>

#include "arbor/common/error.hpp"
#include "arbor/qsm/qsm.hpp"

namespace arbor {

ScaleResult scale_factor(double h_ref, double h_rec) {
  require(std::isfinite(h_ref) && h_ref > 0, "scale_factor: reference height must be positive");
  require(std::isfinite(h_rec) && h_rec > 0, "scale_factor: reconstruction height must be positive");
  return {h_ref / h_rec, h_ref, h_rec};
}

Vec3 base_center(const std::vector<Vec3>& points) {
  require(!points.empty(), "base_center: no points");
  Vec3 c = Vec3::Zero();
  double z_min = std::numeric_limits<double>::infinity();
  for (const Vec3& p : points) {
    c += p;
    z_min = std::min(z_min, p.z());
  }
  c /= static_cast<double>(points.size());
  c.z() = z_min;
  return c;
}

namespace {

void scale_points(std::vector<Vec3>& pts, double s, const Vec3& c) {
  for (Vec3& p : pts) p = c + s * (p - c);
}

}  // namespace

PointCloud apply_scale(const PointCloud& cloud, double s, std::optional<Vec3> center) {
  require(std::isfinite(s) && s > 0, "apply_scale: scale must be positive");
  PointCloud out = cloud;
  if (out.empty() || s == 1.0) return out;
  scale_points(out.points, s, center ? *center : base_center(cloud.points));
  return out;
}

TriMesh apply_scale(const TriMesh& mesh, double s, std::optional<Vec3> center) {
  require(std::isfinite(s) && s > 0, "apply_scale: scale must be positive");
  TriMesh out = mesh;
  if (out.vertices.empty() || s == 1.0) return out;
  scale_points(out.vertices, s, center ? *center : base_center(mesh.vertices));
  return out;
}

ScaledCloud retrieve_scale(double h_ref, const PointCloud& rec) {
  ScaledCloud out;
  out.scale = scale_factor(h_ref, tree_height(rec));
  out.cloud = apply_scale(rec, out.scale.s);
  return out;
}

ScaledCloud retrieve_scale(const PointCloud& reference, const PointCloud& rec) {
  return retrieve_scale(tree_height(reference), rec);
}

}  // namespace arbor
