#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace arbor {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kInvalidDepth = std::numeric_limits<double>::quiet_NaN();

/// Ideal pinhole camera. Pixel (u, v) has its center at integer coordinates;
/// +X right, +Y down, +Z forward along the optical axis.
struct CameraIntrinsics {
  double fx = 1069.0;
  double fy = 1069.0;
  double cx = 960.0;
  double cy = 600.0;
  int width = 1920;
  int height = 1200;

  void validate() const;
  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

/// Rigid motion p -> R p + t. Used both for camera poses (camera-to-world)
/// and for registration output.
struct Rigid {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static Rigid identity() { return {}; }
  static Rigid from(const Mat3& r, const Vec3& t) { return {r, t}; }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Rigid inverse() const { return {rotation.transpose(), -(rotation.transpose() * translation)}; }
  /// (a * b).apply(p) == a.apply(b.apply(p))
  Rigid operator*(const Rigid& other) const {
    return {rotation * other.rotation, rotation * other.translation + translation};
  }

  /// Throws InvalidInput unless R^T R = I and det R = +1 within tol.
  void validate(double tol = 1e-9) const;
  /// Projects the rotation back onto SO(3).
  void orthonormalize();
};

using Pose = Rigid;
using RigidTransform = Rigid;

/// Metric z-depth per pixel, row-major. Non-finite entries are invalid.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<double> depth;

  DepthMap() = default;
  DepthMap(int w, int h, double fill = kInvalidDepth)
      : width(w), height(h), depth(static_cast<std::size_t>(w) * h, fill) {}

  std::size_t size() const { return depth.size(); }
  double& at(int u, int v) { return depth[static_cast<std::size_t>(v) * width + u]; }
  double at(int u, int v) const { return depth[static_cast<std::size_t>(v) * width + u]; }
  bool valid(std::size_t i) const { return std::isfinite(depth[i]); }
  std::size_t valid_count() const;

  void validate() const;
};

struct PointCloud {
  std::vector<Vec3> points;
  /// Optional RGB in [0, 1]; empty or same length as points.
  std::vector<Vec3> colors;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_colors() const { return !colors.empty(); }

  void validate() const;
  void append(const PointCloud& other);
};

struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;

  bool empty() const { return triangles.empty(); }
  double triangle_area(std::size_t i) const;
  void validate() const;
  void append(const TriMesh& other);
};

struct Aabb {
  Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void extend(const Vec3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  bool empty() const { return !(min.array() <= max.array()).all(); }
};

Aabb bounds(const std::vector<Vec3>& points);

PointCloud transform(const PointCloud& cloud, const Rigid& t);
TriMesh transform(const TriMesh& mesh, const Rigid& t);

}  // namespace arbor
