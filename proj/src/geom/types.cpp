#include "arbor/geom/types.hpp"

#include <string>

#include <Eigen/SVD>

#include "arbor/common/error.hpp"

namespace arbor {

void CameraIntrinsics::validate() const {
  require(width > 0 && height > 0, "intrinsics: image size must be positive");
  require(std::isfinite(fx) && std::isfinite(fy) && fx > 0 && fy > 0,
          "intrinsics: focal lengths must be positive");
  require(cx >= 0 && cx < width && cy >= 0 && cy < height,
          "intrinsics: principal point outside the image");
}

void Rigid::validate(double tol) const {
  require(rotation.allFinite() && translation.allFinite(), "rigid transform: non-finite entry");
  const double ortho = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  require(ortho <= tol, "rigid transform: rotation is not orthonormal");
  require(std::abs(rotation.determinant() - 1.0) <= tol, "rigid transform: det(R) != +1");
}

void Rigid::orthonormalize() {
  Eigen::JacobiSVD<Mat3> svd(rotation, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1.0 : 1.0;
  rotation = svd.matrixU() * d * svd.matrixV().transpose();
}

std::size_t DepthMap::valid_count() const {
  std::size_t n = 0;
  for (double d : depth) n += std::isfinite(d) ? 1 : 0;
  return n;
}

void DepthMap::validate() const {
  require(width >= 0 && height >= 0, "depth map: negative size");
  require(depth.size() == static_cast<std::size_t>(width) * height,
          "depth map: array length does not match width*height");
  for (double d : depth) {
    if (std::isfinite(d)) require(d > 0, "depth map: finite depth must be positive");
  }
}

void PointCloud::validate() const {
  require(colors.empty() || colors.size() == points.size(),
          "point cloud: colors length does not match points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    require(points[i].allFinite(), "point cloud: non-finite coordinate at point " + std::to_string(i));
  }
}

void PointCloud::append(const PointCloud& other) {
  const bool keep_colors = (empty() || has_colors()) && other.has_colors();
  points.insert(points.end(), other.points.begin(), other.points.end());
  if (keep_colors) {
    colors.insert(colors.end(), other.colors.begin(), other.colors.end());
  } else {
    colors.clear();
  }
}

double TriMesh::triangle_area(std::size_t i) const {
  const auto& t = triangles[i];
  const Vec3 e1 = vertices[t[1]] - vertices[t[0]];
  const Vec3 e2 = vertices[t[2]] - vertices[t[0]];
  return 0.5 * e1.cross(e2).norm();
}

void TriMesh::validate() const {
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    require(vertices[i].allFinite(), "mesh: non-finite vertex " + std::to_string(i));
  }
  for (std::size_t i = 0; i < triangles.size(); ++i) {
    for (auto idx : triangles[i]) {
      require(idx < vertices.size(), "mesh: triangle " + std::to_string(i) + " index out of range");
    }
    require(triangle_area(i) > 0.0, "mesh: degenerate triangle " + std::to_string(i));
  }
}

void TriMesh::append(const TriMesh& other) {
  const auto offset = static_cast<std::uint32_t>(vertices.size());
  vertices.insert(vertices.end(), other.vertices.begin(), other.vertices.end());
  triangles.reserve(triangles.size() + other.triangles.size());
  for (const auto& t : other.triangles) {
    triangles.push_back({t[0] + offset, t[1] + offset, t[2] + offset});
  }
}

Aabb bounds(const std::vector<Vec3>& points) {
  Aabb box;
  for (const auto& p : points) box.extend(p);
  return box;
}

PointCloud transform(const PointCloud& cloud, const Rigid& t) {
  PointCloud out;
  out.points.reserve(cloud.size());
  for (const auto& p : cloud.points) out.points.push_back(t.apply(p));
  out.colors = cloud.colors;
  return out;
}

TriMesh transform(const TriMesh& mesh, const Rigid& t) {
  TriMesh out = mesh;
  for (auto& v : out.vertices) v = t.apply(v);
  return out;
}

}  // namespace arbor
