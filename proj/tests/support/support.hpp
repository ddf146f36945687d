#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "arbor/common/rng.hpp"
#include "arbor/geom/types.hpp"

namespace arbor::test_support {

inline PointCloud random_cloud(std::size_t n, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  Rng rng(seed);
  PointCloud c;
  c.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) c.points.emplace_back(rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi));
  return c;
}

/// Exhaustive nearest neighbour, lowest index on ties.
inline std::pair<std::size_t, double> brute_nearest(const std::vector<Vec3>& pts, const Vec3& q) {
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double dx = pts[i].x() - q.x();
    const double dy = pts[i].y() - q.y();
    const double dz = pts[i].z() - q.z();
    const double d2 = dx * dx + dy * dy + dz * dz;
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return {best, std::sqrt(best_d2)};
}

/// Random rotation from a uniformly drawn axis and an angle in [0, max_angle].
inline Mat3 random_rotation(Rng& rng, double max_angle) {
  Vec3 axis(rng.normal(), rng.normal(), rng.normal());
  axis.normalize();
  return Eigen::AngleAxisd(rng.uniform(0.0, max_angle), axis).toRotationMatrix();
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("arbor_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Two triangles spanning [0,1]^2 at z = 0.
inline TriMesh unit_square(double z = 0.0) {
  TriMesh m;
  m.vertices = {Vec3(0, 0, z), Vec3(1, 0, z), Vec3(1, 1, z), Vec3(0, 1, z)};
  m.triangles = {{0, 1, 2}, {0, 2, 3}};
  return m;
}

/// Open cylinder surface along z with points drawn uniformly in angle and height.
inline PointCloud cylinder_cloud(double radius, double height, std::size_t n, std::uint64_t seed,
                                 double max_angle = 6.283185307179586) {
  Rng rng(seed);
  PointCloud c;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = rng.uniform(0.0, max_angle);
    c.points.emplace_back(radius * std::cos(a), radius * std::sin(a), rng.uniform(0.0, height));
  }
  return c;
}

/// Closest point on triangle abc to p (Voronoi-region walk).
inline Vec3 closest_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + (d1 / (d1 - d3)) * ab;
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + (d2 / (d2 - d6)) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

/// Exact point-to-mesh distance, brute force over all triangles.
inline double mesh_distance(const Vec3& p, const TriMesh& m) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : m.triangles) {
    const Vec3 q = closest_on_triangle(p, m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]);
    best = std::min(best, (q - p).norm());
  }
  return best;
}

}  // namespace arbor::test_support
