#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "support/support.hpp"

namespace arbor::test_support {

/// Chamfer distance by exhaustive search, summed in index order.
inline double brute_chamfer(const PointCloud& a, const PointCloud& b) {
  double sa = 0.0, sb = 0.0;
  for (const auto& p : a.points) sa += brute_nearest(b.points, p).second;
  for (const auto& p : b.points) sb += brute_nearest(a.points, p).second;
  return 0.5 * (sa / static_cast<double>(a.size()) + sb / static_cast<double>(b.size()));
}

// Dense histogram over the union box with n^3 cells.
inline double dense_jsd(const PointCloud& a, const PointCloud& b, double voxel, int n) {
  Vec3 lo = a.points[0];
  for (const auto* c : {&a, &b}) {
    for (const auto& p : c->points) lo = lo.cwiseMin(p);
  }
  auto hist = [&](const PointCloud& c) {
    std::vector<double> h(static_cast<std::size_t>(n * n * n), 0.0);
    for (const auto& p : c.points) {
      int idx[3];
      for (int k = 0; k < 3; ++k) idx[k] = std::min(n - 1, static_cast<int>(std::floor((p[k] - lo[k]) / voxel)));
      h[static_cast<std::size_t>((idx[2] * n + idx[1]) * n + idx[0])] += 1.0 / static_cast<double>(c.size());
    }
    return h;
  };
  const auto p = hist(a), q = hist(b);
  double js = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0) js += 0.5 * p[i] * std::log(p[i] / m);
    if (q[i] > 0) js += 0.5 * q[i] * std::log(q[i] / m);
  }
  return js;
}

}  // namespace arbor::test_support
