#include "arbor/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "arbor/common/error.hpp"
#include "arbor/geom/kdtree.hpp"
#include "arbor/geom/voxel.hpp"
#include "arbor/kernels/nearest.hpp"

namespace arbor {

namespace {

double directed_mean(const PointCloud& from, const KdTree& to, bool squared) {
  const auto hits = kernels::nearest_all(to, from.points);
  double sum = 0.0;
  for (const auto& h : hits) sum += squared ? h.distance * h.distance : h.distance;
  return sum / static_cast<double>(hits.size());
}

}  // namespace

double chamfer_l2(const PointCloud& a, const PointCloud& b, bool squared) {
  require(!a.empty() && !b.empty(), "chamfer_l2: clouds must be non-empty");
  const KdTree ia(a.points), ib(b.points);
  return 0.5 * (directed_mean(a, ib, squared) + directed_mean(b, ia, squared));
}

double jsd(const PointCloud& a, const PointCloud& b, double voxel_size) {
  require(!a.empty() && !b.empty(), "jsd: clouds must be non-empty");
  require(voxel_size > 0 && std::isfinite(voxel_size), "jsd: voxel_size must be positive");
  Aabb box = bounds(a.points);
  for (const Vec3& p : b.points) box.extend(p);
  const VoxelGrid ga = voxelize(a, voxel_size, box.min);
  const VoxelGrid gb = voxelize(b, voxel_size, box.min);

  std::map<VoxelKey, std::pair<double, double>> joint;
  for (const auto& [k, c] : ga.counts) joint[k].first = static_cast<double>(c);
  for (const auto& [k, c] : gb.counts) joint[k].second = static_cast<double>(c);
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  double kl_p = 0.0, kl_q = 0.0;
  for (const auto& [k, c] : joint) {
    const double p = c.first / na, q = c.second / nb;
    const double m = 0.5 * (p + q);
    if (p > 0) kl_p += p * std::log(p / m);
    if (q > 0) kl_q += q * std::log(q / m);
  }
  return std::max(0.0, 0.5 * kl_p + 0.5 * kl_q);
}

GeomMetrics geom_metrics(const PointCloud& pred, const PointCloud& gt, double voxel_size) {
  GeomMetrics m;
  m.chamfer_l2 = chamfer_l2(pred, gt);
  m.jsd = jsd(pred, gt, voxel_size);
  m.n_source = pred.size();
  m.n_target = gt.size();
  m.voxel_size = voxel_size;
  return m;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double population_std(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

double percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

ErrorStats error_stats(const std::vector<double>& estimates, const std::vector<double>& ground_truth) {
  require(estimates.size() == ground_truth.size(), "error_stats: length mismatch");
  require(!estimates.empty(), "error_stats: no items");
  std::vector<double> ae, ape;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    require(std::isfinite(estimates[i]) && std::isfinite(ground_truth[i]), "error_stats: non-finite value");
    const double e = std::abs(estimates[i] - ground_truth[i]);
    ae.push_back(e);
    if (ground_truth[i] != 0.0) ape.push_back(100.0 * e / std::abs(ground_truth[i]));
  }
  ErrorStats s;
  s.n = ae.size();
  s.mae_mean = mean(ae);
  s.mae_std = population_std(ae);
  s.mae_p75 = percentile(ae, 0.75);
  s.mape_n = ape.size();
  s.mape_excluded = ae.size() - ape.size();
  s.mape_mean = mean(ape);
  s.mape_std = population_std(ape);
  s.mape_p75 = percentile(ape, 0.75);
  return s;
}

}  // namespace arbor
