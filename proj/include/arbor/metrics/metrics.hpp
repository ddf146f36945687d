#pragma once

#include <cstddef>
#include <vector>

#include "arbor/geom/types.hpp"

namespace arbor {

/// 1/2 (mean_a min_b |a-b| + mean_b min_a |a-b|). With `squared`, the
/// distances are squared before averaging. Throws InvalidInput on empty input.
double chamfer_l2(const PointCloud& a, const PointCloud& b, bool squared = false);

/// Jensen-Shannon divergence (nats) between voxel-occupancy distributions
/// on a shared grid anchored at the union bounding-box minimum.
double jsd(const PointCloud& a, const PointCloud& b, double voxel_size);

struct GeomMetrics {
  double chamfer_l2 = 0.0;
  double jsd = 0.0;
  std::size_t n_source = 0;
  std::size_t n_target = 0;
  double voxel_size = 0.05;
};

GeomMetrics geom_metrics(const PointCloud& pred, const PointCloud& gt, double voxel_size = 0.05);

struct ErrorStats {
  std::size_t n = 0;
  double mae_mean = 0.0;
  double mae_std = 0.0;
  double mae_p75 = 0.0;
  /// Percent. Computed over items with non-zero ground truth.
  double mape_mean = 0.0;
  double mape_std = 0.0;
  double mape_p75 = 0.0;
  std::size_t mape_n = 0;
  std::size_t mape_excluded = 0;
};

/// Absolute and absolute-percentage errors summarised by mean, population
/// std and the 75th percentile (linear interpolation).
ErrorStats error_stats(const std::vector<double>& estimates, const std::vector<double>& ground_truth);

double mean(const std::vector<double>& v);
double population_std(const std::vector<double>& v);
/// Linear interpolation between order statistics at rank q (n - 1).
double percentile(std::vector<double> v, double q);

}  // namespace arbor
