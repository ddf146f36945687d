#pragma once

#include <cstddef>

#include "arbor/geom/skeleton.hpp"
#include "arbor/geom/types.hpp"
#include "arbor/qsm/trait_report.hpp"

namespace arbor {

struct QsmParams {
  double slice_thickness = 0.02;   // m, half-width of the measurement slab
  double measure_height = 0.30;    // m of trunk arc length above the root
  int knn_k = 10;
  double level_step = 0.04;        // m of geodesic distance per level
  double min_branch_length = 0.05; // m
  int min_branch_points = 30;
  double circle_fit_max_rmse = 0.01;  // m
  /// Largest fraction of points allowed outside the main k-NN component.
  double max_orphan_fraction = 0.01;

  void validate() const;
};

/// Robust vertical extent: z percentile spread after statistical outlier
/// removal (mean 8-NN distance above mean + 2 std). Needs >= 10 points.
double tree_height(const PointCloud& cloud, double p_lo = 0.01, double p_hi = 0.99);

/// Points kept by the outlier filter used in tree_height, ascending.
std::vector<std::size_t> statistical_inliers(const PointCloud& cloud, int k = 8, double std_ratio = 2.0);

/// Geodesic level-set skeleton. Throws SkeletonizationError when too many
/// points fall outside the main k-NN component.
SkeletonGraph extract_skeleton(const PointCloud& cloud, const QsmParams& params = {});

struct CircleFit {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 0.0;
  double rmse = 0.0;
};

/// Algebraic fit refined by Gauss-Newton on geometric residuals.
/// Throws TraitUnavailable for fewer than 3 points or a degenerate fit.
CircleFit fit_circle(const std::vector<Eigen::Vector2d>& pts);

struct DiameterResult {
  double diameter = 0.0;
  CircleFit fit;
  std::size_t slice_points = 0;
};

/// Circle fit in the plane normal to the trunk at `measure_height` of arc
/// length. Throws TraitUnavailable when the slice is empty or the fit is poor.
DiameterResult trunk_diameter(const PointCloud& cloud, const SkeletonGraph& skeleton, const QsmParams& params = {});

/// Side subtrees of the trunk path that reach min_branch_length and, when the
/// skeleton carries support counts, hold at least min_branch_points points.
int count_branches(const SkeletonGraph& skeleton, const QsmParams& params = {});

/// Height, skeleton, diameter and branch count. Unavailable traits are left
/// empty with a reason instead of throwing.
TraitReport extract_traits(const PointCloud& cloud, const QsmParams& params = {});

}  // namespace arbor
