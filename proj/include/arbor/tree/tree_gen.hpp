#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "arbor/geom/skeleton.hpp"
#include "arbor/geom/types.hpp"
#include "arbor/qsm/trait_report.hpp"

namespace arbor {

/// Parameters of one procedurally generated tall-spindle apple tree.
struct TreeParams {
  std::uint64_t seed = 0;
  double trunk_height = 2.8;           // m
  double trunk_base_diameter = 0.06;   // m
  double trunk_taper = 0.5;            // apex radius / base radius, (0, 1]
  int branch_count = 24;
  std::pair<double, double> branch_zone{0.25, 0.95};               // fractions of trunk height
  std::pair<double, double> branch_elevation_range{-20.0, 30.0};   // degrees above horizontal
  std::pair<double, double> branch_length_range{0.30, 0.90};       // m
  double branch_diameter_ratio = 0.4;  // branch base / local trunk diameter
  double curvature_noise = 0.015;      // m, lateral trunk wander amplitude

  void validate() const;
};

/// Ranges used to draw a population of TreeParams.
struct TreeParamRanges {
  std::pair<double, double> trunk_height{2.0, 3.5};
  std::pair<double, double> trunk_base_diameter{0.04, 0.08};
  std::pair<double, double> trunk_taper{0.4, 0.7};
  std::pair<int, int> branch_count{15, 35};
  TreeParams fixed;  // everything not drawn is copied from here

  TreeParams draw(std::uint64_t seed, std::uint64_t index) const;
};

struct TreeModel {
  TreeParams params;
  SkeletonGraph skeleton;
  TriMesh mesh;
  TraitReport traits;  // exact ground truth
  /// Ring count of each swept chain (trunk first, then branches in order).
  std::vector<std::uint32_t> chain_rings;
};

inline constexpr int kRingSides = 12;
inline constexpr double kTraitMeasureHeight = 0.30;  // m above the base

/// Deterministic in `params` (seed included).
TreeModel generate_tree(const TreeParams& params);

/// Triangles produced by sweeping chains with the given ring counts: each
/// chain contributes 2*sides*(rings-1) side triangles plus two fan caps of
/// `sides` triangles.
std::size_t swept_triangle_count(std::span<const std::uint32_t> chain_rings);

/// Area-uniform samples (cumulative-area inversion, barycentric sqrt method).
PointCloud sample_surface(const TriMesh& mesh, std::size_t n, std::uint64_t seed);

/// Exact traits from a generated skeleton: trunk diameter is twice the trunk
/// radius linearly interpolated at `measure_height` (world z above the trunk
/// base); branch count is |branch_roots|.
TraitReport ground_truth_traits(const SkeletonGraph& skeleton, double measure_height = kTraitMeasureHeight);

}  // namespace arbor
