#pragma once

#include <cstddef>
#include <optional>
#include <string>

namespace arbor {

struct TraitDiagnostics {
  double circle_fit_rmse = 0.0;
  std::size_t slice_points = 0;
  std::size_t skeleton_nodes = 0;
};

/// Structural traits of one tree. A missing trunk_diameter or branch_count
/// means the trait was unavailable for this geometry (see `unavailable_reason`).
struct TraitReport {
  std::optional<double> trunk_diameter;  // m
  std::optional<int> branch_count;
  double tree_height = 0.0;  // m
  TraitDiagnostics diagnostics;
  std::string unavailable_reason;
};

}  // namespace arbor
