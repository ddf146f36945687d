#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "arbor/geom/types.hpp"

namespace arbor {

struct SkeletonNode {
  Vec3 position = Vec3::Zero();
  double radius = 0.0;
};

/// Tree-shaped curve skeleton.
struct SkeletonGraph {
  std::vector<SkeletonNode> nodes;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  /// Base to apex.
  std::vector<std::uint32_t> trunk_path;
  /// Trunk nodes where first-order branches attach.
  std::vector<std::uint32_t> branch_roots;
  /// Points supporting each node when extracted from a cloud; empty for
  /// generated skeletons.
  std::vector<std::uint32_t> support;

  /// |E| = |V| - 1, connected, radii > 0, trunk_path a simple path along edges.
  /// Throws InvalidInput describing the first violation.
  void validate() const;

  std::vector<std::vector<std::uint32_t>> adjacency() const;
  /// Cumulative arc length along trunk_path, starting at 0.
  std::vector<double> trunk_arc_length() const;
};

SkeletonGraph transform(const SkeletonGraph& skeleton, const Rigid& t);

}  // namespace arbor
