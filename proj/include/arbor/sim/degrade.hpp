#pragma once

#include <cstdint>
#include <limits>

#include "arbor/geom/types.hpp"

namespace arbor {

/// Stereo-like depth corruption.
struct NoiseSpec {
  double sigma_a = 0.0;  // m, constant term of the noise std
  double sigma_b = 0.0;  // 1/m, coefficient of d^2 in the noise std
  int dropout_edge_px = 0;
  double max_range = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;

  void validate() const;
};

inline constexpr double kDiscontinuityStep = 0.1;  // m per pixel
inline constexpr double kEdgeDropProbability = 0.5;

/// d -> d + N(0, sigma_a + sigma_b d^2); pixels within dropout_edge_px of a
/// depth discontinuity (neighbour step > 0.1 m or a valid/invalid boundary)
/// are dropped with probability 0.5; results beyond max_range (or <= 0) become
/// invalid. Draws are counter-based per pixel, so output depends only on
/// (depth, spec).
DepthMap degrade_depth(const DepthMap& depth, const NoiseSpec& noise);

}  // namespace arbor
