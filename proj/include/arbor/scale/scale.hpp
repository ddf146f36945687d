#pragma once

#include <optional>

#include "arbor/geom/types.hpp"

namespace arbor {

struct ScaleResult {
  double s = 1.0;
  double h_ref = 0.0;  // m
  double h_rec = 0.0;
};

/// s = h_ref / h_rec. Throws InvalidInput unless both heights are positive.
ScaleResult scale_factor(double h_ref, double h_rec);

/// Base centroid: mean x and y with the minimum z.
Vec3 base_center(const std::vector<Vec3>& points);

/// p -> center + s (p - center); center defaults to base_center.
PointCloud apply_scale(const PointCloud& cloud, double s, std::optional<Vec3> center = std::nullopt);
TriMesh apply_scale(const TriMesh& mesh, double s, std::optional<Vec3> center = std::nullopt);

/// Scales `rec` so that its tree_height matches the reference height.
struct ScaledCloud {
  PointCloud cloud;
  ScaleResult scale;
};
ScaledCloud retrieve_scale(const PointCloud& reference, const PointCloud& rec);
ScaledCloud retrieve_scale(double h_ref, const PointCloud& rec);

}  // namespace arbor
