#pragma once

#include <span>
#include <vector>

#include "arbor/geom/kdtree.hpp"

namespace arbor::kernels {

/// Nearest indexed point for every query, OpenMP-parallel over queries.
std::vector<KdTree::Hit> nearest_all(const KdTree& index, std::span<const Vec3> queries);

/// Serial reference for nearest_all. Results are identical.
std::vector<KdTree::Hit> nearest_all_ref(const KdTree& index, std::span<const Vec3> queries);

/// KdTree::nearest_within for every query. Misses carry index KdTree::kNone.
std::vector<KdTree::Hit> nearest_within_all(const KdTree& index, std::span<const Vec3> queries, double max_distance);
std::vector<KdTree::Hit> nearest_within_all_ref(const KdTree& index, std::span<const Vec3> queries,
                                                double max_distance);

/// k nearest neighbours of every indexed point, excluding the point itself.
/// Row i holds up to k hits for point i, sorted by (distance, index).
std::vector<std::vector<KdTree::Hit>> self_knn(const KdTree& index, std::size_t k);
std::vector<std::vector<KdTree::Hit>> self_knn_ref(const KdTree& index, std::size_t k);

}  // namespace arbor::kernels
