#include "arbor/kernels/nearest.hpp"

#include <cstdint>

namespace arbor::kernels {

std::vector<KdTree::Hit> nearest_all(const KdTree& index, std::span<const Vec3> queries) {
  std::vector<KdTree::Hit> hits(queries.size());
  const auto n = static_cast<std::int64_t>(queries.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) hits[i] = index.nearest(queries[i]);
  return hits;
}

std::vector<KdTree::Hit> nearest_within_all(const KdTree& index, std::span<const Vec3> queries, double max_distance) {
  std::vector<KdTree::Hit> hits(queries.size());
  const auto n = static_cast<std::int64_t>(queries.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) hits[i] = index.nearest_within(queries[i], max_distance);
  return hits;
}

std::vector<std::vector<KdTree::Hit>> self_knn(const KdTree& index, std::size_t k) {
  std::vector<std::vector<KdTree::Hit>> rows(index.size());
  const auto n = static_cast<std::int64_t>(index.size());
#pragma omp parallel for schedule(dynamic, 256)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto self = static_cast<std::size_t>(i);
    auto hits = index.knn(index.point(self), k + 1);
    std::erase_if(hits, [self](const KdTree::Hit& h) { return h.index == self; });
    if (hits.size() > k) hits.resize(k);
    rows[self] = std::move(hits);
  }
  return rows;
}

}  // namespace arbor::kernels
