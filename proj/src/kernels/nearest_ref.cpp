#include "arbor/kernels/nearest.hpp"

namespace arbor::kernels {

std::vector<KdTree::Hit> nearest_all_ref(const KdTree& index, std::span<const Vec3> queries) {
  std::vector<KdTree::Hit> hits;
  hits.reserve(queries.size());
  for (const auto& q : queries) hits.push_back(index.nearest(q));
  return hits;
}

std::vector<KdTree::Hit> nearest_within_all_ref(const KdTree& index, std::span<const Vec3> queries,
                                                double max_distance) {
  std::vector<KdTree::Hit> hits;
  hits.reserve(queries.size());
  for (const auto& q : queries) hits.push_back(index.nearest_within(q, max_distance));
  return hits;
}

std::vector<std::vector<KdTree::Hit>> self_knn_ref(const KdTree& index, std::size_t k) {
  std::vector<std::vector<KdTree::Hit>> rows(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    auto hits = index.knn(index.point(i), k + 1);
    std::erase_if(hits, [i](const KdTree::Hit& h) { return h.index == i; });
    if (hits.size() > k) hits.resize(k);
    rows[i] = std::move(hits);
  }
  return rows;
}

}  // namespace arbor::kernels
