#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace arbor {

struct KMeansParams {
  int k = 3;
  int max_iter = 100;
  double tol = 1e-6;  // stop when the objective improves by less than this (relative)
  std::uint64_t seed = 0;
};

struct KMeansResult {
  int dim = 0;
  std::vector<double> centroids;     // k x dim, row-major
  std::vector<std::uint32_t> labels; // per point
  /// Sum of squared distances after each assignment step.
  std::vector<double> objective;
  int iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding on row-major `features`
/// (n x dim). Assignment ties go to the lowest cluster index; a cluster that
/// loses all members keeps its previous centroid. Requires n >= k >= 1.
KMeansResult kmeans(std::span<const double> features, int dim, const KMeansParams& params);

}  // namespace arbor
