#include "arbor/seg/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "arbor/common/error.hpp"
#include "arbor/common/rng.hpp"

namespace arbor {

namespace {

double sq_dist(const double* a, const double* b, int dim) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d) {
    const double t = a[d] - b[d];
    s += t * t;
  }
  return s;
}

}  // namespace

KMeansResult kmeans(std::span<const double> features, int dim, const KMeansParams& params) {
  require(dim >= 1, "kmeans: dimension must be >= 1");
  require(features.size() % dim == 0, "kmeans: feature buffer is not n x dim");
  const std::size_t n = features.size() / dim;
  const int k = params.k;
  require(k >= 1, "kmeans: k must be >= 1");
  require(n >= static_cast<std::size_t>(k), "kmeans: fewer points than clusters");
  const double* x = features.data();

  KMeansResult res;
  res.dim = dim;
  res.centroids.assign(static_cast<std::size_t>(k) * dim, 0.0);
  res.labels.assign(n, 0);

  // k-means++ seeding.
  Rng rng = Rng::stream(params.seed, "kmeans++");
  std::size_t first = rng.index(n);
  std::copy(x + first * dim, x + (first + 1) * dim, res.centroids.begin());
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(x + i * dim, res.centroids.data(), dim);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t pick = n - 1;
    if (total > 0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.index(n);
    }
    double* centroid = res.centroids.data() + static_cast<std::size_t>(c) * dim;
    std::copy(x + pick * dim, x + (pick + 1) * dim, centroid);
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(x + i * dim, centroid, dim));
  }

  std::vector<double> sums(static_cast<std::size_t>(k) * dim);
  std::vector<std::size_t> counts(k);
  for (int it = 0; it < params.max_iter; ++it) {
    // Assignment.
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::uint32_t best_c = 0;
      for (int c = 0; c < k; ++c) {
        const double d = sq_dist(x + i * dim, res.centroids.data() + static_cast<std::size_t>(c) * dim, dim);
        if (d < best) {
          best = d;
          best_c = static_cast<std::uint32_t>(c);
        }
      }
      res.labels[i] = best_c;
      objective += best;
    }
    res.objective.push_back(objective);
    res.iterations = it + 1;
    if (it > 0) {
      const double prev = res.objective[it - 1];
      if (prev - objective <= params.tol * std::max(prev, 1e-300)) break;
    }
    // Update.
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = res.labels[i];
      ++counts[c];
      for (int d = 0; d < dim; ++d) sums[c * dim + d] += x[i * dim + d];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (int d = 0; d < dim; ++d) {
        res.centroids[static_cast<std::size_t>(c) * dim + d] = sums[static_cast<std::size_t>(c) * dim + d] / counts[c];
      }
    }
  }
  return res;
}

}  // namespace arbor
