#include "arbor/sim/degrade.hpp"

#include <algorithm>
#include <cmath>

#include "arbor/common/error.hpp"
#include "arbor/common/rng.hpp"

namespace arbor {

void NoiseSpec::validate() const {
  require(sigma_a >= 0 && sigma_b >= 0 && std::isfinite(sigma_a) && std::isfinite(sigma_b),
          "noise spec: sigmas must be finite and non-negative");
  require(dropout_edge_px >= 0, "noise spec: dropout_edge_px must be non-negative");
  require(max_range >= 0, "noise spec: max_range must be non-negative");
}

namespace {

bool is_step(const DepthMap& d, std::size_t a, std::size_t b) {
  const bool va = std::isfinite(d.depth[a]);
  const bool vb = std::isfinite(d.depth[b]);
  if (va != vb) return true;
  return va && std::abs(d.depth[a] - d.depth[b]) > kDiscontinuityStep;
}

/// Pixels whose Chebyshev distance to a discontinuity is <= radius.
std::vector<char> edge_band(const DepthMap& d, int radius) {
  const int w = d.width, h = d.height;
  std::vector<char> edge(d.size(), 0);
#pragma omp parallel for schedule(static)
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const std::size_t i = static_cast<std::size_t>(v) * w + u;
      if ((u + 1 < w && is_step(d, i, i + 1)) || (v + 1 < h && is_step(d, i, i + w)) ||
          (u > 0 && is_step(d, i, i - 1)) || (v > 0 && is_step(d, i, i - w))) {
        edge[i] = 1;
      }
    }
  }
  if (radius <= 1) return edge;
  // Separable max filter: rows then columns.
  std::vector<char> tmp(d.size(), 0), band(d.size(), 0);
  const int r = radius - 1;
#pragma omp parallel for schedule(static)
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      char any = 0;
      for (int k = std::max(0, u - r); k <= std::min(w - 1, u + r) && !any; ++k) {
        any = edge[static_cast<std::size_t>(v) * w + k];
      }
      tmp[static_cast<std::size_t>(v) * w + u] = any;
    }
  }
#pragma omp parallel for schedule(static)
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      char any = 0;
      for (int k = std::max(0, v - r); k <= std::min(h - 1, v + r) && !any; ++k) {
        any = tmp[static_cast<std::size_t>(k) * w + u];
      }
      band[static_cast<std::size_t>(v) * w + u] = any;
    }
  }
  return band;
}

}  // namespace

DepthMap degrade_depth(const DepthMap& depth, const NoiseSpec& noise) {
  noise.validate();
  depth.validate();
  DepthMap out = depth;
  const bool noisy = noise.sigma_a > 0 || noise.sigma_b > 0;
  std::vector<char> band;
  if (noise.dropout_edge_px > 0) band = edge_band(depth, noise.dropout_edge_px);
  const std::uint64_t noise_seed = mix64(noise.seed ^ hash_name("depth-noise"));
  const std::uint64_t drop_seed = mix64(noise.seed ^ hash_name("edge-dropout"));

  // Pixels 2p and 2p+1 share one Box-Muller pair.
  const auto n = static_cast<std::int64_t>(depth.size());
  const std::int64_t pairs = (n + 1) / 2;
#pragma omp parallel for schedule(static)
  for (std::int64_t p = 0; p < pairs; ++p) {
    bool need[2] = {false, false};
    for (int k = 0; k < 2; ++k) {
      const std::int64_t i = 2 * p + k;
      if (i >= n || !std::isfinite(depth.depth[i])) continue;
      if (!band.empty() && band[i] && hash_uniform(drop_seed, static_cast<std::uint64_t>(i)) < kEdgeDropProbability) {
        out.depth[i] = kInvalidDepth;
        continue;
      }
      need[k] = true;
    }
    if (!need[0] && !need[1]) continue;
    std::pair<double, double> z{0.0, 0.0};
    if (noisy) z = hash_normal_pair(noise_seed, static_cast<std::uint64_t>(p));
    for (int k = 0; k < 2; ++k) {
      if (!need[k]) continue;
      const std::int64_t i = 2 * p + k;
      double d = depth.depth[i];
      if (noisy) d += (noise.sigma_a + noise.sigma_b * d * d) * (k == 0 ? z.first : z.second);
      out.depth[i] = (d > noise.max_range || !(d > 0)) ? kInvalidDepth : d;
    }
  }
  return out;
}

}  // namespace arbor
