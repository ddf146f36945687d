#include "arbor/seg/background.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "arbor/common/error.hpp"
#include "arbor/geom/camera.hpp"
#include "arbor/seg/kmeans.hpp"

namespace arbor {

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::kKept: return "kept";
    case Stage::kFar: return "far";
    case Stage::kSky: return "sky";
    case Stage::kGround: return "ground";
    case Stage::kCluster: return "cluster";
  }
  return "unknown";
}

void FrameBundle::validate() const {
  intr.validate();
  pose.validate();
  require(depth.width == intr.width && depth.height == intr.height, "frame bundle: depth size differs from intrinsics");
  require(mono.width == depth.width && mono.height == depth.height, "frame bundle: mono size differs from depth");
  require(depth.depth.size() == intr.pixel_count() && mono.depth.size() == intr.pixel_count(),
          "frame bundle: buffer length mismatch");
}

SegMask::SegMask(int w, int h)
    : width(w),
      height(h),
      keep(static_cast<std::size_t>(w) * h, 1),
      provenance(static_cast<std::size_t>(w) * h, Stage::kKept) {}

std::size_t SegMask::kept() const { return static_cast<std::size_t>(std::count(keep.begin(), keep.end(), 1)); }

std::map<std::string, std::size_t> SegMask::stage_counts() const {
  std::map<std::string, std::size_t> out;
  for (Stage s : {Stage::kKept, Stage::kFar, Stage::kSky, Stage::kGround, Stage::kCluster}) out[stage_name(s)] = 0;
  for (Stage s : provenance) ++out[stage_name(s)];
  return out;
}

void SegMask::intersect(const SegMask& other) {
  require(other.width == width && other.height == height, "mask intersect: size mismatch");
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] && !other.keep[i]) {
      keep[i] = 0;
      provenance[i] = other.provenance[i];
    }
  }
}

void SegConfig::validate() const {
  require(max_range > 0 && std::isfinite(max_range), "seg config: max_range must be positive");
  require(tau_sky > 0 && tau_sky < 1, "seg config: tau_sky must be in (0, 1)");
  require(std::isfinite(z_ground), "seg config: z_ground must be finite");
  require(k >= 1, "seg config: k must be >= 1");
  require(row_direction.allFinite() && row_direction.norm() > 0, "seg config: row_direction must be non-zero");
}

SegMask distance_filter(const DepthMap& depth, double max_range) {
  require(max_range > 0, "distance_filter: max_range must be positive");
  SegMask m(depth.width, depth.height);
  for (std::size_t i = 0; i < m.keep.size(); ++i) {
    if (!(depth.valid(i) && depth.depth[i] <= max_range)) {
      m.keep[i] = 0;
      m.provenance[i] = Stage::kFar;
    }
  }
  return m;
}

SegMask sky_mask(const DepthMap& mono, double tau_sky) {
  require(tau_sky > 0 && tau_sky < 1, "sky_mask: tau_sky must be in (0, 1)");
  SegMask m(mono.width, mono.height);
  for (std::size_t i = 0; i < m.keep.size(); ++i) {
    const double r = mono.depth[i];
    if (!std::isfinite(r) || r < tau_sky) {
      m.keep[i] = 0;
      m.provenance[i] = Stage::kSky;
    }
  }
  return m;
}

namespace {

Vec3 pixel_world(const FrameBundle& b, std::size_t i) {
  const int u = static_cast<int>(i % b.depth.width);
  const int v = static_cast<int>(i / b.depth.width);
  return b.pose.apply(back_project(u, v, b.depth.depth[i], b.intr));
}

}  // namespace

SegMask ground_mask(const FrameBundle& bundle, double z_ground) {
  require(std::isfinite(z_ground), "ground_mask: z_ground must be finite");
  require(bundle.depth.width == bundle.intr.width && bundle.depth.height == bundle.intr.height,
          "ground_mask: depth size differs from intrinsics");
  SegMask m(bundle.depth.width, bundle.depth.height);
  const auto n = static_cast<std::int64_t>(m.keep.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    if (bundle.depth.valid(i) && pixel_world(bundle, i).z() <= z_ground) {
      m.keep[i] = 0;
      m.provenance[i] = Stage::kGround;
    }
  }
  return m;
}

ClusterResult cluster_filter(const FrameBundle& bundle, const SegMask& current, int k, KeepPolicy policy,
                             const Vec3& row_direction, std::uint64_t seed) {
  require(k >= 1, "cluster_filter: k must be >= 1");
  require(current.width == bundle.depth.width && current.height == bundle.depth.height,
          "cluster_filter: mask size differs from frame");
  ClusterResult res;
  res.mask = current;
  const Vec3 dir = row_direction.normalized();

  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < current.keep.size(); ++i) {
    if (current.keep[i] && bundle.depth.valid(i)) idx.push_back(i);
  }
  if (idx.size() < static_cast<std::size_t>(k)) {
    res.applied = false;
    res.warning = "cluster_filter: " + std::to_string(idx.size()) + " kept pixels, fewer than k=" + std::to_string(k);
    return res;
  }

  const std::size_t n = idx.size();
  std::vector<double> raw_u(n), raw_s(n);
  for (std::size_t j = 0; j < n; ++j) {
    raw_u[j] = static_cast<double>(idx[j] % current.width);
    raw_s[j] = pixel_world(bundle, idx[j]).dot(dir);
  }
  auto normalize = [](const std::vector<double>& v, std::vector<double>& out, std::size_t stride, std::size_t off) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double span = *hi - *lo;
    for (std::size_t j = 0; j < v.size(); ++j) out[j * stride + off] = span > 0 ? (v[j] - *lo) / span : 0.0;
  };
  std::vector<double> feat(2 * n);
  normalize(raw_u, feat, 2, 0);
  normalize(raw_s, feat, 2, 1);

  KMeansParams kp;
  kp.k = k;
  kp.seed = seed;
  const KMeansResult km = kmeans(feat, 2, kp);
  res.objective = km.objective;

  std::vector<double> sum_u(k, 0.0);
  std::vector<std::size_t> count(k, 0);
  for (std::size_t j = 0; j < n; ++j) {
    sum_u[km.labels[j]] += raw_u[j];
    ++count[km.labels[j]];
  }
  int keep_c = -1;
  if (policy == KeepPolicy::kLargest) {
    for (int c = 0; c < k; ++c) {
      if (keep_c < 0 || count[c] > count[keep_c]) keep_c = c;
    }
  } else {
    const double center = 0.5 * (bundle.intr.width - 1);
    double best = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      if (count[c] == 0) continue;
      const double d = std::abs(sum_u[c] / count[c] - center);
      if (d < best) {
        best = d;
        keep_c = c;
      }
    }
  }
  res.kept_cluster = keep_c;

  for (std::size_t i = 0; i < current.keep.size(); ++i) {
    if (current.keep[i] && !bundle.depth.valid(i)) {
      res.mask.keep[i] = 0;
      res.mask.provenance[i] = Stage::kCluster;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (static_cast<int>(km.labels[j]) != keep_c) {
      res.mask.keep[idx[j]] = 0;
      res.mask.provenance[idx[j]] = Stage::kCluster;
    }
  }
  return res;
}

SegmentResult segment_tree(const FrameBundle& bundle, const SegConfig& cfg) {
  bundle.validate();
  cfg.validate();
  SegmentResult out;
  SegMask mask = distance_filter(bundle.depth, cfg.max_range);
  out.stages[0] = mask;
  mask.intersect(sky_mask(bundle.mono, cfg.tau_sky));
  out.stages[1] = mask;
  mask.intersect(ground_mask(bundle, cfg.z_ground));
  out.stages[2] = mask;
  if (mask.kept() == 0) throw EmptySegmentation("segment_tree: no pixels survive background removal", mask.stage_counts());
  ClusterResult cr = cluster_filter(bundle, mask, cfg.k, cfg.keep_policy, cfg.row_direction, cfg.seed);
  out.warning = cr.warning;
  mask = std::move(cr.mask);
  out.stages[3] = mask;
  if (mask.kept() == 0) throw EmptySegmentation("segment_tree: no pixels survive clustering", mask.stage_counts());

  out.cloud.points.reserve(mask.kept());
  for (std::size_t i = 0; i < mask.keep.size(); ++i) {
    if (mask.keep[i]) out.cloud.points.push_back(pixel_world(bundle, i));
  }
  out.mask = std::move(mask);
  return out;
}

}  // namespace arbor
