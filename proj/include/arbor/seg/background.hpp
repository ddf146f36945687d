#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "arbor/geom/types.hpp"

namespace arbor {

/// Stage that removed a pixel, or kKept.
enum class Stage : std::uint8_t { kKept = 0, kFar = 1, kSky = 2, kGround = 3, kCluster = 4 };

const char* stage_name(Stage s);

struct FrameBundle {
  DepthMap depth;  // metric
  DepthMap mono;   // relative inverse depth, background 0
  CameraIntrinsics intr;
  Pose pose;

  void validate() const;
};

struct SegMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> keep;   // 1 = foreground
  std::vector<Stage> provenance;    // exactly one label per pixel

  SegMask() = default;
  SegMask(int w, int h);

  std::size_t kept() const;
  std::map<std::string, std::size_t> stage_counts() const;
  /// Removes (with this stage's label) every pixel that `other` removed and
  /// this mask still keeps. Pixels already removed keep their first label.
  void intersect(const SegMask& other);
};

enum class KeepPolicy { kCenter, kLargest };

struct SegConfig {
  double max_range = 5.0;  // m
  double tau_sky = 0.05;
  double z_ground = 0.05;  // m
  int k = 3;
  KeepPolicy keep_policy = KeepPolicy::kCenter;
  Vec3 row_direction = Vec3::UnitX();
  std::uint64_t seed = 0;

  void validate() const;
};

SegMask distance_filter(const DepthMap& depth, double max_range);
SegMask sky_mask(const DepthMap& mono, double tau_sky);
SegMask ground_mask(const FrameBundle& bundle, double z_ground);

struct ClusterResult {
  SegMask mask;
  bool applied = true;
  std::string warning;
  std::vector<double> objective;  // k-means objective history
  int kept_cluster = -1;
};

/// K-means over (pixel column, world along-row coordinate) of kept pixels,
/// each min-max normalized to [0, 1]. Keeps one cluster per policy and marks
/// the others kCluster. With fewer kept pixels than k the mask is returned
/// unchanged and `applied` is false.
ClusterResult cluster_filter(const FrameBundle& bundle, const SegMask& current, int k, KeepPolicy policy,
                             const Vec3& row_direction, std::uint64_t seed);

struct SegmentResult {
  SegMask mask;
  PointCloud cloud;  // world frame, row-major order of kept pixels
  /// Kept set after distance, sky, ground and cluster stages.
  std::array<SegMask, 4> stages;
  std::string warning;
};

/// Full cascade. Throws EmptySegmentation (with stage counts) if nothing survives.
SegmentResult segment_tree(const FrameBundle& bundle, const SegConfig& cfg);

}  // namespace arbor
