#include <gtest/gtest.h>

#include "arbor/common/error.hpp"
#include "arbor/geom/camera.hpp"
#include "arbor/seg/background.hpp"
#include "arbor/seg/kmeans.hpp"
#include "arbor/sim/degrade.hpp"
#include "arbor/sim/render.hpp"
#include "arbor/sim/trajectory.hpp"
#include "arbor/tree/tree_gen.hpp"
#include "support/scenes.hpp"
#include "support/support.hpp"

using namespace arbor;

using test_support::LabeledFrame;
using test_support::render_row;
using test_support::subset;
using test_support::target_iou;

TEST(KMeans, SeparatedBlobsRecovered) {
  Rng rng(3);
  std::vector<double> x;
  const double centers[3][2] = {{0, 0}, {5, 5}, {0, 8}};
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 200; ++i) {
      x.push_back(centers[c][0] + 0.1 * rng.normal());
      x.push_back(centers[c][1] + 0.1 * rng.normal());
    }
  const KMeansResult r = kmeans(x, 2, {3, 100, 1e-6, 1});
  for (int c = 0; c < 3; ++c) {
    const auto l = r.labels[c * 200];
    for (int i = 0; i < 200; ++i) EXPECT_EQ(r.labels[c * 200 + i], l);
  }
  EXPECT_NE(r.labels[0], r.labels[200]);
  EXPECT_NE(r.labels[0], r.labels[400]);
  EXPECT_NE(r.labels[200], r.labels[400]);
}

TEST(KMeans, ObjectiveNeverIncreases) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    Rng rng(s);
    std::vector<double> x(3 * 500);
    for (auto& v : x) v = rng.uniform();
    const KMeansResult r = kmeans(x, 3, {5, 100, 0.0, s});
    ASSERT_EQ(static_cast<int>(r.objective.size()), r.iterations);
    for (std::size_t i = 1; i < r.objective.size(); ++i) ASSERT_LE(r.objective[i], r.objective[i - 1] * (1 + 1e-12));
  }
}

TEST(KMeans, DeterministicAndValidated) {
  std::vector<double> x;
  Rng rng(1);
  for (int i = 0; i < 100; ++i) x.push_back(rng.uniform());
  const auto a = kmeans(x, 1, {4, 100, 1e-6, 9});
  const auto b = kmeans(x, 1, {4, 100, 1e-6, 9});
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.centroids, b.centroids);
  EXPECT_THROW(kmeans(x, 1, {101, 100, 1e-6, 0}), InvalidInput);
  EXPECT_THROW(kmeans(x, 1, {0, 100, 1e-6, 0}), InvalidInput);
}

TEST(DistanceFilter, Examples) {
  const SegMask all = distance_filter(DepthMap(10, 10, 2.0), 3.0);
  EXPECT_EQ(all.kept(), 100u);
  const SegMask none = distance_filter(DepthMap(10, 10), 3.0);
  EXPECT_EQ(none.kept(), 0u);
  EXPECT_EQ(none.stage_counts().at("far"), 100u);
  DepthMap half(10, 10, 2.0);
  for (int v = 0; v < 10; ++v)
    for (int u = 5; u < 10; ++u) half.at(u, v) = 5.0;
  const SegMask m = distance_filter(half, 3.0);
  EXPECT_EQ(m.kept(), 50u);
  for (int v = 0; v < 10; ++v)
    for (int u = 0; u < 10; ++u) EXPECT_EQ(m.keep[v * 10 + u], u < 5 ? 1 : 0);
  EXPECT_THROW(distance_filter(half, 0.0), InvalidInput);
}

TEST(SkyMask, Examples) {
  DepthMap mono(2, 1, 0.0);
  mono.depth[1] = 1.0;
  const SegMask m = sky_mask(mono, 0.05);
  EXPECT_EQ(m.keep[0], 0);
  EXPECT_EQ(m.provenance[0], Stage::kSky);
  EXPECT_EQ(m.keep[1], 1);
  EXPECT_THROW(sky_mask(mono, 0.0), InvalidInput);
  EXPECT_THROW(sky_mask(mono, 1.0), InvalidInput);
}

TEST(SkyMask, RecoversRenderedBackground) {
  const LabeledFrame f = render_row(5, 0, false, false);
  const SegMask m = sky_mask(f.bundle.mono, 0.05);
  std::size_t bg = 0, bg_removed = 0, tree = 0, tree_removed = 0;
  for (std::size_t i = 0; i < m.keep.size(); ++i) {
    if (f.labels[i] == kLabelBackground) {
      ++bg;
      bg_removed += !m.keep[i];
    } else {
      ++tree;
      tree_removed += !m.keep[i];
    }
  }
  ASSERT_GT(tree, 1000u);
  EXPECT_GE(static_cast<double>(bg_removed), 0.99 * bg);
  EXPECT_LE(static_cast<double>(tree_removed), 0.01 * tree);
}

TEST(GroundMask, FlatPlaneRemoved) {
  CameraIntrinsics k;
  k.width = 160;
  k.height = 100;
  k.fx = k.fy = 90;
  k.cx = 80;
  k.cy = 50;
  const Pose pose = Pose::from(look_rotation(Vec3(0, 1, -0.5)), Vec3(0, 0, 1.5));
  FrameBundle b;
  b.intr = k;
  b.pose = pose;
  b.depth = render_depth(ground_plane(Vec3::Zero()), k, pose);
  b.mono = relative_inverse_depth(b.depth);
  const SegMask m = ground_mask(b, 0.05);
  std::size_t valid = 0;
  for (std::size_t i = 0; i < m.keep.size(); ++i) {
    if (b.depth.valid(i)) {
      ++valid;
      EXPECT_EQ(m.keep[i], 0);
      EXPECT_EQ(m.provenance[i], Stage::kGround);
    }
  }
  EXPECT_GT(valid, 1000u);
}

TEST(GroundMask, TrunkPointKept) {
  CameraIntrinsics k;
  k.width = 3;
  k.height = 3;
  k.fx = k.fy = 10;
  k.cx = k.cy = 1;
  FrameBundle b;
  b.intr = k;
  b.pose = Pose::from(look_rotation(Vec3(0, 1, 0)), Vec3(0, -2, 0.5));
  b.depth = DepthMap(3, 3);
  b.depth.at(1, 1) = 2.0;
  b.mono = DepthMap(3, 3, 0.0);
  b.mono.at(1, 1) = 1.0;
  const SegMask m = ground_mask(b, 0.05);
  EXPECT_EQ(m.keep[4], 1);
}

TEST(GroundMask, RecallOnRenderedScene) {
  const LabeledFrame f = render_row(6, 0, true, true);
  const SegMask near = distance_filter(f.bundle.depth, 5.0);
  const SegMask m = ground_mask(f.bundle, 0.05);
  std::size_t ground = 0, removed = 0;
  for (std::size_t i = 0; i < m.keep.size(); ++i) {
    if (f.labels[i] == kLabelGround && near.keep[i]) {
      ++ground;
      removed += !m.keep[i];
    }
  }
  ASSERT_GT(ground, 1000u);
  EXPECT_GE(static_cast<double>(removed), 0.99 * ground);
}

TEST(ClusterFilter, SingleClusterUnchanged) {
  const LabeledFrame f = render_row(7, 0, false, false);
  const SegMask base = distance_filter(f.bundle.depth, 10.0);
  const ClusterResult r = cluster_filter(f.bundle, base, 1, KeepPolicy::kCenter, Vec3::UnitX(), 0);
  EXPECT_TRUE(r.applied);
  EXPECT_EQ(r.mask.keep, base.keep);
}

TEST(ClusterFilter, CentredTreeKept) {
  const LabeledFrame f = render_row(8, 1, false, false, 0, 29, 3.3);
  const SegMask base = distance_filter(f.bundle.depth, 10.0);
  const ClusterResult r = cluster_filter(f.bundle, base, 2, KeepPolicy::kCenter, Vec3::UnitX(), 1);
  std::size_t target = 0, target_kept = 0, other = 0, other_kept = 0;
  double u_target = 0, u_other = 0;
  for (std::size_t i = 0; i < r.mask.keep.size(); ++i) {
    const double u = static_cast<double>(i % f.bundle.intr.width);
    if (f.labels[i] == kLabelTarget) {
      ++target;
      target_kept += r.mask.keep[i];
      u_target += u;
    } else if (f.labels[i] > kLabelTarget) {
      ++other;
      other_kept += r.mask.keep[i];
      u_other += u;
    }
  }
  ASSERT_GT(other, 1000u);
  EXPECT_GT(std::abs(u_target / target - u_other / other), f.bundle.intr.width / 2.0);
  EXPECT_EQ(target_kept, target);
  EXPECT_EQ(other_kept, 0u);
}

TEST(ClusterFilter, TooFewPixelsWarns) {
  const LabeledFrame f = render_row(7, 0, false, false);
  SegMask tiny(f.bundle.depth.width, f.bundle.depth.height);
  std::fill(tiny.keep.begin(), tiny.keep.end(), 0);
  std::fill(tiny.provenance.begin(), tiny.provenance.end(), Stage::kFar);
  std::size_t n = 0;
  for (std::size_t i = 0; i < tiny.keep.size() && n < 2; ++i) {
    if (f.bundle.depth.valid(i)) {
      tiny.keep[i] = 1;
      tiny.provenance[i] = Stage::kKept;
      ++n;
    }
  }
  const ClusterResult r = cluster_filter(f.bundle, tiny, 3, KeepPolicy::kCenter, Vec3::UnitX(), 0);
  EXPECT_FALSE(r.applied);
  EXPECT_FALSE(r.warning.empty());
  EXPECT_EQ(r.mask.keep, tiny.keep);
}

TEST(SegmentTree, SingleTreeMatchesLabels) {
  const LabeledFrame f = render_row(9, 0, false, false);
  SegConfig cfg;
  cfg.k = 1;
  cfg.max_range = 10;
  cfg.z_ground = -1;
  const SegmentResult r = segment_tree(f.bundle, cfg);
  EXPECT_GE(target_iou(r.mask, f), 0.99);
  EXPECT_EQ(r.cloud.size(), r.mask.kept());
}

TEST(SegmentTree, GroundOnlyIsEmpty) {
  CameraIntrinsics k;
  k.width = 160;
  k.height = 100;
  k.fx = k.fy = 90;
  k.cx = 80;
  k.cy = 50;
  FrameBundle b;
  b.intr = k;
  b.pose = Pose::from(look_rotation(Vec3(0, 1, -0.3)), Vec3(0, 0, 1.5));
  b.depth = render_depth(ground_plane(Vec3::Zero()), k, b.pose);
  b.mono = relative_inverse_depth(b.depth);
  try {
    segment_tree(b, SegConfig{});
    FAIL() << "expected EmptySegmentation";
  } catch (const EmptySegmentation& e) {
    std::size_t total = 0;
    for (const auto& [name, n] : e.stage_counts()) total += n;
    EXPECT_EQ(total, k.pixel_count());
    EXPECT_EQ(e.stage_counts().at("kept"), 0u);
  }
}

TEST(SegmentTree, ThreeTreeRowKeepsCentreTree) {
  for (int frame : {0, 7, 14}) {
    const LabeledFrame f = render_row(10, 2, true, true, frame, 15);
    SegConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(frame);
    const SegmentResult r = segment_tree(f.bundle, cfg);
    EXPECT_GE(target_iou(r.mask, f), 0.95) << "frame " << frame;
    std::size_t neighbour_kept = 0;
    for (std::size_t i = 0; i < r.mask.keep.size(); ++i) neighbour_kept += r.mask.keep[i] && f.labels[i] > kLabelTarget;
    EXPECT_LE(neighbour_kept, r.mask.kept() / 100);
  }
}

TEST(SegmentTree, MonotoneStagesAndCompleteProvenance) {
  for (int frame : {0, 5}) {
    const LabeledFrame f = render_row(12, 2, true, true, frame, 15);
    const SegmentResult r = segment_tree(f.bundle, SegConfig{});
    for (int s = 1; s < 4; ++s) EXPECT_TRUE(subset(r.stages[s], r.stages[s - 1]));
    EXPECT_TRUE(subset(r.mask, r.stages[3]));
    EXPECT_EQ(r.mask.keep, r.stages[3].keep);
    std::size_t total = 0;
    for (const auto& [name, n] : r.mask.stage_counts()) total += n;
    EXPECT_EQ(total, f.bundle.intr.pixel_count());
    for (std::size_t i = 0; i < r.mask.keep.size(); ++i) {
      ASSERT_EQ(r.mask.keep[i] != 0, r.mask.provenance[i] == Stage::kKept);
    }
  }
}

TEST(SegmentTree, DeterministicForSeed) {
  const LabeledFrame f = render_row(13, 2, true, true);
  SegConfig cfg;
  cfg.seed = 77;
  const SegmentResult a = segment_tree(f.bundle, cfg);
  const SegmentResult b = segment_tree(f.bundle, cfg);
  EXPECT_EQ(a.mask.keep, b.mask.keep);
  EXPECT_EQ(a.mask.provenance, b.mask.provenance);
  ASSERT_EQ(a.cloud.size(), b.cloud.size());
  for (std::size_t i = 0; i < a.cloud.size(); ++i) ASSERT_EQ(a.cloud.points[i], b.cloud.points[i]);
}

TEST(SegMask, IntersectKeepsFirstRemovalLabel) {
  SegMask a(3, 1), b(3, 1);
  a.keep = {1, 0, 1};
  a.provenance = {Stage::kKept, Stage::kFar, Stage::kKept};
  b.keep = {0, 0, 1};
  b.provenance = {Stage::kSky, Stage::kSky, Stage::kKept};
  a.intersect(b);
  EXPECT_EQ(a.keep, (std::vector<std::uint8_t>{0, 0, 1}));
  EXPECT_EQ(a.provenance[1], Stage::kFar);
}
