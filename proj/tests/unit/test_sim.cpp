#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "arbor/common/error.hpp"
#include "arbor/geom/camera.hpp"
#include "arbor/sim/degrade.hpp"
#include "arbor/sim/render.hpp"
#include "arbor/sim/trajectory.hpp"
#include "arbor/tree/tree_gen.hpp"
#include "support/support.hpp"

using namespace arbor;

namespace {

CameraIntrinsics small_camera() {
  CameraIntrinsics k;
  k.width = 240;
  k.height = 150;
  k.fx = 134;
  k.fy = 134;
  k.cx = 120;
  k.cy = 75;
  return k;
}

/// Square [-h,h]^2 in the plane z = depth of the identity camera.
TriMesh facing_square(double depth, double h) {
  TriMesh m;
  m.vertices = {Vec3(-h, -h, depth), Vec3(h, -h, depth), Vec3(h, h, depth), Vec3(-h, h, depth)};
  m.triangles = {{0, 1, 2}, {0, 2, 3}};
  return m;
}

DepthMap constant_depth(int w, int h, double d) { return DepthMap(w, h, d); }

}  // namespace

TEST(Trajectory, TwoMilesPerHourAtFifteenFps) {
  RowSpec row;
  EXPECT_NEAR(row.frame_spacing(), 0.0596, 5e-5);
}

TEST(Trajectory, FrameCountAndSpacing) {
  RowSpec row;
  row.n_frames = 15;
  row.row_direction = Vec3(1, 1, 0).normalized();
  const auto poses = plan_trajectory(row);
  ASSERT_EQ(poses.size(), 15u);
  const double s = row.speed / row.fps;
  for (std::size_t i = 1; i < poses.size(); ++i) {
    const Vec3 step = poses[i].translation - poses[i - 1].translation;
    EXPECT_LE((step - s * row.row_direction).norm(), 1e-12);
  }
  EXPECT_NEAR((poses.back().translation - poses.front().translation).norm(), 14 * s, 1e-12);
  for (const auto& p : poses) {
    EXPECT_NEAR(p.translation.z(), row.camera_height, 1e-12);
    const Vec3 rel = p.translation - row.row_origin;
    EXPECT_NEAR(std::abs(rel.dot(row_lateral(row))), row.camera_offset, 1e-12);
  }
}

TEST(Trajectory, AimPolicies) {
  RowSpec row;
  row.n_frames = 9;
  const auto fixed = plan_trajectory(row);
  for (const auto& p : fixed) EXPECT_LE((p.rotation - fixed[0].rotation).norm(), 0.0);
  row.aim = AimPolicy::kTrackTrunk;
  const auto track = plan_trajectory(row);
  const Vec3 axis = track[4].rotation.col(2);
  EXPECT_NEAR(axis.dot(row.row_direction), 0.0, 1e-12);
  EXPECT_GT(std::abs(track[0].rotation.col(2).dot(row.row_direction)), 1e-3);
}

TEST(Trajectory, ZeroFramesRejected) {
  RowSpec row;
  row.n_frames = 0;
  EXPECT_THROW(plan_trajectory(row), InvalidInput);
  row.n_frames = 3;
  row.speed = 0;
  EXPECT_THROW(plan_trajectory(row), InvalidInput);
}

TEST(Render, FacingSquareDepth) {
  const CameraIntrinsics k = small_camera();
  const DepthMap d = render_depth(facing_square(2.0, 0.5), k, Pose::identity());
  EXPECT_NEAR(d.at(120, 75), 2.0, 1e-6);
  EXPECT_FALSE(d.valid(0));
}

TEST(Render, TiltedPlaneIsPerspectiveCorrect) {
  const CameraIntrinsics k = small_camera();
  TriMesh m;
  m.vertices = {Vec3(-3, -2, 2), Vec3(3, -2, 5), Vec3(3, 2, 5), Vec3(-3, 2, 2)};
  m.triangles = {{0, 1, 2}, {0, 2, 3}};
  const DepthMap d = render_depth(m, k, Pose::identity());
  // Plane z = 3.5 + 0.5 x; along a pixel ray x = (u - cx) z / fx.
  std::size_t checked = 0;
  for (int v = 0; v < k.height; v += 7) {
    for (int u = 0; u < k.width; u += 7) {
      if (!d.valid(static_cast<std::size_t>(v) * k.width + u)) continue;
      const double a = (u - k.cx) / k.fx;
      EXPECT_NEAR(d.at(u, v), 3.5 / (1 - 0.5 * a), 1e-9);
      ++checked;
    }
  }
  EXPECT_GT(checked, 100u);
}

TEST(Render, EmptySceneIsInvalidEverywhere) {
  const RenderResult r = render_scene(Scene{}, small_camera(), Pose::identity());
  EXPECT_EQ(r.depth.valid_count(), 0u);
  for (auto l : r.labels) ASSERT_EQ(l, kLabelBackground);
}

TEST(Render, RejectsDegenerateInput) {
  CameraIntrinsics k = small_camera();
  k.fx = 0;
  EXPECT_THROW(render_depth(facing_square(2, 1), k, Pose::identity()), InvalidInput);
  EXPECT_THROW(render_depth(TriMesh{}, small_camera(), Pose::identity()), InvalidInput);
}

TEST(Render, NearerSurfaceWinsAndLabelsFollow) {
  Scene s;
  s.add(facing_square(3.0, 1.0), 5);
  s.add(facing_square(2.0, 0.2), 7);
  const RenderResult r = render_scene(s, small_camera(), Pose::identity());
  EXPECT_NEAR(r.depth.at(120, 75), 2.0, 1e-9);
  EXPECT_EQ(r.labels[75 * 240 + 120], 7);
  EXPECT_NEAR(r.depth.at(120 + 40, 75), 3.0, 1e-9);
  EXPECT_EQ(r.labels[75 * 240 + 160], 5);
}

TEST(Render, UnprojectedTreeLiesOnMesh) {
  TreeParams p;
  p.seed = 21;
  p.branch_count = 15;
  const TreeModel m = generate_tree(p);
  CameraIntrinsics k;
  k.width = 480;
  k.height = 300;
  k.fx = 267;
  k.fy = 267;
  k.cx = 240;
  k.cy = 150;
  RowSpec row;
  row.n_frames = 1;
  const Pose pose = plan_trajectory(row)[0];
  const DepthMap d = render_depth(m.mesh, k, pose);
  const PointCloud c = unproject(d, k, pose);
  ASSERT_GT(c.size(), 500u);
  const std::size_t stride = std::max<std::size_t>(1, c.size() / 600);
  std::size_t total = 0, within_half_pixel = 0, within_mm = 0;
  const Pose inv = pose.inverse();
  for (std::size_t i = 0; i < c.size(); i += stride) {
    const double dist = test_support::mesh_distance(c.points[i], m.mesh);
    const double depth = inv.apply(c.points[i]).z();
    ++total;
    within_half_pixel += dist <= depth * std::max(1 / k.fx, 1 / k.fy) / 2 + 1e-6;
    within_mm += dist <= 1e-3;
  }
  EXPECT_GE(static_cast<double>(within_half_pixel), 0.99 * total);
  EXPECT_GE(static_cast<double>(within_mm), 0.99 * total);
}

TEST(Degrade, ZeroSpecIsIdentity) {
  DepthMap d(50, 40);
  Rng rng(1);
  for (auto& v : d.depth) v = rng.uniform() < 0.2 ? kInvalidDepth : rng.uniform(0.5, 9.0);
  const DepthMap out = degrade_depth(d, NoiseSpec{});
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.valid(i)) {
      ASSERT_EQ(out.depth[i], d.depth[i]);
    } else {
      ASSERT_FALSE(out.valid(i));
    }
  }
}

TEST(Degrade, ConstantNoiseStd) {
  const DepthMap d = constant_depth(400, 250, 2.0);
  NoiseSpec ns;
  ns.sigma_a = 0.01;
  ns.seed = 3;
  const DepthMap out = degrade_depth(d, ns);
  double sum = 0, sum2 = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double e = out.depth[i] - d.depth[i];
    sum += e;
    sum2 += e * e;
  }
  const double n = static_cast<double>(d.size());
  const double sd = std::sqrt(sum2 / n - (sum / n) * (sum / n));
  EXPECT_NEAR(sd, 0.01, 0.03 * 0.01);
}

TEST(Degrade, QuadraticNoiseModel) {
  const DepthMap d = constant_depth(400, 250, 3.0);
  NoiseSpec ns;
  ns.sigma_a = 0.001;
  ns.sigma_b = 0.002;
  ns.seed = 4;
  const DepthMap out = degrade_depth(d, ns);
  double sum2 = 0;
  for (std::size_t i = 0; i < d.size(); ++i) sum2 += (out.depth[i] - 3.0) * (out.depth[i] - 3.0);
  EXPECT_NEAR(std::sqrt(sum2 / d.size()), 0.001 + 0.002 * 9, 0.03 * 0.019);
}

TEST(Degrade, MaxRangeInvalidates) {
  const DepthMap d = constant_depth(30, 20, 6.0);
  NoiseSpec ns;
  ns.max_range = 5.0;
  EXPECT_EQ(degrade_depth(d, ns).valid_count(), 0u);
}

TEST(Degrade, EdgeDropoutOnlyNearDiscontinuities) {
  DepthMap d(100, 60, 2.0);
  for (int v = 0; v < 60; ++v)
    for (int u = 50; u < 100; ++u) d.at(u, v) = 4.0;
  NoiseSpec ns;
  ns.dropout_edge_px = 2;
  ns.seed = 5;
  const DepthMap out = degrade_depth(d, ns);
  std::size_t dropped = 0, candidates = 0;
  for (int v = 0; v < 60; ++v) {
    for (int u = 0; u < 100; ++u) {
      const bool near_edge = std::abs(u - 49.5) <= 2.5;
      if (!near_edge) {
        ASSERT_TRUE(std::isfinite(out.at(u, v)));
      } else {
        ++candidates;
        dropped += !std::isfinite(out.at(u, v));
      }
    }
  }
  EXPECT_GT(dropped, candidates / 4);
  EXPECT_LT(dropped, 3 * candidates / 4);
}

TEST(Degrade, DeterministicPerSeed) {
  const DepthMap d = constant_depth(64, 48, 2.5);
  NoiseSpec ns;
  ns.sigma_a = 0.01;
  ns.seed = 10;
  const DepthMap a = degrade_depth(d, ns);
  const DepthMap b = degrade_depth(d, ns);
  ns.seed = 11;
  const DepthMap c = degrade_depth(d, ns);
  EXPECT_EQ(a.depth, b.depth);
  EXPECT_NE(a.depth, c.depth);
}

TEST(Degrade, NegativeParametersRejected) {
  NoiseSpec ns;
  ns.sigma_a = -1;
  EXPECT_THROW(degrade_depth(constant_depth(4, 4, 1), ns), InvalidInput);
}

TEST(MonoDepth, BackgroundIsZeroAndCloserIsLarger) {
  Scene s;
  s.add(facing_square(2.0, 0.3), 1);
  s.add(facing_square(4.0, 1.2), 1);
  const RenderResult r = render_scene(s, small_camera(), Pose::identity());
  const DepthMap mono = relative_inverse_depth(r.depth);
  EXPECT_EQ(mono.depth[0], 0.0);
  const double near = mono.at(120, 75), far = mono.at(150, 75);
  EXPECT_NEAR(r.depth.at(120, 75), 2.0, 1e-9);
  EXPECT_NEAR(r.depth.at(150, 75), 4.0, 1e-9);
  EXPECT_GT(near, far);
  EXPECT_NEAR(near, 1.0, 1e-15);
}

TEST(MonoDepth, ConstantPlaneNormalizesToOne) {
  const DepthMap mono = relative_inverse_depth(constant_depth(20, 10, 3.7));
  for (double v : mono.depth) EXPECT_EQ(v, 1.0);
}

TEST(MonoDepth, OrderingMatchesDepthOnTree) {
  TreeParams p;
  p.seed = 2;
  const TreeModel m = generate_tree(p);
  RowSpec row;
  row.n_frames = 1;
  const Pose pose = plan_trajectory(row)[0];
  const CameraIntrinsics k = small_camera();
  const DepthMap d = render_depth(m.mesh, k, pose);
  const DepthMap mono = render_mono_reldepth(m.mesh, k, pose);
  std::vector<std::size_t> valid;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.valid(i)) {
      valid.push_back(i);
      ASSERT_GT(mono.depth[i], 0.0);
      ASSERT_LE(mono.depth[i], 1.0);
    } else {
      ASSERT_EQ(mono.depth[i], 0.0);
    }
  }
  for (std::size_t a = 0; a + 1 < valid.size(); a += 3) {
    const std::size_t i = valid[a], j = valid[a + 1];
    if (d.depth[i] < d.depth[j]) {
      EXPECT_GT(mono.depth[i], mono.depth[j]);
    } else if (d.depth[i] > d.depth[j]) {
      EXPECT_LT(mono.depth[i], mono.depth[j]);
    }
  }
}
