#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "arbor/common/error.hpp"
#include "arbor/common/rng.hpp"
#include "arbor/geom/kdtree.hpp"
#include "arbor/reg/icp.hpp"
#include "arbor/tree/tree_gen.hpp"
#include "support/support.hpp"

using namespace arbor;

namespace {

PointCloud tree_cloud(std::size_t n, std::uint64_t seed) {
  TreeParams p;
  p.seed = seed;
  return sample_surface(generate_tree(p).mesh, n, seed + 100);
}

Rigid rz(double deg, const Vec3& t) {
  return Rigid::from(Eigen::AngleAxisd(deg * std::numbers::pi / 180.0, Vec3::UnitZ()).toRotationMatrix(), t);
}

double rotation_error(const Rigid& a, const Rigid& b) { return rotation_angle(a.rotation.transpose() * b.rotation); }

}  // namespace

TEST(Kabsch, RecoversKnownTransform) {
  Rng rng(3);
  const PointCloud src = test_support::random_cloud(50, 4, -1, 1);
  const Rigid t = Rigid::from(test_support::random_rotation(rng, 2.0), Vec3(0.3, -1.2, 0.7));
  std::vector<Vec3> dst;
  for (const auto& p : src.points) dst.push_back(t.apply(p));
  const Rigid est = kabsch(src.points, dst);
  EXPECT_LE(rotation_error(est, t), 1e-10);
  EXPECT_LE((est.translation - t.translation).norm(), 1e-10);
}

TEST(Kabsch, DegenerateInputsThrow) {
  EXPECT_THROW(kabsch({Vec3(0, 0, 0), Vec3(1, 0, 0)}, {Vec3(0, 0, 0), Vec3(1, 0, 0)}), RegistrationFailure);
  const std::vector<Vec3> line = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(3, 0, 0)};
  EXPECT_THROW(kabsch(line, line), RegistrationFailure);
}

TEST(IcpAlign, IdentityConvergesImmediately) {
  const PointCloud c = tree_cloud(5000, 1);
  IcpParams params;
  params.init = Rigid::identity();
  const IcpReport r = icp_align(c, c, params);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.iterations, 2);
  EXPECT_EQ(r.rms_history.back(), 0.0);
  EXPECT_LE(rotation_angle(r.transform.rotation), 1e-12);
  EXPECT_LE(r.transform.translation.norm(), 1e-12);
}

TEST(IcpAlign, RecoversRotationAboutZ) {
  const PointCloud src = tree_cloud(20000, 2);
  const Rigid t = rz(10.0, Vec3(0.1, 0, 0));
  const PointCloud tgt = apply_transform(src, t);
  IcpParams params;
  params.init = Rigid::identity();
  params.voxel_size = 0.0;
  params.max_corr_dist = 0.5;
  const IcpReport r = icp_align(src, tgt, params);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(rotation_error(r.transform, t), 1e-6);
  EXPECT_LE((r.transform.translation - t.translation).norm(), 1e-6);
}

TEST(IcpAlign, NoisySourceMatchesMonteCarloRms) {
  const double sigma = 0.005;
  const PointCloud clean = tree_cloud(8000, 3);
  const Rigid t = rz(5.0, Vec3(0.05, -0.03, 0.02));
  const PointCloud tgt = apply_transform(clean, t);
  const KdTree tgt_index(tgt.points);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    PointCloud src = clean;
    for (auto& p : src.points) p += Vec3(rng.normal(), rng.normal(), rng.normal()) * sigma;
    // Expected residual: RMS nearest-neighbour distance at the true alignment.
    double sum = 0.0;
    for (const auto& p : src.points) {
      const double d = tgt_index.nearest(t.apply(p)).distance;
      sum += d * d;
    }
    const double expected = std::sqrt(sum / static_cast<double>(src.size()));
    IcpParams params;
    params.init = Rigid::identity();
    params.voxel_size = 0.0;
    params.max_corr_dist = 0.5;
    const IcpReport r = icp_align(src, tgt, params);
    EXPECT_GE(r.rms_history.back(), 0.8 * expected) << "seed " << seed;
    EXPECT_LE(r.rms_history.back(), 1.2 * expected) << "seed " << seed;
    EXPECT_LT((r.transform.translation - t.translation).norm(), 1e-3) << "seed " << seed;
  }
}

TEST(IcpAlign, Equivariance) {
  const PointCloud src = tree_cloud(6000, 4);
  const PointCloud tgt = apply_transform(src, rz(8.0, Vec3(0.04, 0.02, -0.01)));
  IcpParams params;
  params.init = Rigid::identity();
  params.voxel_size = 0.0;
  params.max_corr_dist = 0.3;
  const IcpReport base = icp_align(src, tgt, params);
  Rng rng(5);
  for (int trial = 0; trial < 3; ++trial) {
    const Rigid g = Rigid::from(test_support::random_rotation(rng, std::numbers::pi), Vec3(rng.normal(), rng.normal(), rng.normal()));
    const IcpReport r = icp_align(apply_transform(src, g), apply_transform(tgt, g), params);
    const Rigid expected = g * base.transform * g.inverse();
    EXPECT_LE(rotation_error(r.transform, expected), 1e-6);
    EXPECT_LE((r.transform.translation - expected.translation).norm(), 1e-6);
  }
}

TEST(IcpAlign, ReportInvariantsWithAutomaticInit) {
  Rng rng(6);
  const PointCloud src = tree_cloud(10000, 5);
  for (int trial = 0; trial < 4; ++trial) {
    const Rigid t = Rigid::from(test_support::random_rotation(rng, 0.5), Vec3(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), 0));
    const IcpReport r = icp_align(src, apply_transform(src, t));
    ASSERT_FALSE(r.rms_history.empty());
    EXPECT_EQ(static_cast<std::size_t>(r.iterations), r.rms_history.size());
    EXPECT_LE(r.rms_history.back(), r.rms_history.front());
    EXPECT_NO_THROW(r.transform.validate(1e-9));
    EXPECT_GT(r.inlier_fraction, 0.0);
    EXPECT_LE(r.inlier_fraction, 1.0);
    EXPECT_GT(r.max_corr_dist, 0.0);
    EXPECT_FALSE(r.init_method.empty());
  }
}

TEST(IcpAlign, DegenerateCloudsThrow) {
  PointCloud two;
  two.points = {Vec3(0, 0, 0), Vec3(1, 0, 0)};
  IcpParams params;
  params.voxel_size = 0.0;
  params.init = Rigid::identity();
  EXPECT_THROW(icp_align(two, two, params), RegistrationFailure);
  PointCloud line;
  for (int i = 0; i < 20; ++i) line.points.emplace_back(0.1 * i, 0, 0);
  EXPECT_THROW(icp_align(line, line, params), RegistrationFailure);
}

TEST(IcpAlign, CropBoxRestrictsBothClouds) {
  const PointCloud src = tree_cloud(8000, 7);
  const Rigid t = rz(3.0, Vec3(0.02, 0, 0));
  IcpParams params;
  params.init = Rigid::identity();
  params.voxel_size = 0.0;
  Aabb box;
  box.min = Vec3(-1, -1, 0.0);
  box.max = Vec3(1, 1, 1.0);
  params.crop = box;
  const IcpReport r = icp_align(src, apply_transform(src, t), params);
  EXPECT_LT(r.source_points, src.size());
  EXPECT_EQ(r.source_points, crop(src, box).size());
}

TEST(ApplyTransform, Examples) {
  const PointCloud c = test_support::random_cloud(100, 8, -2, 2);
  const PointCloud same = apply_transform(c, Rigid::identity());
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(same.points[i], c.points[i]);

  Rng rng(9);
  const Rigid t = Rigid::from(test_support::random_rotation(rng, 3.0), Vec3(1, 2, 3));
  const PointCloud back = apply_transform(apply_transform(c, t), t.inverse());
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_LE((back.points[i] - c.points[i]).norm(), 1e-12);

  PointCloud one;
  one.points = {Vec3(1, 0, 0)};
  const Vec3 flipped = apply_transform(one, rz(180.0, Vec3::Zero())).points[0];
  EXPECT_NEAR(flipped.x(), -1.0, 1e-15);
  EXPECT_NEAR(flipped.y(), 0.0, 1e-15);
}

TEST(Crop, InclusiveAndOrderPreserving) {
  PointCloud c;
  c.points = {Vec3(0, 0, 0), Vec3(2, 0, 0), Vec3(1, 1, 1), Vec3(0.5, 0.5, 0.5)};
  Aabb box;
  box.min = Vec3(0, 0, 0);
  box.max = Vec3(1, 1, 1);
  const PointCloud out = crop(c, box);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out.points[0], c.points[0]);
  EXPECT_EQ(out.points[1], c.points[2]);
  EXPECT_EQ(out.points[2], c.points[3]);
}
