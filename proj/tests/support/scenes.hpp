#pragma once

#include <cstdint>
#include <vector>

#include "arbor/seg/background.hpp"
#include "arbor/sim/degrade.hpp"
#include "arbor/sim/render.hpp"
#include "arbor/sim/trajectory.hpp"
#include "arbor/tree/tree_gen.hpp"

namespace arbor::test_support {

struct LabeledFrame {
  FrameBundle bundle;
  std::vector<std::int32_t> labels;
  DepthMap clean;
};

/// Target tree at the origin, optional neighbours along +-x and a ground
/// plane, seen from the default row camera `frame` of `n_frames`.
inline LabeledFrame render_row(std::uint64_t seed, int neighbours, bool ground, bool noisy, int frame = 0,
                               int n_frames = 1, double spacing = 2.5) {
  TreeParams p;
  p.seed = seed;
  const TreeModel m = generate_tree(p);
  Scene scene;
  if (ground) scene.add(ground_plane(Vec3::Zero()), kLabelGround);
  scene.add(m.mesh, kLabelTarget);
  for (int k = 0; k < neighbours; ++k) {
    TreeParams q;
    q.seed = seed * 31 + 7 + k;
    const double side = k % 2 == 0 ? -1.0 : 1.0;
    scene.add(transform(generate_tree(q).mesh, Rigid::from(Mat3::Identity(), Vec3(side * spacing, 0, 0))),
              kLabelTarget + 1 + k);
  }
  RowSpec row;
  row.n_frames = n_frames;
  const Pose pose = plan_trajectory(row)[frame];
  const CameraIntrinsics intr;
  const RenderResult rr = render_scene(scene, intr, pose);
  LabeledFrame f;
  f.clean = rr.depth;
  f.labels = rr.labels;
  f.bundle.intr = intr;
  f.bundle.pose = pose;
  f.bundle.mono = relative_inverse_depth(rr.depth);
  if (noisy) {
    NoiseSpec ns{0.001, 0.0015, 1, 20.0, seed + frame};
    f.bundle.depth = degrade_depth(rr.depth, ns);
  } else {
    f.bundle.depth = rr.depth;
  }
  return f;
}

inline double target_iou(const SegMask& mask, const LabeledFrame& f) {
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < mask.keep.size(); ++i) {
    const bool truth = f.labels[i] == kLabelTarget && f.bundle.depth.valid(i);
    const bool kept = mask.keep[i] != 0;
    inter += truth && kept;
    uni += truth || kept;
  }
  return uni ? static_cast<double>(inter) / static_cast<double>(uni) : 1.0;
}

inline bool subset(const SegMask& a, const SegMask& b) {
  for (std::size_t i = 0; i < a.keep.size(); ++i) {
    if (a.keep[i] && !b.keep[i]) return false;
  }
  return true;
}


}  // namespace arbor::test_support
