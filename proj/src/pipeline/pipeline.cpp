#include "arbor/pipeline/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

#include "arbor/common/error.hpp"
#include "arbor/common/rng.hpp"
#include "arbor/geom/voxel.hpp"
#include "arbor/io/files.hpp"
#include "arbor/io/frames.hpp"
#include "arbor/io/obj.hpp"
#include "arbor/io/ply.hpp"
#include "arbor/io/png.hpp"
#include "arbor/io/serialize.hpp"
#include "arbor/sim/render.hpp"

namespace arbor {

namespace {

class StageClock {
 public:
  explicit StageClock(StageTiming& t) : timing_(t) {}
  template <class F>
  auto run(const std::string& stage, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    struct Add {
      StageTiming& t;
      const std::string& s;
      std::chrono::steady_clock::time_point t0;
      ~Add() { t[s] += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
    } add{timing_, stage, t0};
    return f();
  }

 private:
  StageTiming& timing_;
};

std::string tree_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "tree_%03d", index);
  return buf;
}

double mask_iou(const SegMask& mask, const std::vector<std::int32_t>& labels, const DepthMap& depth) {
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < mask.keep.size(); ++i) {
    const bool truth = labels[i] == kLabelTarget && depth.valid(i);
    const bool kept = mask.keep[i] != 0;
    inter += truth && kept;
    uni += truth || kept;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

struct TreeContext {
  const ExperimentConfig& cfg;
  std::filesystem::path dir;
  StageClock& clock;
  const TreeModel& model;
  const PointCloud& gt;
  double h_ref;
};

MethodRecord evaluate_method(const TreeContext& ctx, const std::string& name, PointCloud cloud, bool unitless) {
  MethodRecord m;
  m.method = name;
  std::string stage = "scale";
  try {
    if (unitless) {
      const ScaledCloud sc = ctx.clock.run("scale", [&] { return retrieve_scale(ctx.h_ref, cloud); });
      m.scale = sc.scale;
      cloud = sc.cloud;
    }
    stage = "register";
    const IcpReport icp = ctx.clock.run("register", [&] { return icp_align(cloud, ctx.gt, ctx.cfg.icp); });
    m.icp_iterations = icp.iterations;
    m.icp_converged = icp.converged;
    m.icp_final_rms = icp.rms_history.back();
    const PointCloud aligned = apply_transform(cloud, icp.transform);
    m.points = aligned.size();
    stage = "metrics";
    m.geom = ctx.clock.run("metrics", [&] { return geom_metrics(aligned, ctx.gt, ctx.cfg.jsd_voxel); });
    stage = "traits";
    m.traits = ctx.clock.run("traits", [&] { return extract_traits(aligned, ctx.cfg.qsm); });
    stage = "persist";
    ctx.clock.run("persist", [&] {
      const auto mdir = ctx.dir / "methods" / name;
      std::filesystem::create_directories(mdir);
      io::write_ply(mdir / "aligned.ply", aligned);
      io::write_json(mdir / "traits.json", m.traits);
      io::write_json(mdir / "icp.json", icp);
      return 0;
    });
  } catch (const std::exception& e) {
    m.status = "error";
    m.stage = stage;
    m.error = e.what();
  }
  return m;
}

TreeRecord run_tree(const ExperimentConfig& cfg, int index, const std::filesystem::path& root, StageTiming& timing) {
  StageClock clock(timing);
  TreeRecord rec;
  rec.index = index;
  rec.tree_id = tree_name(index);
  const auto dir = root / "trees" / rec.tree_id;
  std::string stage = "generate";
  TreeModel model;
  PointCloud gt, fused;
  try {
    model = clock.run("generate", [&] { return generate_tree(cfg.ranges.draw(cfg.seed, index)); });
    rec.params = model.params;
    rec.ground_truth = model.traits;
    clock.run("persist", [&] {
      std::filesystem::create_directories(dir);
      io::write_json(dir / "params.json", model.params);
      io::write_json(dir / "gt_traits.json", model.traits);
      io::write_json(dir / "skeleton.json", model.skeleton);
      io::write_obj(dir / "tree.obj", model.mesh);
      return 0;
    });

    stage = "gt-sample";
    const std::uint64_t gt_seed = mix64(cfg.seed ^ hash_name("gt-sample")) + index;
    gt = clock.run("gt-sample", [&] { return sample_surface(model.mesh, cfg.gt_samples, gt_seed); });
    clock.run("persist", [&] {
      io::write_ply(dir / "gt_sample.ply", gt);
      return 0;
    });

    stage = "render";
    Scene scene;
    const Vec3 base = model.skeleton.nodes[model.skeleton.trunk_path.front()].position;
    scene.add(ground_plane(Vec3(base.x(), base.y(), 0.0)), kLabelGround);
    scene.add(model.mesh, kLabelTarget);
    if (cfg.neighbors) {
      const Vec3 dir_row = cfg.row.row_direction.normalized();
      const std::uint64_t nseed = mix64(cfg.seed ^ hash_name("neighbors"));
      for (int k = 0; k < 2; ++k) {
        const TreeModel nb = generate_tree(cfg.ranges.draw(nseed, 2 * static_cast<std::uint64_t>(index) + k));
        const double side = k == 0 ? -1.0 : 1.0;
        scene.add(transform(nb.mesh, Rigid::from(Mat3::Identity(), side * cfg.neighbor_spacing * dir_row)),
                  kLabelTarget + 1 + k);
      }
    }
    Rng view_rng = Rng::stream(cfg.seed, "views", static_cast<std::uint64_t>(index));
    RowSpec row = cfg.row;
    row.n_frames = cfg.views.first +
                   static_cast<int>(view_rng.index(static_cast<std::uint64_t>(cfg.views.second - cfg.views.first + 1)));
    row.row_origin = Vec3(base.x(), base.y(), 0.0);
    rec.views = row.n_frames;
    const auto poses = plan_trajectory(row);
    if (cfg.persist_frames) {
      clock.run("persist", [&] {
        std::filesystem::create_directories(dir / "frames");
        io::write_json(dir / "frames" / "trajectory.json", nlohmann::json(poses));
        return 0;
      });
    }

    double iou_sum = 0.0;
    int segmented = 0;
    for (std::size_t f = 0; f < poses.size(); ++f) {
      stage = "render";
      const RenderResult rr = clock.run("render", [&] { return render_scene(scene, cfg.intrinsics, poses[f]); });
      FrameBundle frame;
      frame.intr = cfg.intrinsics;
      frame.pose = poses[f];
      clock.run("degrade", [&] {
        NoiseSpec ns = cfg.noise;
        ns.seed = mix64(cfg.noise.seed ^ model.params.seed) + f;
        frame.depth = io::decode_depth_mm(io::encode_depth_mm(degrade_depth(rr.depth, ns)));
        frame.mono = relative_inverse_depth(rr.depth);
        return 0;
      });
      char stem[32];
      std::snprintf(stem, sizeof stem, "frame_%04zu", f);
      if (cfg.persist_frames) {
        clock.run("persist", [&] {
          io::write_frame(dir / "frames", stem, frame, &rr.labels);
          return 0;
        });
      }
      stage = "segment";
      SegConfig sc = cfg.segmentation;
      sc.row_direction = cfg.row.row_direction;
      sc.seed = mix64(cfg.segmentation.seed ^ model.params.seed) + f;
      try {
        const SegmentResult seg = clock.run("segment", [&] { return segment_tree(frame, sc); });
        if (!seg.warning.empty()) rec.warnings.push_back(std::string(stem) + ": " + seg.warning);
        iou_sum += mask_iou(seg.mask, rr.labels, frame.depth);
        ++segmented;
        fused.append(seg.cloud);
        if (cfg.persist_frames) {
          clock.run("persist", [&] {
            io::write_mask(dir / "frames", stem, seg.mask);
            return 0;
          });
        }
      } catch (const EmptySegmentation& e) {
        rec.warnings.push_back(std::string(stem) + ": " + e.what());
      }
    }
    rec.seg_iou_mean = segmented > 0 ? iou_sum / segmented : 0.0;

    stage = "fuse";
    if (cfg.fused_voxel > 0 && !fused.empty()) {
      fused = clock.run("fuse", [&] { return downsample(fused, cfg.fused_voxel); });
    }
    rec.fused_points = fused.size();
    require(fused.size() >= 10, "fused sensor cloud has only " + std::to_string(fused.size()) + " points");
    rec.h_ref = clock.run("fuse", [&] { return tree_height(fused); });
    clock.run("persist", [&] {
      io::write_ply(dir / "fused.ply", fused);
      return 0;
    });
  } catch (const std::exception& e) {
    rec.status = "error";
    rec.stage = stage;
    rec.error = e.what();
    return rec;
  }

  const TreeContext ctx{cfg, dir, clock, model, gt, rec.h_ref};
  if (cfg.evaluate_sensor) rec.methods.push_back(evaluate_method(ctx, kSensorMethod, fused, false));
  if (cfg.gt_baseline) {
    const std::uint64_t rs = mix64(cfg.seed ^ hash_name("gt-resample")) + index;
    rec.methods.push_back(evaluate_method(ctx, kResampleMethod, sample_surface(model.mesh, cfg.gt_samples, rs), false));
  }
  for (const auto& b : cfg.backends) {
    ReconResult recon;
    try {
      recon = clock.run("backend", [&] {
        if (b.kind == BackendSpec::Kind::kOracle) return oracle_backend(model, b.degrade, b.name, rec.tree_id);
        std::filesystem::path file = b.path / (rec.tree_id + ".ply");
        if (!std::filesystem::exists(file)) file = b.path / (rec.tree_id + ".obj");
        ReconResult r = ingest_external(file, GeometryKind::kAuto, cfg.gt_samples, mix64(cfg.seed) + index);
        r.backend = b.name;
        r.unitless_scale = b.unitless_scale;
        return r;
      });
    } catch (const std::exception& e) {
      MethodRecord m;
      m.method = b.name;
      m.status = "error";
      m.stage = "backend";
      m.error = e.what();
      rec.methods.push_back(std::move(m));
      continue;
    }
    rec.methods.push_back(evaluate_method(ctx, b.name, std::move(recon.cloud), recon.unitless_scale));
  }
  return rec;
}

}  // namespace

bool EvalReport::has_failures() const {
  for (const auto& t : trees) {
    if (t.status != "ok") return true;
    for (const auto& m : t.methods) {
      if (m.status != "ok") return true;
    }
  }
  return false;
}

std::vector<MethodAggregate> aggregate(const std::vector<TreeRecord>& trees) {
  std::vector<std::string> order;
  for (const auto& t : trees) {
    for (const auto& m : t.methods) {
      if (std::find(order.begin(), order.end(), m.method) == order.end()) order.push_back(m.method);
    }
  }
  std::vector<MethodAggregate> out;
  for (const auto& name : order) {
    MethodAggregate a;
    a.method = name;
    std::vector<double> cd, js, d_est, d_gt, b_est, b_gt;
    for (const auto& t : trees) {
      for (const auto& m : t.methods) {
        if (m.method != name) continue;
        ++a.trees;
        if (m.status != "ok") {
          ++a.errors;
          continue;
        }
        if (m.geom) {
          cd.push_back(m.geom->chamfer_l2);
          js.push_back(m.geom->jsd);
        }
        if (m.traits.trunk_diameter && t.ground_truth.trunk_diameter) {
          d_est.push_back(100.0 * *m.traits.trunk_diameter);
          d_gt.push_back(100.0 * *t.ground_truth.trunk_diameter);
        } else {
          ++a.trunk_unavailable;
        }
        if (m.traits.branch_count && t.ground_truth.branch_count) {
          b_est.push_back(*m.traits.branch_count);
          b_gt.push_back(*t.ground_truth.branch_count);
        } else {
          ++a.branch_unavailable;
        }
      }
    }
    a.geom_n = cd.size();
    a.cd_mean = mean(cd);
    a.cd_std = population_std(cd);
    a.jsd_mean = mean(js);
    a.jsd_std = population_std(js);
    if (!d_est.empty()) a.trunk = error_stats(d_est, d_gt);
    if (!b_est.empty()) a.branch = error_stats(b_est, b_gt);
    out.push_back(std::move(a));
  }
  return out;
}

EvalReport run_pipeline(const ExperimentConfig& cfg, StageTiming* timing) {
  cfg.validate();
  const auto root = cfg.resolved_output_dir();
  std::filesystem::create_directories(root);
  io::write_json(root / "config.json", config_to_json(cfg));

  const int n = cfg.trees;
  std::vector<TreeRecord> records(n);
  std::vector<StageTiming> times(n);
  const auto t0 = std::chrono::steady_clock::now();
#pragma omp parallel for num_threads(cfg.workers) schedule(dynamic, 1)
  for (int i = 0; i < n; ++i) {
    try {
      records[i] = run_tree(cfg, i, root, times[i]);
    } catch (const std::exception& e) {
      records[i].index = i;
      records[i].tree_id = tree_name(i);
      records[i].status = "error";
      records[i].stage = "unknown";
      records[i].error = e.what();
    }
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  EvalReport report;
  report.trees = std::move(records);
  report.aggregates = aggregate(report.trees);
  json cfg_json = config_to_json(cfg);
  cfg_json.erase("output_dir");
  report.provenance = {{"version", kVersion}, {"config_hash", config_hash(cfg)}, {"seed", cfg.seed}, {"config", cfg_json}};
  if (cfg.throughput) {
    report.throughput_input = cfg.throughput;
    report.throughput_ratio = throughput_ratio(*cfg.throughput);
  }

  StageTiming total;
  for (const auto& t : times) {
    for (const auto& [k, v] : t) total[k] += v;
  }
  total["wall"] = wall;
  if (timing) *timing = total;
  io::write_json(root / "report.json", report_to_json(report));
  io::write_json(root / "timing.json", {{"config_hash", config_hash(cfg)}, {"seconds", total}});
  write_tables(make_tables(report), root / "tables");
  return report;
}

}  // namespace arbor
