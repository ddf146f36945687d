// Acceptance checks. Usage: acceptance [N ...]; with no arguments every
// criterion runs. Prints one PASS/FAIL line per criterion and exits non-zero
// when any requested criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "arbor/backend/backend.hpp"
#include "arbor/common/error.hpp"
#include "arbor/io/files.hpp"
#include "arbor/metrics/metrics.hpp"
#include "arbor/pipeline/pipeline.hpp"
#include "arbor/qsm/qsm.hpp"
#include "arbor/reg/icp.hpp"
#include "arbor/scale/scale.hpp"
#include "support/oracles.hpp"
#include "support/scenes.hpp"
#include "support/support.hpp"

using namespace arbor;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome gt_trait_reproduction() {
  const auto t0 = std::chrono::steady_clock::now();
  const TreeParamRanges ranges;
  std::vector<double> d_est, d_gt, b_est, b_gt;
  int unavailable = 0;
  for (std::uint64_t i = 0; i < 30; ++i) {
    const TreeModel m = generate_tree(ranges.draw(2024, i));
    const TraitReport r = extract_traits(sample_surface(m.mesh, 100000, i));
    if (!r.trunk_diameter || !r.branch_count) {
      ++unavailable;
      continue;
    }
    d_est.push_back(*r.trunk_diameter);
    d_gt.push_back(*m.traits.trunk_diameter);
    b_est.push_back(*r.branch_count);
    b_gt.push_back(*m.traits.branch_count);
  }
  const double secs = seconds_since(t0);
  if (d_est.empty()) return {false, "no tree produced traits"};
  const ErrorStats d = error_stats(d_est, d_gt), b = error_stats(b_est, b_gt);
  const bool ok = unavailable == 0 && d.mape_mean <= 5.0 && b.mape_mean <= 10.0 && secs <= 300.0;
  return {ok, fmt("trunk MAPE %.2f%% (<= 5), branch MAPE %.2f%% (<= 10), unavailable %d/30, %.0f s (<= 300)",
                  d.mape_mean, b.mape_mean, unavailable, secs)};
}

Outcome metric_oracles() {
  int cd_exact = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const PointCloud a = test_support::random_cloud(200, 1000 + 2 * s);
    const PointCloud b = test_support::random_cloud(200, 1001 + 2 * s);
    cd_exact += chamfer_l2(a, b) == test_support::brute_chamfer(a, b);
  }
  double jsd_err = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    PointCloud a = test_support::random_cloud(500, 2000 + 2 * s);
    PointCloud b = test_support::random_cloud(500, 2001 + 2 * s, 0.2, 1.0);
    a.points.push_back(Vec3(0, 0, 0));
    b.points.push_back(Vec3(0.999, 0.999, 0.999));
    jsd_err = std::max(jsd_err, std::abs(jsd(a, b, 0.1) - test_support::dense_jsd(a, b, 0.1, 10)));
  }
  const PointCloud a = test_support::random_cloud(500, 3000);
  const PointCloud far = test_support::random_cloud(500, 3001, 10.0, 11.0);
  const double self = jsd(a, a, 0.05);
  const double disjoint_err = std::abs(jsd(a, far, 0.05) - std::log(2.0));
  const bool ok = cd_exact == 50 && jsd_err <= 1e-12 && self == 0.0 && disjoint_err <= 1e-12;
  return {ok, fmt("chamfer exact %d/50, jsd max err %.2e, jsd(A,A) %.1e, |jsd(disjoint) - ln2| %.2e", cd_exact,
                  jsd_err, self, disjoint_err)};
}

Outcome icp_recovery() {
  Rng rng(77);
  int accurate = 0, converged = 0, failures = 0;
  double worst_t = 0.0, worst_r = 0.0;
  const int trials = 50;
  for (int i = 0; i < trials; ++i) {
    TreeParams p;
    p.seed = 500 + static_cast<std::uint64_t>(i);
    const PointCloud clean = sample_surface(generate_tree(p).mesh, 20000, p.seed);
    const Rigid t = Rigid::from(test_support::random_rotation(rng, 30.0 * std::numbers::pi / 180.0),
                                Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)).normalized() *
                                    rng.uniform(0.0, 0.5));
    PointCloud src = clean;
    for (auto& q : src.points) q += Vec3(rng.normal(), rng.normal(), rng.normal()) * 0.002;
    try {
      const IcpReport r = icp_align(src, transform(clean, t));
      const double et = (r.transform.translation - t.translation).norm();
      const double er = rotation_angle(r.transform.rotation.transpose() * t.rotation) * 180.0 / std::numbers::pi;
      worst_t = std::max(worst_t, et);
      worst_r = std::max(worst_r, er);
      accurate += et <= 1e-3 && er <= 0.1;
      converged += r.converged && r.iterations <= 200;
    } catch (const RegistrationFailure&) {
      ++failures;
    }
  }
  const bool ok = accurate == trials && converged >= 0.95 * trials;
  return {ok, fmt("within 1e-3 m / 0.1 deg %d/%d (worst %.2e m, %.3f deg), converged %d/%d (>= 95%%), failures %d",
                  accurate, trials, worst_t, worst_r, converged, trials, failures)};
}

Outcome segmentation_scene() {
  double min_iou = 1.0, min_far = 1.0, min_sky = 1.0, min_ground = 1.0;
  bool monotone = true;
  const int frames = 15;
  for (int f = 0; f < frames; ++f) {
    const auto lf = test_support::render_row(10, 2, true, true, f, frames);
    SegConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(f);
    const SegmentResult r = segment_tree(lf.bundle, cfg);
    min_iou = std::min(min_iou, test_support::target_iou(r.mask, lf));
    for (int s = 1; s < 4; ++s) monotone = monotone && test_support::subset(r.stages[s], r.stages[s - 1]);
    monotone = monotone && test_support::subset(r.mask, r.stages[3]);
    // Each stage's target class must be gone once that stage has run.
    std::size_t far = 0, far_rm = 0, sky = 0, sky_rm = 0, ground = 0, ground_rm = 0;
    const auto& depth = lf.bundle.depth;
    for (std::size_t i = 0; i < depth.size(); ++i) {
      const bool in_range = depth.valid(i) && depth.depth[i] <= cfg.max_range;
      if (!in_range) {
        ++far;
        far_rm += !r.stages[0].keep[i];
      }
      if (lf.labels[i] == kLabelBackground) {
        ++sky;
        sky_rm += !r.stages[1].keep[i];
      }
      if (lf.labels[i] == kLabelGround && in_range) {
        ++ground;
        ground_rm += !r.stages[2].keep[i];
      }
    }
    auto recall = [](std::size_t rm, std::size_t n) { return n ? static_cast<double>(rm) / n : 1.0; };
    min_far = std::min(min_far, recall(far_rm, far));
    min_sky = std::min(min_sky, recall(sky_rm, sky));
    min_ground = std::min(min_ground, recall(ground_rm, ground));
  }
  const bool ok = min_iou >= 0.95 && min_far >= 0.99 && min_sky >= 0.99 && min_ground >= 0.99 && monotone;
  return {ok, fmt("%d frames: min IoU %.4f (>= 0.95), min recall far %.4f sky %.4f ground %.4f (>= 0.99), monotone %s",
                  frames, min_iou, min_far, min_sky, min_ground, monotone ? "yes" : "no")};
}

Outcome scale_closure() {
  const TreeParamRanges ranges;
  double worst = 0.0;
  int topology = 0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const TreeModel m = generate_tree(ranges.draw(77, i));
    DegradeSpec spec;
    spec.strip_scale = true;
    spec.samples = 50000;
    spec.seed = i;
    const ReconResult rec = oracle_backend(m, spec);
    const double h_ref = tree_height(sample_surface(m.mesh, 50000, 1000 + i));
    const ScaledCloud out = retrieve_scale(h_ref, rec.cloud);
    worst = std::max(worst, std::abs(tree_height(out.cloud) - h_ref) / h_ref);
    // Same skeleton topology before and after scaling, with lengths scaled alongside.
    QsmParams unitless;
    const double k = 1.0 / out.scale.s;
    unitless.slice_thickness *= k;
    unitless.measure_height *= k;
    unitless.level_step *= k;
    unitless.min_branch_length *= k;
    unitless.circle_fit_max_rmse *= k;
    const SkeletonGraph before = extract_skeleton(rec.cloud, unitless);
    const SkeletonGraph after = extract_skeleton(out.cloud);
    topology += before.edges == after.edges && count_branches(before, unitless) == count_branches(after);
  }
  const bool ok = worst <= 1e-9 && topology == 20;
  return {ok, fmt("max relative height error %.2e (<= 1e-9), topology unchanged %d/20", worst, topology)};
}

Outcome degradation_monotonicity() {
  TreeParams p;
  p.seed = 606;
  const TreeModel m = generate_tree(p);
  const PointCloud gt = sample_surface(m.mesh, 20000, 1);
  auto median_cd = [&](double sigma, double fraction) {
    std::vector<double> v;
    for (std::uint64_t s = 0; s < 10; ++s) {
      DegradeSpec spec;
      spec.samples = 20000;
      spec.seed = s;
      spec.noise_sigma = sigma;
      spec.subsample_fraction = fraction;
      v.push_back(chamfer_l2(oracle_backend(m, spec).cloud, gt));
    }
    return percentile(v, 0.5);
  };
  std::string detail = "sigma:";
  bool ok = true;
  double prev = -1.0;
  for (double sigma : {0.0, 0.002, 0.005, 0.010}) {
    const double c = median_cd(sigma, 1.0);
    ok = ok && c >= prev;
    prev = c;
    detail += fmt(" %.4f", c);
  }
  detail += "; fraction:";
  prev = -1.0;
  for (double fraction : {1.0, 0.5, 0.25}) {
    const double c = median_cd(0.0, fraction);
    ok = ok && c >= prev;
    prev = c;
    detail += fmt(" %.4f", c);
  }
  return {ok, "median CD (m) non-decreasing " + detail};
}

Outcome unavailable_pathway() {
  const TreeParamRanges ranges;
  EvalReport report;
  int unavailable = 0;
  for (std::uint64_t i = 0; i < 10; ++i) {
    const TreeModel m = generate_tree(ranges.draw(88, i));
    DegradeSpec spec;
    spec.subsample_fraction = 0.1;
    spec.noise_sigma = 0.02;
    spec.seed = i;
    TreeRecord t;
    t.tree_id = fmt("tree_%03d", static_cast<int>(i));
    t.ground_truth = m.traits;
    MethodRecord mr;
    mr.method = "degraded";
    const PointCloud cloud = oracle_backend(m, spec).cloud;
    mr.traits = extract_traits(cloud);
    mr.geom = geom_metrics(cloud, sample_surface(m.mesh, 20000, i));
    unavailable += !mr.traits.trunk_diameter;
    t.methods.push_back(mr);
    report.trees.push_back(t);
  }
  report.aggregates = aggregate(report.trees);
  try {
    const Tables tables = make_tables(report);
    const bool dashes = tables.trunk_csv.find("--") != std::string::npos;
    return {unavailable > 0 && dashes,
            fmt("trunk diameter unavailable %d/10, tables rendered, '--' cells %s", unavailable, dashes ? "yes" : "no")};
  } catch (const Error& e) {
    return {false, std::string("tables aborted: ") + e.what()};
  }
}

Outcome end_to_end_determinism() {
  const auto base = std::filesystem::temp_directory_path() / "arbor_acceptance_e2e";
  std::filesystem::remove_all(base);
  ExperimentConfig cfg;
  cfg.name = "acceptance";
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::string> reports;
  bool failures = false;
  for (const char* run : {"a", "b"}) {
    cfg.output_dir = base / run;
    const EvalReport r = run_pipeline(cfg);
    failures = failures || r.has_failures();
    reports.push_back(io::read_text(cfg.output_dir / "report.json"));
  }
  const double secs = seconds_since(t0);
  const bool same = reports[0] == reports[1];
  return {same && secs <= 900.0,
          fmt("30 trees x 2 runs: reports byte-identical %s, %.0f s (<= 900), tree failures %s", same ? "yes" : "no",
              secs, failures ? "yes" : "no")};
}

Outcome throughput() {
  const ThroughputInput in{3 * 3600.0, 6, 30.0, 6};
  const double direct = throughput_ratio(in);
  EvalReport r;
  TreeRecord t;
  t.tree_id = "t";
  r.trees.push_back(t);
  r.throughput_input = in;
  r.throughput_ratio = direct;
  const EvalReport back = report_from_json(report_to_json(r));
  const bool ok = direct == 360.0 && back.throughput_ratio && *back.throughput_ratio == 360.0;
  return {ok, fmt("ratio %.6g, from report %.6g (== 360)", direct, back.throughput_ratio.value_or(0.0))};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"GT-baseline trait reproduction", gt_trait_reproduction},
      {"metric correctness by oracle", metric_oracles},
      {"ICP recovery", icp_recovery},
      {"segmentation on labeled scenes", segmentation_scene},
      {"scale-retrieval closure", scale_closure},
      {"degradation monotonicity", degradation_monotonicity},
      {"trait-unavailable pathway", unavailable_pathway},
      {"end-to-end determinism", end_to_end_determinism},
      {"throughput statistic", throughput},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty()) {
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) selected.push_back(i);
  }
  int failed = 0;
  for (int n : selected) {
    if (n < 1 || n > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "unknown criterion %d\n", n);
      return 2;
    }
    const auto& [name, run] = criteria[n - 1];
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d (%s): %s  %s\n", n, name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
