#include <gtest/gtest.h>

#include <cmath>

#include "arbor/common/error.hpp"
#include "arbor/io/files.hpp"
#include "arbor/metrics/metrics.hpp"
#include "arbor/pipeline/pipeline.hpp"
#include "support/support.hpp"

using namespace arbor;
using nlohmann::json;

namespace {

ExperimentConfig small_config(const std::string& name) {
  ExperimentConfig cfg;
  cfg.name = name;
  cfg.output_dir = test_support::scratch_dir(name);
  cfg.trees = 3;
  cfg.seed = 11;
  cfg.views = {15, 16};
  cfg.intrinsics = CameraIntrinsics{267.25, 267.25, 240.0, 150.0, 480, 300};
  cfg.gt_samples = 20000;
  cfg.backends[0].degrade.samples = 20000;
  return cfg;
}

MethodRecord record(const std::string& method, double cd, double jsd, std::optional<double> d,
                    std::optional<int> b) {
  MethodRecord m;
  m.method = method;
  m.geom = GeomMetrics{cd, jsd, 10, 10, 0.05};
  m.traits.trunk_diameter = d;
  m.traits.branch_count = b;
  return m;
}

TreeRecord tree(const std::string& id, double gt_d, int gt_b, std::vector<MethodRecord> methods) {
  TreeRecord t;
  t.tree_id = id;
  t.ground_truth.trunk_diameter = gt_d;
  t.ground_truth.branch_count = gt_b;
  t.methods = std::move(methods);
  return t;
}

}  // namespace

TEST(Pipeline, SmokeIdentityOracleDeterministic) {
  const ExperimentConfig cfg = small_config("pipeline_smoke");
  const EvalReport r = run_pipeline(cfg);
  ASSERT_EQ(r.trees.size(), 3u);
  EXPECT_FALSE(r.has_failures());
  for (const auto& t : r.trees) {
    EXPECT_EQ(t.status, "ok") << t.tree_id << ": " << t.error;
    EXPECT_GE(t.views, 15);
    EXPECT_LE(t.views, 16);
    const TreeModel m = generate_tree(t.params);
    const double floor = chamfer_l2(sample_surface(m.mesh, 20000, 1), sample_surface(m.mesh, 20000, 2));
    bool seen_oracle = false;
    for (const auto& mr : t.methods) {
      EXPECT_EQ(mr.status, "ok") << t.tree_id << " " << mr.method << ": " << mr.error;
      if (mr.method == "oracle") {
        seen_oracle = true;
        ASSERT_TRUE(mr.geom.has_value());
        EXPECT_LE(mr.geom->chamfer_l2, 1.1 * floor) << t.tree_id;
      }
    }
    EXPECT_TRUE(seen_oracle);
  }
  const auto root = cfg.resolved_output_dir();
  for (const char* f : {"report.json", "timing.json", "tables/geometry.csv", "tables/trunk_diameter.md",
                        "tables/branch_count.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(root / f)) << f;
  }
  const std::string first = io::read_text(root / "report.json");
  const json rj = json::parse(first);
  EXPECT_EQ(rj["provenance"]["config_hash"], config_hash(cfg));

  run_pipeline(cfg);
  EXPECT_EQ(io::read_text(root / "report.json"), first);

  const EvalReport back = report_from_json(rj);
  EXPECT_EQ(report_to_json(back).dump(), rj.dump());
}

TEST(Pipeline, DegenerateCropRecordsErrors) {
  ExperimentConfig cfg = small_config("pipeline_degenerate");
  cfg.trees = 2;
  cfg.evaluate_sensor = false;
  cfg.gt_baseline = false;
  Crop all;
  all.half_space.normal = Vec3::UnitZ();
  all.half_space.offset = -100.0;
  cfg.backends[0].degrade.occlusion = {all};
  const EvalReport r = run_pipeline(cfg);
  EXPECT_TRUE(r.has_failures());
  ASSERT_EQ(r.trees.size(), 2u);
  for (const auto& t : r.trees) {
    ASSERT_EQ(t.methods.size(), 1u);
    EXPECT_EQ(t.methods[0].status, "error");
    EXPECT_FALSE(t.methods[0].stage.empty());
    EXPECT_FALSE(t.methods[0].error.empty());
  }
  ASSERT_EQ(r.aggregates.size(), 1u);
  EXPECT_EQ(r.aggregates[0].errors, 2u);
}

TEST(Tables, SingleRowHasZeroStd) {
  EvalReport r;
  r.trees = {tree("t0", 0.05, 10, {record("m", 0.03, 0.6, 0.055, 12)})};
  r.aggregates = aggregate(r.trees);
  ASSERT_EQ(r.aggregates.size(), 1u);
  const auto& a = r.aggregates[0];
  EXPECT_EQ(a.cd_std, 0.0);
  EXPECT_EQ(a.jsd_std, 0.0);
  ASSERT_TRUE(a.trunk && a.branch);
  EXPECT_EQ(a.trunk->mae_std, 0.0);
  EXPECT_NEAR(a.trunk->mae_mean, 0.5, 1e-12);
  EXPECT_NEAR(a.branch->mape_mean, 20.0, 1e-12);
  const Tables t = make_tables(r);
  EXPECT_EQ(t.geometry_csv, "method,n,cd_mean,cd_std,jsd_mean,jsd_std\nm,1,0.03,0,0.6,0\n");
}

TEST(Tables, UnavailableTraitsShowDashes) {
  EvalReport r;
  r.trees = {tree("t0", 0.05, 10, {record("sensor", 0.03, 0.6, std::nullopt, 8), record("b", 0.02, 0.5, 0.05, 10)}),
             tree("t1", 0.06, 12, {record("sensor", 0.04, 0.6, std::nullopt, 9), record("b", 0.02, 0.5, 0.06, 12)})};
  r.aggregates = aggregate(r.trees);
  const Tables t = make_tables(r);
  EXPECT_NE(t.trunk_csv.find("sensor,0,--,--,--,--,--,--"), std::string::npos) << t.trunk_csv;
  EXPECT_EQ(t.branch_csv.find("--"), std::string::npos);
  EXPECT_NE(t.trunk_md.find("| sensor | 0 | -- |"), std::string::npos) << t.trunk_md;
  EXPECT_EQ(r.aggregates[0].trunk_unavailable, 2u);
}

TEST(Tables, EmptyReportRejected) { EXPECT_THROW(make_tables(EvalReport{}), InvalidInput); }

TEST(Tables, AggregatesMatchRecomputation) {
  Rng rng(3);
  std::vector<TreeRecord> trees;
  std::vector<double> cd, d_ae, d_ape, b_ae;
  for (int i = 0; i < 12; ++i) {
    const double gt_d = rng.uniform(0.03, 0.08);
    const int gt_b = 10 + static_cast<int>(rng.index(20));
    const double c = rng.uniform(0.01, 0.05);
    const double d = gt_d + rng.normal(0, 0.003);
    const int b = gt_b + static_cast<int>(rng.index(5)) - 2;
    cd.push_back(c);
    d_ae.push_back(std::fabs(100 * d - 100 * gt_d));
    d_ape.push_back(100 * std::fabs(100 * d - 100 * gt_d) / (100 * gt_d));
    b_ae.push_back(std::abs(b - gt_b));
    trees.push_back(tree("t" + std::to_string(i), gt_d, gt_b, {record("x", c, 0.5, d, b)}));
  }
  const auto aggs = aggregate(trees);
  ASSERT_EQ(aggs.size(), 1u);
  double m = 0, v = 0;
  for (double x : cd) m += x;
  m /= 12;
  for (double x : cd) v += (x - m) * (x - m);
  EXPECT_NEAR(aggs[0].cd_mean, m, 1e-15);
  EXPECT_NEAR(aggs[0].cd_std, std::sqrt(v / 12), 1e-15);
  double dm = 0, pm = 0, bm = 0;
  for (int i = 0; i < 12; ++i) {
    dm += d_ae[i] / 12;
    pm += d_ape[i] / 12;
    bm += b_ae[i] / 12;
  }
  EXPECT_NEAR(aggs[0].trunk->mae_mean, dm, 1e-12);
  EXPECT_NEAR(aggs[0].trunk->mape_mean, pm, 1e-10);
  EXPECT_NEAR(aggs[0].branch->mae_mean, bm, 1e-12);
}

TEST(Throughput, RatioFromTimings) {
  EXPECT_NEAR(throughput_ratio({3 * 3600.0, 6, 30.0, 6}), 360.0, 1e-9);
  EXPECT_NEAR(throughput_ratio({100.0, 1, 10.0, 2}), 20.0, 1e-12);
  EXPECT_THROW(throughput_ratio({1.0, 0, 1.0, 1}), InvalidInput);
}

TEST(Config, JsonRoundTripAndStrictKeys) {
  ExperimentConfig cfg = small_config("cfg_rt");
  cfg.throughput = ThroughputInput{10800, 6, 30, 6};
  BackendSpec ext;
  ext.name = "nerf";
  ext.kind = BackendSpec::Kind::kExternal;
  ext.path = "/tmp/nerf";
  ext.unitless_scale = true;
  cfg.backends.push_back(ext);
  const json j = config_to_json(cfg);
  const ExperimentConfig back = config_from_json(j);
  EXPECT_EQ(config_to_json(back), j);
  EXPECT_EQ(config_hash(back), config_hash(cfg));
  EXPECT_EQ(config_hash(cfg).size(), 16u);

  ExperimentConfig moved = cfg;
  moved.output_dir = "/elsewhere";
  EXPECT_EQ(config_hash(moved), config_hash(cfg));
  moved.seed = 12;
  EXPECT_NE(config_hash(moved), config_hash(cfg));

  json bad = j;
  bad["tres"] = 3;
  EXPECT_THROW(config_from_json(bad), InvalidInput);
  bad = j;
  bad["trees"] = 0;
  EXPECT_THROW(config_from_json(bad), InvalidInput);
  bad = j;
  bad["qsm"]["typo"] = 1;
  EXPECT_THROW(config_from_json(bad), InvalidInput);
}

TEST(Config, OutputRootFromEnvironment) {
  ExperimentConfig cfg;
  cfg.name = "envtest";
  setenv(kOutputRootEnv, "/tmp/arbor_env_root", 1);
  EXPECT_EQ(cfg.resolved_output_dir(), std::filesystem::path("/tmp/arbor_env_root/envtest"));
  unsetenv(kOutputRootEnv);
  EXPECT_EQ(cfg.resolved_output_dir(), std::filesystem::path("arbor_runs/envtest"));
  cfg.output_dir = "/x/y";
  EXPECT_EQ(cfg.resolved_output_dir(), std::filesystem::path("/x/y"));
}
