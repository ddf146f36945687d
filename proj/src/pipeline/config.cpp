#include <cstdio>
#include <cstdlib>
#include <set>

#include "arbor/common/error.hpp"
#include "arbor/io/serialize.hpp"
#include "arbor/pipeline/pipeline.hpp"

namespace arbor {

double throughput_ratio(const ThroughputInput& t) {
  require(t.reference_seconds > 0 && t.robot_seconds > 0, "throughput: timings must be positive");
  require(t.reference_trees > 0 && t.robot_trees > 0, "throughput: tree counts must be positive");
  return (t.reference_seconds / t.reference_trees) / (t.robot_seconds / t.robot_trees);
}

void ExperimentConfig::validate() const {
  require(!name.empty(), "config: name must be non-empty");
  require(trees >= 1, "config: trees must be >= 1");
  require(views.first >= 1 && views.first <= views.second, "config: views must satisfy 1 <= min <= max");
  RowSpec r = row;
  r.n_frames = views.first;
  r.validate();
  intrinsics.validate();
  noise.validate();
  segmentation.validate();
  qsm.validate();
  icp.validate();
  ranges.fixed.validate();
  require(neighbor_spacing > 0, "config: neighbor_spacing must be > 0");
  require(jsd_voxel > 0, "config: jsd_voxel must be > 0");
  require(gt_samples > 0, "config: gt_samples must be > 0");
  require(fused_voxel >= 0, "config: fused_voxel must be >= 0");
  require(workers >= 1, "config: workers must be >= 1");
  std::set<std::string> names{kSensorMethod, kResampleMethod};
  for (const auto& b : backends) {
    require(!b.name.empty() && b.name.find('/') == std::string::npos, "config: backend names must be plain words");
    require(names.insert(b.name).second, "config: duplicate or reserved backend name '" + b.name + "'");
    if (b.kind == BackendSpec::Kind::kOracle) b.degrade.validate();
    else require(!b.path.empty(), "config: external backend '" + b.name + "' needs a path");
  }
  if (throughput) throughput_ratio(*throughput);
}

std::filesystem::path ExperimentConfig::resolved_output_dir() const {
  if (!output_dir.empty()) return output_dir;
  const char* root = std::getenv(kOutputRootEnv);
  return std::filesystem::path(root && *root ? root : "arbor_runs") / name;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  json backends = json::array();
  for (const auto& b : c.backends) {
    if (b.kind == BackendSpec::Kind::kOracle) {
      backends.push_back({{"name", b.name}, {"kind", "oracle"}, {"degrade", b.degrade}});
    } else {
      backends.push_back(
          {{"name", b.name}, {"kind", "external"}, {"path", b.path.string()}, {"unitless_scale", b.unitless_scale}});
    }
  }
  json j = {{"name", c.name},
            {"output_dir", c.output_dir.string()},
            {"trees", c.trees},
            {"seed", c.seed},
            {"ranges", c.ranges},
            {"views", json::array({c.views.first, c.views.second})},
            {"row", c.row},
            {"intrinsics", c.intrinsics},
            {"neighbors", c.neighbors},
            {"neighbor_spacing", c.neighbor_spacing},
            {"noise", c.noise},
            {"segmentation", c.segmentation},
            {"qsm", c.qsm},
            {"icp", c.icp},
            {"jsd_voxel", c.jsd_voxel},
            {"gt_samples", c.gt_samples},
            {"fused_voxel", c.fused_voxel},
            {"evaluate_sensor", c.evaluate_sensor},
            {"gt_baseline", c.gt_baseline},
            {"backends", backends},
            {"workers", c.workers},
            {"persist_frames", c.persist_frames},
            {"throughput", nullptr}};
  if (c.throughput) {
    j["throughput"] = {{"reference_seconds", c.throughput->reference_seconds},
                       {"reference_trees", c.throughput->reference_trees},
                       {"robot_seconds", c.throughput->robot_seconds},
                       {"robot_trees", c.throughput->robot_trees}};
  }
  return j;
}

namespace {

template <class T>
void field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j) {
  check_keys(j,
             {"name", "output_dir", "trees", "seed", "ranges", "views", "row", "intrinsics", "neighbors",
              "neighbor_spacing", "noise", "segmentation", "qsm", "icp", "jsd_voxel", "gt_samples", "fused_voxel",
              "evaluate_sensor", "gt_baseline", "backends", "workers", "persist_frames", "throughput"},
             "config");
  ExperimentConfig c;
  field(j, "name", c.name);
  if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
  field(j, "trees", c.trees);
  field(j, "seed", c.seed);
  field(j, "ranges", c.ranges);
  if (j.contains("views")) {
    const auto& v = j["views"];
    require(v.is_array() && v.size() == 2, "config: views must be [min, max]");
    c.views = {v[0].get<int>(), v[1].get<int>()};
  }
  field(j, "row", c.row);
  field(j, "intrinsics", c.intrinsics);
  field(j, "neighbors", c.neighbors);
  field(j, "neighbor_spacing", c.neighbor_spacing);
  field(j, "noise", c.noise);
  field(j, "segmentation", c.segmentation);
  field(j, "qsm", c.qsm);
  field(j, "icp", c.icp);
  field(j, "jsd_voxel", c.jsd_voxel);
  field(j, "gt_samples", c.gt_samples);
  field(j, "fused_voxel", c.fused_voxel);
  field(j, "evaluate_sensor", c.evaluate_sensor);
  field(j, "gt_baseline", c.gt_baseline);
  if (j.contains("backends")) {
    require(j["backends"].is_array(), "config: backends must be an array");
    c.backends.clear();
    for (const auto& b : j["backends"]) {
      check_keys(b, {"name", "kind", "degrade", "path", "unitless_scale"}, "backend");
      BackendSpec s;
      field(b, "name", s.name);
      const std::string kind = b.value("kind", std::string("oracle"));
      require(kind == "oracle" || kind == "external", "backend: kind must be 'oracle' or 'external'");
      s.kind = kind == "oracle" ? BackendSpec::Kind::kOracle : BackendSpec::Kind::kExternal;
      field(b, "degrade", s.degrade);
      if (b.contains("path")) s.path = b["path"].get<std::string>();
      field(b, "unitless_scale", s.unitless_scale);
      c.backends.push_back(std::move(s));
    }
  }
  field(j, "workers", c.workers);
  field(j, "persist_frames", c.persist_frames);
  if (j.contains("throughput") && !j["throughput"].is_null()) {
    const auto& t = j["throughput"];
    check_keys(t, {"reference_seconds", "reference_trees", "robot_seconds", "robot_trees"}, "throughput");
    ThroughputInput in;
    field(t, "reference_seconds", in.reference_seconds);
    field(t, "reference_trees", in.reference_trees);
    field(t, "robot_seconds", in.robot_seconds);
    field(t, "robot_trees", in.robot_trees);
    c.throughput = in;
  }
  c.validate();
  return c;
}

std::string config_hash(const ExperimentConfig& cfg) {
  json j = config_to_json(cfg);
  j.erase("output_dir");
  const std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace arbor
