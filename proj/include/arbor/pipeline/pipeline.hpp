#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "arbor/backend/backend.hpp"
#include "arbor/metrics/metrics.hpp"
#include "arbor/qsm/qsm.hpp"
#include "arbor/reg/icp.hpp"
#include "arbor/scale/scale.hpp"
#include "arbor/seg/background.hpp"
#include "arbor/sim/degrade.hpp"
#include "arbor/sim/trajectory.hpp"
#include "arbor/tree/tree_gen.hpp"

namespace arbor {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kOutputRootEnv = "ARBOR_OUTPUT_ROOT";
inline constexpr const char* kSensorMethod = "sensor-fused";
inline constexpr const char* kResampleMethod = "gt-resample";

struct BackendSpec {
  enum class Kind { kOracle, kExternal };
  std::string name = "oracle";
  Kind kind = Kind::kOracle;
  DegradeSpec degrade;         // oracle only
  std::filesystem::path path;  // external only: directory of <tree_id>.{ply,obj}
  bool unitless_scale = false; // external only
};

/// Reference (e.g. laser scanner) and robot wall-clock for comparable tree counts.
struct ThroughputInput {
  double reference_seconds = 0.0;
  int reference_trees = 0;
  double robot_seconds = 0.0;
  int robot_trees = 0;
};

/// (reference seconds per tree) / (robot seconds per tree).
double throughput_ratio(const ThroughputInput& t);

struct ExperimentConfig {
  std::string name = "experiment";
  /// Empty selects $ARBOR_OUTPUT_ROOT/<name>, or ./arbor_runs/<name>.
  std::filesystem::path output_dir;
  int trees = 30;
  std::uint64_t seed = 0;
  TreeParamRanges ranges;
  std::pair<int, int> views{15, 30};
  RowSpec row;
  CameraIntrinsics intrinsics;
  bool neighbors = true;
  double neighbor_spacing = 2.5;  // m along the row
  NoiseSpec noise{0.001, 0.0015, 1, 20.0, 0};
  SegConfig segmentation;
  QsmParams qsm;
  IcpParams icp;
  double jsd_voxel = 0.05;           // m
  std::size_t gt_samples = 100000;
  double fused_voxel = 0.01;         // m, thinning of the fused sensor cloud
  bool evaluate_sensor = true;
  bool gt_baseline = true;
  std::vector<BackendSpec> backends{BackendSpec{}};
  int workers = 1;
  /// Per-frame depth, mono, label and mask PNGs.
  bool persist_frames = false;
  std::optional<ThroughputInput> throughput;

  void validate() const;
  std::filesystem::path resolved_output_dir() const;
};

nlohmann::json config_to_json(const ExperimentConfig& cfg);
/// Strict: unknown keys and invalid values raise InvalidInput.
ExperimentConfig config_from_json(const nlohmann::json& j);
/// FNV-1a 64 of the canonical config JSON without output_dir, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

struct MethodRecord {
  std::string method;
  std::string status = "ok";  // ok | error
  std::string stage;          // failing stage when status is error
  std::string error;
  std::optional<GeomMetrics> geom;
  TraitReport traits;
  std::optional<ScaleResult> scale;
  int icp_iterations = 0;
  bool icp_converged = false;
  double icp_final_rms = 0.0;
  std::size_t points = 0;
};

struct TreeRecord {
  std::string tree_id;
  int index = 0;
  TreeParams params;
  TraitReport ground_truth;
  std::string status = "ok";
  std::string stage;
  std::string error;
  int views = 0;
  std::size_t fused_points = 0;
  double h_ref = 0.0;
  double seg_iou_mean = 0.0;
  std::vector<std::string> warnings;
  std::vector<MethodRecord> methods;
};

struct MethodAggregate {
  std::string method;
  std::size_t trees = 0;
  std::size_t geom_n = 0;
  double cd_mean = 0.0, cd_std = 0.0, jsd_mean = 0.0, jsd_std = 0.0;
  /// Trunk diameter errors in centimetres.
  std::optional<ErrorStats> trunk;
  std::optional<ErrorStats> branch;
  std::size_t trunk_unavailable = 0;
  std::size_t branch_unavailable = 0;
  std::size_t errors = 0;
};

struct EvalReport {
  nlohmann::json provenance;
  std::vector<TreeRecord> trees;
  std::vector<MethodAggregate> aggregates;
  std::optional<ThroughputInput> throughput_input;
  std::optional<double> throughput_ratio;

  bool has_failures() const;
};

/// Wall-clock seconds per stage, summed over trees.
using StageTiming = std::map<std::string, double>;

/// Runs every tree; a tree's failure is recorded in its row and never aborts
/// the others. Writes per-stage artifacts, report.json, timing.json and tables
/// under the output directory.
EvalReport run_pipeline(const ExperimentConfig& cfg, StageTiming* timing = nullptr);

/// Per-method aggregates in first-appearance order.
std::vector<MethodAggregate> aggregate(const std::vector<TreeRecord>& trees);

nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

struct Tables {
  std::string geometry_csv, geometry_md;
  std::string trunk_csv, trunk_md;
  std::string branch_csv, branch_md;
};

/// Geometry (CD/JSD mean, std) and trait error (MAE/MAPE mean, std, 75th)
/// tables; "--" marks methods whose trait was never available.
/// Throws InvalidInput for a report without trees.
Tables make_tables(const EvalReport& report);
void write_tables(const Tables& tables, const std::filesystem::path& dir);

}  // namespace arbor
