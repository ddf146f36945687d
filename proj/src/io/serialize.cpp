#include "arbor/io/serialize.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "arbor/common/error.hpp"

namespace nlohmann {

void adl_serializer<arbor::Vec3>::to_json(json& j, const arbor::Vec3& v) { j = json::array({v.x(), v.y(), v.z()}); }

void adl_serializer<arbor::Vec3>::from_json(const json& j, arbor::Vec3& v) {
  arbor::require(j.is_array() && j.size() == 3, "expected a 3-element array");
  for (int i = 0; i < 3; ++i) v[i] = j[i].get<double>();
}

void adl_serializer<arbor::Mat3>::to_json(json& j, const arbor::Mat3& m) {
  j = json::array();
  for (int r = 0; r < 3; ++r) j.push_back(json::array({m(r, 0), m(r, 1), m(r, 2)}));
}

void adl_serializer<arbor::Mat3>::from_json(const json& j, arbor::Mat3& m) {
  arbor::require(j.is_array() && j.size() == 3, "expected a 3x3 nested array");
  for (int r = 0; r < 3; ++r) {
    arbor::require(j[r].is_array() && j[r].size() == 3, "expected a 3x3 nested array");
    for (int c = 0; c < 3; ++c) m(r, c) = j[r][c].get<double>();
  }
}

}  // namespace nlohmann

namespace arbor {

namespace {

template <class T>
void get(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("field '") + key + "': " + e.what());
  }
}

// null encodes +infinity.
void get_inf(const json& j, const char* key, double& out) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) out = std::numeric_limits<double>::infinity();
  else get(j, key, out);
}

json inf_or(double v) { return std::isinf(v) && v > 0 ? json(nullptr) : json(v); }

template <class T>
json pair_json(const std::pair<T, T>& p) {
  return json::array({p.first, p.second});
}

template <class T>
void get_pair(const json& j, const char* key, std::pair<T, T>& out) {
  if (!j.contains(key)) return;
  const auto& a = j.at(key);
  require(a.is_array() && a.size() == 2, std::string("field '") + key + "' must be a 2-element array");
  out = {a[0].get<T>(), a[1].get<T>()};
}

void require_object(const json& j, const char* context) {
  require(j.is_object(), std::string(context) + ": expected a JSON object");
}

}  // namespace

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* context) {
  require_object(j, context);
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    require(ok, std::string(context) + ": unknown key '" + k + "'");
  }
}

void to_json(json& j, const CameraIntrinsics& v) {
  j = {{"fx", v.fx}, {"fy", v.fy}, {"cx", v.cx}, {"cy", v.cy}, {"width", v.width}, {"height", v.height}};
}

void from_json(const json& j, CameraIntrinsics& v) {
  check_keys(j, {"fx", "fy", "cx", "cy", "width", "height"}, "intrinsics");
  get(j, "fx", v.fx);
  get(j, "fy", v.fy);
  get(j, "cx", v.cx);
  get(j, "cy", v.cy);
  get(j, "width", v.width);
  get(j, "height", v.height);
}

void to_json(json& j, const Rigid& v) { j = {{"rotation", v.rotation}, {"translation", v.translation}}; }

void from_json(const json& j, Rigid& v) {
  check_keys(j, {"rotation", "translation"}, "rigid transform");
  get(j, "rotation", v.rotation);
  get(j, "translation", v.translation);
}

void to_json(json& j, const Aabb& v) { j = {{"min", v.min}, {"max", v.max}}; }

void from_json(const json& j, Aabb& v) {
  check_keys(j, {"min", "max"}, "box");
  require(j.contains("min") && j.contains("max"), "box: needs min and max");
  get(j, "min", v.min);
  get(j, "max", v.max);
}

void to_json(json& j, const SkeletonGraph& v) {
  json nodes = json::array();
  for (const auto& n : v.nodes) nodes.push_back({{"p", n.position}, {"r", n.radius}});
  json edges = json::array();
  for (const auto& [a, b] : v.edges) edges.push_back(json::array({a, b}));
  j = {{"nodes", nodes}, {"edges", edges}, {"trunk_path", v.trunk_path}, {"branch_roots", v.branch_roots}};
  if (!v.support.empty()) j["support"] = v.support;
}

void from_json(const json& j, SkeletonGraph& v) {
  check_keys(j, {"nodes", "edges", "trunk_path", "branch_roots", "support"}, "skeleton");
  v = SkeletonGraph{};
  for (const auto& n : j.at("nodes")) {
    check_keys(n, {"p", "r"}, "skeleton node");
    v.nodes.push_back({n.at("p").get<Vec3>(), n.at("r").get<double>()});
  }
  for (const auto& e : j.at("edges")) v.edges.emplace_back(e.at(0).get<std::uint32_t>(), e.at(1).get<std::uint32_t>());
  get(j, "trunk_path", v.trunk_path);
  get(j, "branch_roots", v.branch_roots);
  get(j, "support", v.support);
}

void to_json(json& j, const TraitReport& v) {
  j = {{"trunk_diameter", v.trunk_diameter ? json(*v.trunk_diameter) : json(nullptr)},
       {"branch_count", v.branch_count ? json(*v.branch_count) : json(nullptr)},
       {"tree_height", v.tree_height},
       {"diagnostics",
        {{"circle_fit_rmse", v.diagnostics.circle_fit_rmse},
         {"slice_points", v.diagnostics.slice_points},
         {"skeleton_nodes", v.diagnostics.skeleton_nodes}}},
       {"unavailable_reason", v.unavailable_reason}};
}

void from_json(const json& j, TraitReport& v) {
  check_keys(j, {"trunk_diameter", "branch_count", "tree_height", "diagnostics", "unavailable_reason"}, "traits");
  v = TraitReport{};
  if (j.contains("trunk_diameter") && !j["trunk_diameter"].is_null()) v.trunk_diameter = j["trunk_diameter"].get<double>();
  if (j.contains("branch_count") && !j["branch_count"].is_null()) v.branch_count = j["branch_count"].get<int>();
  get(j, "tree_height", v.tree_height);
  get(j, "unavailable_reason", v.unavailable_reason);
  if (j.contains("diagnostics")) {
    const auto& d = j["diagnostics"];
    check_keys(d, {"circle_fit_rmse", "slice_points", "skeleton_nodes"}, "trait diagnostics");
    get(d, "circle_fit_rmse", v.diagnostics.circle_fit_rmse);
    get(d, "slice_points", v.diagnostics.slice_points);
    get(d, "skeleton_nodes", v.diagnostics.skeleton_nodes);
  }
}

void to_json(json& j, const TreeParams& v) {
  j = {{"seed", v.seed},
       {"trunk_height", v.trunk_height},
       {"trunk_base_diameter", v.trunk_base_diameter},
       {"trunk_taper", v.trunk_taper},
       {"branch_count", v.branch_count},
       {"branch_zone", pair_json(v.branch_zone)},
       {"branch_elevation_range", pair_json(v.branch_elevation_range)},
       {"branch_length_range", pair_json(v.branch_length_range)},
       {"branch_diameter_ratio", v.branch_diameter_ratio},
       {"curvature_noise", v.curvature_noise}};
}

void from_json(const json& j, TreeParams& v) {
  check_keys(j,
             {"seed", "trunk_height", "trunk_base_diameter", "trunk_taper", "branch_count", "branch_zone",
              "branch_elevation_range", "branch_length_range", "branch_diameter_ratio", "curvature_noise"},
             "tree params");
  get(j, "seed", v.seed);
  get(j, "trunk_height", v.trunk_height);
  get(j, "trunk_base_diameter", v.trunk_base_diameter);
  get(j, "trunk_taper", v.trunk_taper);
  get(j, "branch_count", v.branch_count);
  get_pair(j, "branch_zone", v.branch_zone);
  get_pair(j, "branch_elevation_range", v.branch_elevation_range);
  get_pair(j, "branch_length_range", v.branch_length_range);
  get(j, "branch_diameter_ratio", v.branch_diameter_ratio);
  get(j, "curvature_noise", v.curvature_noise);
}

void to_json(json& j, const TreeParamRanges& v) {
  j = {{"trunk_height", pair_json(v.trunk_height)},
       {"trunk_base_diameter", pair_json(v.trunk_base_diameter)},
       {"trunk_taper", pair_json(v.trunk_taper)},
       {"branch_count", pair_json(v.branch_count)},
       {"fixed", v.fixed}};
}

void from_json(const json& j, TreeParamRanges& v) {
  check_keys(j, {"trunk_height", "trunk_base_diameter", "trunk_taper", "branch_count", "fixed"}, "param ranges");
  get_pair(j, "trunk_height", v.trunk_height);
  get_pair(j, "trunk_base_diameter", v.trunk_base_diameter);
  get_pair(j, "trunk_taper", v.trunk_taper);
  get_pair(j, "branch_count", v.branch_count);
  get(j, "fixed", v.fixed);
  require(v.trunk_height.first <= v.trunk_height.second && v.trunk_base_diameter.first <= v.trunk_base_diameter.second &&
              v.trunk_taper.first <= v.trunk_taper.second && v.branch_count.first <= v.branch_count.second,
          "param ranges: each range must be ordered");
}

void to_json(json& j, const RowSpec& v) {
  j = {{"row_direction", v.row_direction},
       {"row_origin", v.row_origin},
       {"camera_offset", v.camera_offset},
       {"camera_height", v.camera_height},
       {"speed", v.speed},
       {"fps", v.fps},
       {"n_frames", v.n_frames},
       {"aim", v.aim == AimPolicy::kTrackTrunk ? "track_trunk" : "fixed_perpendicular"},
       {"pitch_deg", v.pitch_deg}};
}

void from_json(const json& j, RowSpec& v) {
  check_keys(j,
             {"row_direction", "row_origin", "camera_offset", "camera_height", "speed", "fps", "n_frames", "aim",
              "pitch_deg"},
             "row spec");
  get(j, "row_direction", v.row_direction);
  get(j, "row_origin", v.row_origin);
  get(j, "camera_offset", v.camera_offset);
  get(j, "camera_height", v.camera_height);
  get(j, "speed", v.speed);
  get(j, "fps", v.fps);
  get(j, "n_frames", v.n_frames);
  if (j.contains("aim")) {
    const auto a = j["aim"].get<std::string>();
    require(a == "track_trunk" || a == "fixed_perpendicular", "row spec: unknown aim policy '" + a + "'");
    v.aim = a == "track_trunk" ? AimPolicy::kTrackTrunk : AimPolicy::kFixedPerpendicular;
  }
  get(j, "pitch_deg", v.pitch_deg);
}

void to_json(json& j, const NoiseSpec& v) {
  j = {{"sigma_a", v.sigma_a},
       {"sigma_b", v.sigma_b},
       {"dropout_edge_px", v.dropout_edge_px},
       {"max_range", inf_or(v.max_range)},
       {"seed", v.seed}};
}

void from_json(const json& j, NoiseSpec& v) {
  check_keys(j, {"sigma_a", "sigma_b", "dropout_edge_px", "max_range", "seed"}, "noise spec");
  get(j, "sigma_a", v.sigma_a);
  get(j, "sigma_b", v.sigma_b);
  get(j, "dropout_edge_px", v.dropout_edge_px);
  get_inf(j, "max_range", v.max_range);
  get(j, "seed", v.seed);
}

void to_json(json& j, const SegConfig& v) {
  j = {{"max_range", v.max_range},
       {"tau_sky", v.tau_sky},
       {"z_ground", v.z_ground},
       {"k", v.k},
       {"keep_policy", v.keep_policy == KeepPolicy::kLargest ? "largest" : "center"},
       {"row_direction", v.row_direction},
       {"seed", v.seed}};
}

void from_json(const json& j, SegConfig& v) {
  check_keys(j, {"max_range", "tau_sky", "z_ground", "k", "keep_policy", "row_direction", "seed"}, "segmentation config");
  get(j, "max_range", v.max_range);
  get(j, "tau_sky", v.tau_sky);
  get(j, "z_ground", v.z_ground);
  get(j, "k", v.k);
  if (j.contains("keep_policy")) {
    const auto p = j["keep_policy"].get<std::string>();
    require(p == "center" || p == "largest", "segmentation config: unknown keep_policy '" + p + "'");
    v.keep_policy = p == "largest" ? KeepPolicy::kLargest : KeepPolicy::kCenter;
  }
  get(j, "row_direction", v.row_direction);
  get(j, "seed", v.seed);
}

void to_json(json& j, const QsmParams& v) {
  j = {{"slice_thickness", v.slice_thickness},
       {"measure_height", v.measure_height},
       {"knn_k", v.knn_k},
       {"level_step", v.level_step},
       {"min_branch_length", v.min_branch_length},
       {"min_branch_points", v.min_branch_points},
       {"circle_fit_max_rmse", v.circle_fit_max_rmse},
       {"max_orphan_fraction", v.max_orphan_fraction}};
}

void from_json(const json& j, QsmParams& v) {
  check_keys(j,
             {"slice_thickness", "measure_height", "knn_k", "level_step", "min_branch_length", "min_branch_points",
              "circle_fit_max_rmse", "max_orphan_fraction"},
             "qsm params");
  get(j, "slice_thickness", v.slice_thickness);
  get(j, "measure_height", v.measure_height);
  get(j, "knn_k", v.knn_k);
  get(j, "level_step", v.level_step);
  get(j, "min_branch_length", v.min_branch_length);
  get(j, "min_branch_points", v.min_branch_points);
  get(j, "circle_fit_max_rmse", v.circle_fit_max_rmse);
  get(j, "max_orphan_fraction", v.max_orphan_fraction);
}

void to_json(json& j, const Crop& v) {
  if (v.kind == Crop::Kind::kHalfSpace) {
    j = {{"type", "half_space"}, {"normal", v.half_space.normal}, {"offset", v.half_space.offset}};
  } else {
    j = {{"type", "sector"}, {"start_deg", v.sector.start_deg}, {"end_deg", v.sector.end_deg}};
  }
}

void from_json(const json& j, Crop& v) {
  require_object(j, "crop");
  const auto type = j.value("type", std::string());
  if (type == "half_space") {
    check_keys(j, {"type", "normal", "offset"}, "half-space crop");
    v.kind = Crop::Kind::kHalfSpace;
    get(j, "normal", v.half_space.normal);
    get(j, "offset", v.half_space.offset);
  } else if (type == "sector") {
    check_keys(j, {"type", "start_deg", "end_deg"}, "sector crop");
    v.kind = Crop::Kind::kSector;
    get(j, "start_deg", v.sector.start_deg);
    get(j, "end_deg", v.sector.end_deg);
  } else {
    throw InvalidInput("crop: type must be 'half_space' or 'sector'");
  }
}

void to_json(json& j, const DegradeSpec& v) {
  j = {{"subsample_fraction", v.subsample_fraction},
       {"noise_sigma", v.noise_sigma},
       {"occlusion", v.occlusion},
       {"strip_scale", v.strip_scale},
       {"samples", v.samples},
       {"seed", v.seed}};
}

void from_json(const json& j, DegradeSpec& v) {
  check_keys(j, {"subsample_fraction", "noise_sigma", "occlusion", "strip_scale", "samples", "seed"}, "degrade spec");
  get(j, "subsample_fraction", v.subsample_fraction);
  get(j, "noise_sigma", v.noise_sigma);
  get(j, "occlusion", v.occlusion);
  get(j, "strip_scale", v.strip_scale);
  get(j, "samples", v.samples);
  get(j, "seed", v.seed);
}

void to_json(json& j, const IcpParams& v) {
  j = {{"max_iter", v.max_iter},
       {"rms_delta", v.rms_delta},
       {"max_corr_dist", v.max_corr_dist},
       {"init", v.init ? json(*v.init) : json(nullptr)},
       {"voxel_size", v.voxel_size},
       {"crop", v.crop ? json(*v.crop) : json(nullptr)}};
}

void from_json(const json& j, IcpParams& v) {
  check_keys(j, {"max_iter", "rms_delta", "max_corr_dist", "init", "voxel_size", "crop"}, "icp params");
  get(j, "max_iter", v.max_iter);
  get(j, "rms_delta", v.rms_delta);
  get(j, "max_corr_dist", v.max_corr_dist);
  if (j.contains("init") && !j["init"].is_null()) v.init = j["init"].get<Rigid>();
  get(j, "voxel_size", v.voxel_size);
  if (j.contains("crop") && !j["crop"].is_null()) v.crop = j["crop"].get<Aabb>();
}

void to_json(json& j, const IcpReport& v) {
  j = {{"transform", v.transform},
       {"rms_history", v.rms_history},
       {"iterations", v.iterations},
       {"converged", v.converged},
       {"inlier_fraction", v.inlier_fraction},
       {"max_corr_dist", v.max_corr_dist},
       {"source_points", v.source_points},
       {"target_points", v.target_points},
       {"init_method", v.init_method}};
}

void to_json(json& j, const GeomMetrics& v) {
  j = {{"chamfer_l2", v.chamfer_l2},
       {"jsd", v.jsd},
       {"n_source", v.n_source},
       {"n_target", v.n_target},
       {"voxel_size", v.voxel_size}};
}

void to_json(json& j, const ErrorStats& v) {
  j = {{"n", v.n},
       {"mae_mean", v.mae_mean},
       {"mae_std", v.mae_std},
       {"mae_p75", v.mae_p75},
       {"mape_mean", v.mape_mean},
       {"mape_std", v.mape_std},
       {"mape_p75", v.mape_p75},
       {"mape_n", v.mape_n},
       {"mape_excluded", v.mape_excluded}};
}

void to_json(json& j, const ScaleResult& v) { j = {{"s", v.s}, {"h_ref", v.h_ref}, {"h_rec", v.h_rec}}; }

}  // namespace arbor
