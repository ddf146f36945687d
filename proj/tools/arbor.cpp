#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "arbor/backend/backend.hpp"
#include "arbor/common/error.hpp"
#include "arbor/common/rng.hpp"
#include "arbor/geom/voxel.hpp"
#include "arbor/io/files.hpp"
#include "arbor/io/frames.hpp"
#include "arbor/io/obj.hpp"
#include "arbor/io/ply.hpp"
#include "arbor/io/serialize.hpp"
#include "arbor/metrics/metrics.hpp"
#include "arbor/pipeline/pipeline.hpp"
#include "arbor/qsm/qsm.hpp"
#include "arbor/reg/icp.hpp"
#include "arbor/scale/scale.hpp"
#include "arbor/seg/background.hpp"
#include "arbor/sim/degrade.hpp"
#include "arbor/sim/render.hpp"
#include "arbor/sim/trajectory.hpp"
#include "arbor/tree/tree_gen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace arbor;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;

fs::path output_root() {
  const char* root = std::getenv(kOutputRootEnv);
  return root && *root ? fs::path(root) : fs::path("arbor_runs");
}

fs::path out_or_default(const std::string& out, const char* command) {
  return out.empty() ? output_root() / command : fs::path(out);
}

template <class T>
T read_config(const std::string& path) {
  T value{};
  if (!path.empty()) value = io::read_json(path).get<T>();
  return value;
}

PointCloud read_cloud(const std::string& path) {
  return ingest_external(path, GeometryKind::kAuto).cloud;
}

std::string tree_stem(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "tree_%03zu", i);
  return buf;
}

std::string frame_stem(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%04zu", i);
  return buf;
}

std::pair<int, int> parse_views(const std::string& s) {
  const auto dots = s.find("..");
  try {
    if (dots == std::string::npos) {
      const int n = std::stoi(s);
      return {n, n};
    }
    return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
  } catch (const std::logic_error&) {
    throw InvalidInput("--views: expected N or LO..HI, got '" + s + "'");
  }
}

/// Center of the lowest vertices (within 1 cm of the minimum z) at ground level.
Vec3 mesh_base(const TriMesh& mesh) {
  require(!mesh.vertices.empty(), "mesh has no vertices");
  double zmin = mesh.vertices.front().z();
  for (const auto& v : mesh.vertices) zmin = std::min(zmin, v.z());
  Vec3 sum = Vec3::Zero();
  std::size_t n = 0;
  for (const auto& v : mesh.vertices) {
    if (v.z() <= zmin + 0.01) {
      sum += v;
      ++n;
    }
  }
  return Vec3(sum.x() / n, sum.y() / n, 0.0);
}

int cmd_gen(int count, std::uint64_t seed, const std::string& out_arg, const std::string& params_path,
            std::size_t samples) {
  require(count > 0, "--count must be positive");
  const auto ranges = read_config<TreeParamRanges>(params_path);
  const fs::path out = out_or_default(out_arg, "gen");
  for (int i = 0; i < count; ++i) {
    const TreeParams params = ranges.draw(seed, static_cast<std::uint64_t>(i));
    const TreeModel model = generate_tree(params);
    const fs::path dir = out / tree_stem(static_cast<std::size_t>(i));
    fs::create_directories(dir);
    io::write_json(dir / "params.json", model.params);
    io::write_json(dir / "skeleton.json", model.skeleton);
    io::write_json(dir / "traits.json", model.traits);
    io::write_obj(dir / "tree.obj", model.mesh);
    if (samples > 0) {
      io::write_ply(dir / "gt_sample.ply", sample_surface(model.mesh, samples, mix64(params.seed ^ hash_name("gt-sample"))));
    }
    std::cout << dir.string() << "\n";
  }
  return kExitOk;
}

int cmd_render(const std::string& tree_path, const std::vector<std::string>& neighbors, double spacing,
               const std::string& row_path, const std::string& noise_path, const std::string& intr_path,
               const std::string& views_arg, std::uint64_t seed, const std::string& out_arg) {
  const TriMesh mesh = io::read_obj(tree_path);
  RowSpec row = read_config<RowSpec>(row_path);
  const NoiseSpec noise = read_config<NoiseSpec>(noise_path);
  const CameraIntrinsics intr = read_config<CameraIntrinsics>(intr_path);
  noise.validate();
  intr.validate();
  const auto views = parse_views(views_arg);
  require(views.first >= 1 && views.first <= views.second, "--views: need 1 <= LO <= HI");

  const Vec3 base = mesh_base(mesh);
  Scene scene;
  scene.add(ground_plane(base), kLabelGround);
  scene.add(mesh, kLabelTarget);
  const Vec3 along = row.row_direction.normalized();
  for (std::size_t k = 0; k < neighbors.size(); ++k) {
    const double side = (k % 2 == 0 ? -1.0 : 1.0) * static_cast<double>(k / 2 + 1);
    scene.add(transform(io::read_obj(neighbors[k]), Rigid::from(Mat3::Identity(), side * spacing * along)),
              kLabelTarget + 1 + static_cast<std::int32_t>(k));
  }

  Rng rng = Rng::stream(seed, "views");
  row.n_frames = views.first + static_cast<int>(rng.index(static_cast<std::uint64_t>(views.second - views.first + 1)));
  row.row_origin = base;
  const auto poses = plan_trajectory(row);

  const fs::path out = out_or_default(out_arg, "render");
  fs::create_directories(out);
  io::write_json(out / "trajectory.json", json(poses));
  for (std::size_t f = 0; f < poses.size(); ++f) {
    const RenderResult rr = render_scene(scene, intr, poses[f]);
    NoiseSpec ns = noise;
    ns.seed = mix64(noise.seed ^ seed) + f;
    FrameBundle frame;
    frame.intr = intr;
    frame.pose = poses[f];
    frame.depth = degrade_depth(rr.depth, ns);
    frame.mono = relative_inverse_depth(rr.depth);
    io::write_frame(out, frame_stem(f), frame, &rr.labels);
  }
  std::cout << poses.size() << " frames -> " << out.string() << "\n";
  return kExitOk;
}

int cmd_segment(const std::string& frames_dir, const std::string& cfg_path, double voxel, const std::string& out_arg) {
  const SegConfig base_cfg = read_config<SegConfig>(cfg_path);
  base_cfg.validate();
  const fs::path out = out_or_default(out_arg, "segment");
  const auto stems = io::list_frames(frames_dir);
  require(!stems.empty(), "no frames in '" + frames_dir + "'");
  PointCloud fused;
  json frames = json::array();
  int failures = 0;
  for (std::size_t f = 0; f < stems.size(); ++f) {
    const FrameBundle frame = io::read_frame(frames_dir, stems[f]);
    SegConfig cfg = base_cfg;
    cfg.seed = mix64(base_cfg.seed) + f;
    json row = {{"frame", stems[f]}};
    try {
      const SegmentResult seg = segment_tree(frame, cfg);
      io::write_mask(out, stems[f], seg.mask);
      fused.append(seg.cloud);
      row["status"] = "ok";
      row["stages"] = seg.mask.stage_counts();
      if (!seg.warning.empty()) row["warning"] = seg.warning;
    } catch (const EmptySegmentation& e) {
      ++failures;
      row["status"] = "error";
      row["error"] = e.what();
      row["stages"] = e.stage_counts();
    }
    frames.push_back(row);
  }
  if (voxel > 0 && !fused.empty()) fused = downsample(fused, voxel);
  if (!fused.empty()) io::write_ply(out / "fused.ply", fused);
  io::write_json(out / "segment.json", {{"frames", frames}, {"fused_points", fused.size()}});
  std::cout << stems.size() - failures << "/" << stems.size() << " frames segmented, " << fused.size()
            << " fused points\n";
  return failures == 0 ? kExitOk : kExitPartial;
}

int cmd_oracle(const std::string& trees_dir, const std::string& spec_path, const std::string& name,
               const std::string& out_arg) {
  const DegradeSpec spec = read_config<DegradeSpec>(spec_path);
  spec.validate();
  const fs::path out = out_or_default(out_arg, "oracle");
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(trees_dir)) {
    if (e.is_directory() && fs::exists(e.path() / "params.json")) dirs.push_back(e.path());
  }
  std::sort(dirs.begin(), dirs.end());
  require(!dirs.empty(), "no tree directories with params.json in '" + trees_dir + "'");
  fs::create_directories(out);
  json summary = json::array();
  int failures = 0;
  for (const auto& dir : dirs) {
    const std::string id = dir.filename().string();
    const TreeModel model = generate_tree(io::read_json(dir / "params.json").get<TreeParams>());
    try {
      const ReconResult r = oracle_backend(model, spec, name, id);
      io::write_ply(out / (id + ".ply"), r.cloud);
      summary.push_back({{"tree_id", id}, {"status", "ok"}, {"points", r.cloud.size()},
                         {"stripped_factor", r.stripped_factor}});
    } catch (const DegenerateDegradation& e) {
      ++failures;
      summary.push_back({{"tree_id", id}, {"status", "error"}, {"error", e.what()}});
    }
  }
  io::write_json(out / "meta.json", {{"unitless_scale", spec.strip_scale}});
  io::write_json(out / "oracle.json", {{"backend", name}, {"spec", spec}, {"trees", summary}});
  return failures == 0 ? kExitOk : kExitPartial;
}

int cmd_ingest(const std::string& backend_dir, std::size_t samples, std::uint64_t seed, const std::string& out_arg) {
  const fs::path dir(backend_dir);
  const fs::path out = out_or_default(out_arg, "ingest");
  bool unitless = false;
  if (fs::exists(dir / "meta.json")) {
    const json meta = io::read_json(dir / "meta.json");
    if (meta.contains("unitless_scale")) unitless = meta.at("unitless_scale").get<bool>();
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (e.is_regular_file() && (ext == ".ply" || ext == ".obj")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  require(!files.empty(), "no .ply or .obj files in '" + backend_dir + "'");
  fs::create_directories(out);
  json summary = json::array();
  int failures = 0;
  for (const auto& f : files) {
    const std::string id = f.stem().string();
    try {
      const ReconResult r = ingest_external(f, GeometryKind::kAuto, samples, seed);
      io::write_ply(out / (id + ".ply"), r.cloud);
      summary.push_back({{"tree_id", id}, {"status", "ok"}, {"points", r.cloud.size()}, {"mesh", r.mesh.has_value()}});
    } catch (const IngestionError& e) {
      ++failures;
      summary.push_back({{"tree_id", id}, {"status", "error"}, {"error", e.what()}, {"location", e.location()}});
    }
  }
  io::write_json(out / "meta.json", {{"unitless_scale", unitless}});
  io::write_json(out / "ingest.json", {{"backend", dir.filename().string()}, {"trees", summary}});
  return failures == 0 ? kExitOk : kExitPartial;
}

int cmd_scale(const std::string& ref, std::optional<double> h_ref, const std::string& rec_path,
              const std::string& out, const std::string& report) {
  require(!ref.empty() || h_ref, "scale: need --ref or --h-ref");
  const PointCloud rec = read_cloud(rec_path);
  const ScaledCloud sc = h_ref ? retrieve_scale(*h_ref, rec) : retrieve_scale(read_cloud(ref), rec);
  io::write_ply(out, sc.cloud);
  if (!report.empty()) io::write_json(report, sc.scale);
  std::cout << "s = " << sc.scale.s << "\n";
  return kExitOk;
}

int cmd_register(const std::string& src, const std::string& tgt, const std::string& params_path,
                 const std::vector<double>& box, const std::string& out, const std::string& report,
                 const std::string& aligned) {
  IcpParams params = read_config<IcpParams>(params_path);
  if (!box.empty()) {
    require(box.size() == 6, "--crop-box needs xmin ymin zmin xmax ymax zmax");
    Aabb b;
    b.min = Vec3(box[0], box[1], box[2]);
    b.max = Vec3(box[3], box[4], box[5]);
    require(!b.empty(), "--crop-box: min must not exceed max");
    params.crop = b;
  }
  params.validate();
  const PointCloud source = read_cloud(src);
  const IcpReport r = icp_align(source, read_cloud(tgt), params);
  io::write_json(out, r.transform);
  if (!report.empty()) io::write_json(report, r);
  if (!aligned.empty()) io::write_ply(aligned, apply_transform(source, r.transform));
  std::cout << "iterations " << r.iterations << (r.converged ? " converged" : " not converged") << ", rms "
            << (r.rms_history.empty() ? 0.0 : r.rms_history.back()) << "\n";
  return r.converged ? kExitOk : kExitPartial;
}

int cmd_metrics(const std::string& pred_dir, const std::string& gt_dir, double voxel, bool squared,
                const std::string& out_arg) {
  require(voxel > 0, "--voxel must be positive");
  const fs::path out = out_or_default(out_arg, "metrics");
  std::vector<fs::path> preds;
  for (const auto& e : fs::directory_iterator(pred_dir)) {
    if (e.is_regular_file() && e.path().extension() == ".ply") preds.push_back(e.path());
  }
  std::sort(preds.begin(), preds.end());
  require(!preds.empty(), "no .ply files in '" + pred_dir + "'");
  const std::string method = fs::path(pred_dir).filename().string();
  fs::create_directories(out);

  EvalReport report;
  report.provenance = {{"version", kVersion}, {"pred", pred_dir}, {"gt", gt_dir}, {"voxel", voxel}, {"squared", squared}};
  int failures = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    TreeRecord t;
    t.tree_id = preds[i].stem().string();
    t.index = static_cast<int>(i);
    MethodRecord m;
    m.method = method;
    m.traits.unavailable_reason = "not evaluated";
    try {
      const PointCloud pred = read_cloud(preds[i].string());
      const PointCloud gt = read_cloud((fs::path(gt_dir) / (t.tree_id + ".ply")).string());
      GeomMetrics g = geom_metrics(pred, gt, voxel);
      if (squared) g.chamfer_l2 = chamfer_l2(pred, gt, true);
      m.geom = g;
      m.points = pred.size();
      io::write_json(out / (t.tree_id + ".json"), g);
    } catch (const Error& e) {
      ++failures;
      m.status = "error";
      m.stage = "metrics";
      m.error = e.what();
      t.status = "error";
      t.stage = "metrics";
      t.error = e.what();
    }
    t.methods.push_back(m);
    report.trees.push_back(std::move(t));
  }
  report.aggregates = aggregate(report.trees);
  io::write_json(out / "report.json", report_to_json(report));
  const Tables tables = make_tables(report);
  io::write_text(out / "geometry.csv", tables.geometry_csv);
  io::write_text(out / "geometry.md", tables.geometry_md);
  std::cout << tables.geometry_md;
  return failures == 0 ? kExitOk : kExitPartial;
}

int cmd_traits(const std::string& cloud_path, const std::string& params_path, const std::string& out,
               const std::string& skeleton_out) {
  const QsmParams params = read_config<QsmParams>(params_path);
  params.validate();
  const PointCloud cloud = read_cloud(cloud_path);
  const TraitReport r = extract_traits(cloud, params);
  io::write_json(out, r);
  if (!skeleton_out.empty()) io::write_json(skeleton_out, extract_skeleton(cloud, params));
  if (!r.unavailable_reason.empty()) std::cout << "unavailable: " << r.unavailable_reason << "\n";
  return r.trunk_diameter && r.branch_count ? kExitOk : kExitPartial;
}

int cmd_run(const std::string& config_path, const std::string& out, int workers, std::optional<int> trees) {
  ExperimentConfig cfg = config_from_json(io::read_json(config_path));
  if (!out.empty()) cfg.output_dir = out;
  if (workers > 0) cfg.workers = workers;
  if (trees) cfg.trees = *trees;
  cfg.validate();
  StageTiming timing;
  const EvalReport report = run_pipeline(cfg, &timing);
  std::cout << make_tables(report).geometry_md;
  std::size_t failed = 0;
  for (const auto& t : report.trees) failed += t.status != "ok";
  std::cout << report.trees.size() - failed << "/" << report.trees.size() << " trees ok -> "
            << cfg.resolved_output_dir().string() << "\n";
  return report.has_failures() ? kExitPartial : kExitOk;
}

int cmd_tables(const std::string& report_path, const std::string& out_arg) {
  const EvalReport report = report_from_json(io::read_json(report_path));
  const fs::path out = out_or_default(out_arg, "tables");
  const Tables t = make_tables(report);
  write_tables(t, out);
  std::cout << t.geometry_md << "\n" << t.trunk_md << "\n" << t.branch_md;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic orchard tree reconstruction and trait evaluation"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  int code = kExitOk;

  auto* gen = app.add_subcommand("gen", "Generate trees with ground-truth traits");
  int gen_count = 1;
  std::uint64_t gen_seed = 0;
  std::string gen_out, gen_params;
  std::size_t gen_samples = kDefaultMeshSamples;
  gen->add_option("--count", gen_count, "Number of trees")->required();
  gen->add_option("--seed", gen_seed, "Dataset seed");
  gen->add_option("--out", gen_out, "Output directory");
  gen->add_option("--params", gen_params, "Parameter ranges JSON");
  gen->add_option("--samples", gen_samples, "Surface samples written to gt_sample.ply (0 skips)");
  gen->callback([&] { code = cmd_gen(gen_count, gen_seed, gen_out, gen_params, gen_samples); });

  auto* render = app.add_subcommand("render", "Render a row traversal of one tree");
  std::string r_tree, r_row, r_noise, r_intr, r_views = "15..30", r_out;
  std::vector<std::string> r_neighbors;
  double r_spacing = 2.5;
  std::uint64_t r_seed = 0;
  render->add_option("--tree", r_tree, "Tree mesh (OBJ)")->required();
  render->add_option("--neighbor", r_neighbors, "Neighbouring tree meshes, alternating sides");
  render->add_option("--spacing", r_spacing, "Neighbour spacing along the row (m)");
  render->add_option("--row", r_row, "Row spec JSON");
  render->add_option("--noise", r_noise, "Noise spec JSON");
  render->add_option("--intrinsics", r_intr, "Camera intrinsics JSON");
  render->add_option("--views", r_views, "View count N or range LO..HI");
  render->add_option("--seed", r_seed, "Seed for the view count and noise");
  render->add_option("--out", r_out, "Output frame directory");
  render->callback([&] {
    code = cmd_render(r_tree, r_neighbors, r_spacing, r_row, r_noise, r_intr, r_views, r_seed, r_out);
  });

  auto* segment = app.add_subcommand("segment", "Background removal on rendered frames");
  std::string s_frames, s_cfg, s_out;
  double s_voxel = 0.01;
  segment->add_option("--frames", s_frames, "Frame directory")->required();
  segment->add_option("--cfg", s_cfg, "Segmentation config JSON");
  segment->add_option("--voxel", s_voxel, "Voxel size for the fused cloud (0 keeps all points)");
  segment->add_option("--out", s_out, "Output directory");
  segment->callback([&] { code = cmd_segment(s_frames, s_cfg, s_voxel, s_out); });

  auto* oracle = app.add_subcommand("oracle", "Degraded reconstructions from generated trees");
  std::string o_trees, o_spec, o_name = "oracle", o_out;
  oracle->add_option("--trees", o_trees, "Directory produced by gen")->required();
  oracle->add_option("--spec", o_spec, "Degradation spec JSON");
  oracle->add_option("--name", o_name, "Backend name");
  oracle->add_option("--out", o_out, "Backend drop directory");
  oracle->callback([&] { code = cmd_oracle(o_trees, o_spec, o_name, o_out); });

  auto* ingest = app.add_subcommand("ingest", "Ingest external reconstructions");
  std::string i_backend, i_out;
  std::size_t i_samples = kDefaultMeshSamples;
  std::uint64_t i_seed = 0;
  ingest->add_option("--backend", i_backend, "Backend drop directory")->required();
  ingest->add_option("--samples", i_samples, "Samples per mesh");
  ingest->add_option("--seed", i_seed, "Mesh sampling seed");
  ingest->add_option("--out", i_out, "Output directory");
  ingest->callback([&] { code = cmd_ingest(i_backend, i_samples, i_seed, i_out); });

  auto* scale = app.add_subcommand("scale", "Height-ratio scale retrieval");
  std::string sc_ref, sc_rec, sc_out, sc_report;
  std::optional<double> sc_href;
  scale->add_option("--ref", sc_ref, "Metric reference cloud");
  scale->add_option("--h-ref", sc_href, "Reference height (m) instead of --ref");
  scale->add_option("--rec", sc_rec, "Reconstruction to scale")->required();
  scale->add_option("--out", sc_out, "Scaled cloud (PLY)")->required();
  scale->add_option("--report", sc_report, "Scale report JSON");
  scale->callback([&] { code = cmd_scale(sc_ref, sc_href, sc_rec, sc_out, sc_report); });

  auto* reg = app.add_subcommand("register", "Point-to-point ICP");
  std::string g_src, g_tgt, g_params, g_out, g_report, g_aligned;
  std::vector<double> g_box;
  reg->add_option("--src", g_src, "Source cloud")->required();
  reg->add_option("--tgt", g_tgt, "Target cloud")->required();
  reg->add_option("--params", g_params, "ICP parameters JSON");
  reg->add_option("--crop-box", g_box, "xmin ymin zmin xmax ymax zmax")->expected(6);
  reg->add_option("--out", g_out, "Transform JSON")->required();
  reg->add_option("--report", g_report, "ICP report JSON");
  reg->add_option("--aligned", g_aligned, "Aligned source cloud (PLY)");
  reg->callback([&] { code = cmd_register(g_src, g_tgt, g_params, g_box, g_out, g_report, g_aligned); });

  auto* metrics = app.add_subcommand("metrics", "Chamfer and JSD between matching clouds");
  std::string m_pred, m_gt, m_out;
  double m_voxel = 0.05;
  bool m_squared = false;
  metrics->add_option("--pred", m_pred, "Directory of predicted <tree_id>.ply")->required();
  metrics->add_option("--gt", m_gt, "Directory of ground-truth <tree_id>.ply")->required();
  metrics->add_option("--voxel", m_voxel, "JSD voxel size (m)");
  metrics->add_flag("--squared", m_squared, "Squared chamfer distances");
  metrics->add_option("--out", m_out, "Report directory");
  metrics->callback([&] { code = cmd_metrics(m_pred, m_gt, m_voxel, m_squared, m_out); });

  auto* traits = app.add_subcommand("traits", "Trunk diameter and branch count from a cloud");
  std::string t_cloud, t_params, t_out, t_skel;
  traits->add_option("--cloud", t_cloud, "Input cloud")->required();
  traits->add_option("--params", t_params, "QSM parameters JSON");
  traits->add_option("--out", t_out, "Trait report JSON")->required();
  traits->add_option("--skeleton", t_skel, "Skeleton JSON");
  traits->callback([&] { code = cmd_traits(t_cloud, t_params, t_out, t_skel); });

  auto* run = app.add_subcommand("run", "Full experiment");
  std::string u_config, u_out;
  int u_workers = 0;
  std::optional<int> u_trees;
  run->add_option("--config", u_config, "Experiment config JSON")->required();
  run->add_option("--out", u_out, "Output directory (overrides the config)");
  run->add_option("--workers", u_workers, "Worker threads");
  run->add_option("--trees", u_trees, "Tree count (overrides the config)");
  run->callback([&] { code = cmd_run(u_config, u_out, u_workers, u_trees); });

  auto* tables = app.add_subcommand("tables", "Tables from a report");
  std::string b_report, b_out;
  tables->add_option("--report", b_report, "report.json")->required();
  tables->add_option("--out", b_out, "Output directory");
  tables->callback([&] { code = cmd_tables(b_report, b_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  } catch (const InvalidInput& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IngestionError& e) {
    std::cerr << "error: " << e.what() << " (" << e.location() << ")\n";
    return kExitPartial;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPartial;
  }
  return code;
}
