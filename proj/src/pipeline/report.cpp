#include <cstdio>
#include <sstream>

#include "arbor/common/error.hpp"
#include "arbor/io/files.hpp"
#include "arbor/io/serialize.hpp"
#include "arbor/pipeline/pipeline.hpp"

namespace arbor {

namespace {

json method_json(const MethodRecord& m) {
  json j = {{"method", m.method},
            {"status", m.status},
            {"stage", m.stage},
            {"error", m.error},
            {"geom", m.geom ? json(*m.geom) : json(nullptr)},
            {"traits", m.traits},
            {"scale", m.scale ? json(*m.scale) : json(nullptr)},
            {"icp", {{"iterations", m.icp_iterations}, {"converged", m.icp_converged}, {"final_rms", m.icp_final_rms}}},
            {"points", m.points}};
  return j;
}

MethodRecord method_from(const json& j) {
  MethodRecord m;
  m.method = j.at("method").get<std::string>();
  m.status = j.value("status", std::string("ok"));
  m.stage = j.value("stage", std::string());
  m.error = j.value("error", std::string());
  if (j.contains("geom") && !j["geom"].is_null()) {
    const auto& g = j["geom"];
    GeomMetrics gm;
    gm.chamfer_l2 = g.at("chamfer_l2").get<double>();
    gm.jsd = g.at("jsd").get<double>();
    gm.n_source = g.value("n_source", std::size_t{0});
    gm.n_target = g.value("n_target", std::size_t{0});
    gm.voxel_size = g.value("voxel_size", 0.05);
    m.geom = gm;
  }
  if (j.contains("traits")) m.traits = j["traits"].get<TraitReport>();
  if (j.contains("scale") && !j["scale"].is_null()) {
    const auto& s = j["scale"];
    m.scale = ScaleResult{s.at("s").get<double>(), s.at("h_ref").get<double>(), s.at("h_rec").get<double>()};
  }
  if (j.contains("icp")) {
    m.icp_iterations = j["icp"].value("iterations", 0);
    m.icp_converged = j["icp"].value("converged", false);
    m.icp_final_rms = j["icp"].value("final_rms", 0.0);
  }
  m.points = j.value("points", std::size_t{0});
  return m;
}

json aggregate_json(const MethodAggregate& a) {
  return {{"method", a.method},
          {"trees", a.trees},
          {"errors", a.errors},
          {"geom_n", a.geom_n},
          {"cd_mean", a.cd_mean},
          {"cd_std", a.cd_std},
          {"jsd_mean", a.jsd_mean},
          {"jsd_std", a.jsd_std},
          {"trunk_diameter_cm", a.trunk ? json(*a.trunk) : json(nullptr)},
          {"branch_count", a.branch ? json(*a.branch) : json(nullptr)},
          {"trunk_unavailable", a.trunk_unavailable},
          {"branch_unavailable", a.branch_unavailable}};
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << "\n";
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
      os << "\n";
    }
    return os.str();
  }

  std::string markdown() const {
    std::ostringstream os;
    os << "|";
    for (const auto& h : header) os << " " << h << " |";
    os << "\n|";
    for (std::size_t i = 0; i < header.size(); ++i) os << (i == 0 ? " --- |" : " ---: |");
    os << "\n";
    for (const auto& r : rows) {
      os << "|";
      for (const auto& c : r) os << " " << c << " |";
      os << "\n";
    }
    return os.str();
  }
};

Table trait_table(const std::vector<MethodAggregate>& aggs, bool trunk) {
  Table t;
  t.header = {"method", "n", "mae_mean", "mae_std", "mae_p75", "mape_mean", "mape_std", "mape_p75"};
  for (const auto& a : aggs) {
    const auto& s = trunk ? a.trunk : a.branch;
    if (!s) {
      t.rows.push_back({a.method, "0", "--", "--", "--", "--", "--", "--"});
      continue;
    }
    t.rows.push_back({a.method, std::to_string(s->n), num(s->mae_mean), num(s->mae_std), num(s->mae_p75),
                      num(s->mape_mean), num(s->mape_std), num(s->mape_p75)});
  }
  return t;
}

}  // namespace

json report_to_json(const EvalReport& r) {
  json trees = json::array();
  for (const auto& t : r.trees) {
    json methods = json::array();
    for (const auto& m : t.methods) methods.push_back(method_json(m));
    trees.push_back({{"tree_id", t.tree_id},
                     {"index", t.index},
                     {"status", t.status},
                     {"stage", t.stage},
                     {"error", t.error},
                     {"params", t.params},
                     {"ground_truth", t.ground_truth},
                     {"views", t.views},
                     {"fused_points", t.fused_points},
                     {"h_ref", t.h_ref},
                     {"seg_iou_mean", t.seg_iou_mean},
                     {"warnings", t.warnings},
                     {"methods", methods}});
  }
  json aggs = json::array();
  for (const auto& a : r.aggregates) aggs.push_back(aggregate_json(a));
  json j = {{"provenance", r.provenance}, {"trees", trees}, {"aggregates", aggs}, {"throughput", nullptr}};
  if (r.throughput_input && r.throughput_ratio) {
    const auto& t = *r.throughput_input;
    j["throughput"] = {{"reference_seconds", t.reference_seconds},
                       {"reference_trees", t.reference_trees},
                       {"robot_seconds", t.robot_seconds},
                       {"robot_trees", t.robot_trees},
                       {"ratio", *r.throughput_ratio}};
  }
  return j;
}

EvalReport report_from_json(const json& j) {
  require(j.is_object() && j.contains("trees") && j["trees"].is_array(), "report: missing trees array");
  EvalReport r;
  r.provenance = j.value("provenance", json::object());
  for (const auto& tj : j["trees"]) {
    TreeRecord t;
    t.tree_id = tj.at("tree_id").get<std::string>();
    t.index = tj.value("index", 0);
    t.status = tj.value("status", std::string("ok"));
    t.stage = tj.value("stage", std::string());
    t.error = tj.value("error", std::string());
    if (tj.contains("params")) t.params = tj["params"].get<TreeParams>();
    if (tj.contains("ground_truth")) t.ground_truth = tj["ground_truth"].get<TraitReport>();
    t.views = tj.value("views", 0);
    t.fused_points = tj.value("fused_points", std::size_t{0});
    t.h_ref = tj.value("h_ref", 0.0);
    t.seg_iou_mean = tj.value("seg_iou_mean", 0.0);
    t.warnings = tj.value("warnings", std::vector<std::string>{});
    for (const auto& mj : tj.value("methods", json::array())) t.methods.push_back(method_from(mj));
    r.trees.push_back(std::move(t));
  }
  r.aggregates = aggregate(r.trees);
  if (j.contains("throughput") && !j["throughput"].is_null()) {
    const auto& t = j["throughput"];
    ThroughputInput in{t.at("reference_seconds").get<double>(), t.at("reference_trees").get<int>(),
                       t.at("robot_seconds").get<double>(), t.at("robot_trees").get<int>()};
    r.throughput_input = in;
    r.throughput_ratio = throughput_ratio(in);
  }
  return r;
}

Tables make_tables(const EvalReport& report) {
  require(!report.trees.empty(), "make_tables: report has no trees");
  const auto aggs = report.aggregates.empty() ? aggregate(report.trees) : report.aggregates;
  Table geo;
  geo.header = {"method", "n", "cd_mean", "cd_std", "jsd_mean", "jsd_std"};
  for (const auto& a : aggs) {
    if (a.geom_n == 0) {
      geo.rows.push_back({a.method, "0", "--", "--", "--", "--"});
    } else {
      geo.rows.push_back(
          {a.method, std::to_string(a.geom_n), num(a.cd_mean), num(a.cd_std), num(a.jsd_mean), num(a.jsd_std)});
    }
  }
  const Table trunk = trait_table(aggs, true);
  const Table branch = trait_table(aggs, false);
  return {geo.csv(), geo.markdown(), trunk.csv(), trunk.markdown(), branch.csv(), branch.markdown()};
}

void write_tables(const Tables& t, const std::filesystem::path& dir) {
  io::write_text(dir / "geometry.csv", t.geometry_csv);
  io::write_text(dir / "geometry.md", t.geometry_md);
  io::write_text(dir / "trunk_diameter.csv", t.trunk_csv);
  io::write_text(dir / "trunk_diameter.md", t.trunk_md);
  io::write_text(dir / "branch_count.csv", t.branch_csv);
  io::write_text(dir / "branch_count.md", t.branch_md);
}

}  // namespace arbor
