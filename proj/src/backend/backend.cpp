#include "arbor/backend/backend.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "arbor/common/error.hpp"
#include "arbor/common/rng.hpp"
#include "arbor/io/files.hpp"
#include "arbor/io/obj.hpp"
#include "arbor/io/ply.hpp"
#include "arbor/scale/scale.hpp"

namespace arbor {

namespace {

std::string lower_ext(const std::filesystem::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e;
}

void check_finite(const std::vector<Vec3>& pts, const std::filesystem::path& path, const char* what) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!pts[i].allFinite()) {
      throw IngestionError(path.string() + ": " + what + " " + std::to_string(i) + " has a non-finite coordinate",
                           path.string() + ":" + what + "[" + std::to_string(i) + "]");
    }
  }
}

void check_faces(const TriMesh& mesh, const std::filesystem::path& path) {
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    for (auto v : mesh.triangles[i]) {
      if (v >= mesh.vertices.size()) {
        throw IngestionError(path.string() + ": face " + std::to_string(i) + " references a missing vertex",
                             path.string() + ":face[" + std::to_string(i) + "]");
      }
    }
  }
}

}  // namespace

ReconResult ingest_external(const std::filesystem::path& path, GeometryKind expected, std::size_t mesh_samples,
                            std::uint64_t seed) {
  require(mesh_samples > 0, "ingest: mesh sample count must be positive");
  if (!std::filesystem::exists(path)) throw IngestionError(path.string() + ": file not found", path.string());
  const std::string ext = lower_ext(path);
  ReconResult res;
  res.tree_id = path.stem().string();
  res.backend = path.parent_path().filename().string();

  TriMesh mesh;
  if (ext == ".obj") {
    mesh = io::read_obj(path);
  } else if (ext == ".ply") {
    io::PlyData ply = io::read_ply(path);
    if (!ply.triangles.empty()) {
      mesh.vertices = std::move(ply.cloud.points);
      mesh.triangles = std::move(ply.triangles);
    } else {
      res.cloud = std::move(ply.cloud);
    }
  } else {
    throw IngestionError(path.string() + ": unsupported extension '" + ext + "'", path.string());
  }

  const bool is_mesh = !mesh.triangles.empty() || (ext == ".obj");
  if (expected == GeometryKind::kCloud && is_mesh) {
    throw IngestionError(path.string() + ": expected a point cloud, found a mesh", path.string());
  }
  if (expected == GeometryKind::kMesh && !is_mesh) {
    throw IngestionError(path.string() + ": expected a mesh, found a point cloud", path.string());
  }
  if (is_mesh) {
    check_finite(mesh.vertices, path, "vertex");
    if (mesh.triangles.empty()) throw IngestionError(path.string() + ": mesh has no faces", path.string());
    check_faces(mesh, path);
    double area = 0.0;
    for (std::size_t i = 0; i < mesh.triangles.size(); ++i) area += mesh.triangle_area(i);
    if (!(area > 0)) throw IngestionError(path.string() + ": mesh has zero surface area", path.string());
    res.cloud = sample_surface(mesh, mesh_samples, seed);
    res.mesh = std::move(mesh);
  } else {
    if (res.cloud.empty()) throw IngestionError(path.string() + ": point cloud is empty", path.string());
    check_finite(res.cloud.points, path, "vertex");
  }
  return res;
}

std::vector<ReconResult> ingest_directory(const std::filesystem::path& dir, std::size_t mesh_samples,
                                          std::uint64_t seed) {
  if (!std::filesystem::is_directory(dir)) throw IngestionError(dir.string() + ": not a directory", dir.string());
  bool unitless = false;
  const auto meta = dir / "meta.json";
  if (std::filesystem::exists(meta)) {
    const auto j = io::read_json(meta);
    if (j.contains("unitless_scale")) {
      if (!j["unitless_scale"].is_boolean()) {
        throw IngestionError(meta.string() + ": unitless_scale must be a boolean", meta.string() + ":unitless_scale");
      }
      unitless = j["unitless_scale"].get<bool>();
    }
  }
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    const std::string ext = lower_ext(e.path());
    if (e.is_regular_file() && (ext == ".ply" || ext == ".obj")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<ReconResult> out;
  for (const auto& f : files) {
    ReconResult r = ingest_external(f, GeometryKind::kAuto, mesh_samples, seed);
    r.backend = dir.filename().string();
    r.unitless_scale = unitless;
    out.push_back(std::move(r));
  }
  return out;
}

void DegradeSpec::validate() const {
  require(subsample_fraction > 0 && subsample_fraction <= 1, "degrade spec: subsample_fraction must be in (0, 1]");
  require(noise_sigma >= 0 && std::isfinite(noise_sigma), "degrade spec: noise_sigma must be >= 0");
  require(samples > 0, "degrade spec: samples must be positive");
  for (const auto& c : occlusion) {
    if (c.kind == Crop::Kind::kHalfSpace) {
      require(c.half_space.normal.allFinite() && c.half_space.normal.norm() > 0 && std::isfinite(c.half_space.offset),
              "degrade spec: half-space crop needs a non-zero normal and finite offset");
    } else {
      require(std::isfinite(c.sector.start_deg) && std::isfinite(c.sector.end_deg) &&
                  c.sector.start_deg <= c.sector.end_deg,
              "degrade spec: sector crop needs start_deg <= end_deg");
    }
  }
}

ReconResult oracle_backend(const TreeModel& model, const DegradeSpec& spec, const std::string& name,
                           const std::string& tree_id) {
  spec.validate();
  const std::uint64_t seed = mix64(spec.seed) ^ model.params.seed;
  PointCloud cloud = sample_surface(model.mesh, spec.samples, mix64(seed ^ hash_name("oracle-sample")));

  if (!spec.occlusion.empty()) {
    const Vec3 base = base_center(cloud.points);
    PointCloud kept;
    for (const Vec3& p : cloud.points) {
      bool removed = false;
      for (const auto& c : spec.occlusion) {
        if (c.kind == Crop::Kind::kHalfSpace) {
          removed = removed || c.half_space.normal.normalized().dot(p) > c.half_space.offset;
        } else {
          double az = std::atan2(p.y() - base.y(), p.x() - base.x()) * 180.0 / std::numbers::pi;
          const double lo = c.sector.start_deg;
          az = lo + std::fmod(std::fmod(az - lo, 360.0) + 360.0, 360.0);
          removed = removed || (az >= lo && az < c.sector.end_deg);
        }
      }
      if (!removed) kept.points.push_back(p);
    }
    cloud = std::move(kept);
  }
  if (cloud.empty()) throw DegenerateDegradation("oracle: occlusion crops removed every point");

  if (spec.noise_sigma > 0) {
    const std::uint64_t noise_seed = mix64(seed ^ hash_name("oracle-noise"));
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      for (int a = 0; a < 3; ++a) cloud.points[i][a] += spec.noise_sigma * hash_normal(noise_seed, 3 * i + a);
    }
  }

  if (spec.subsample_fraction < 1.0) {
    const auto n = cloud.size();
    const auto m = static_cast<std::size_t>(std::llround(spec.subsample_fraction * static_cast<double>(n)));
    if (m == 0) throw DegenerateDegradation("oracle: subsampling left no points");
    Rng rng = Rng::stream(seed, "oracle-subsample");
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < m; ++i) std::swap(idx[i], idx[i + rng.index(n - i)]);
    idx.resize(m);
    std::sort(idx.begin(), idx.end());
    PointCloud sub;
    sub.points.reserve(m);
    for (auto i : idx) sub.points.push_back(cloud.points[i]);
    cloud = std::move(sub);
  }

  ReconResult res;
  res.backend = name;
  res.tree_id = tree_id;
  if (spec.strip_scale) {
    Rng rng = Rng::stream(seed, "oracle-scale");
    res.stripped_factor = std::exp(rng.uniform(std::log(0.2), std::log(5.0)));
    res.unitless_scale = true;
    cloud = apply_scale(cloud, res.stripped_factor);
  }
  res.cloud = std::move(cloud);
  return res;
}

}  // namespace arbor
