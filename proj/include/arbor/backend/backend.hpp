#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "arbor/geom/types.hpp"
#include "arbor/tree/tree_gen.hpp"

namespace arbor {

enum class GeometryKind { kAuto, kCloud, kMesh };

struct ReconResult {
  std::string backend;
  std::string tree_id;
  PointCloud cloud;
  std::optional<TriMesh> mesh;
  /// True when the geometry has no metric scale and needs scale retrieval.
  bool unitless_scale = false;
  /// Factor the oracle multiplied into a scale-stripped output (1 otherwise).
  double stripped_factor = 1.0;
};

inline constexpr std::size_t kDefaultMeshSamples = 100000;

/// Reads a PLY (cloud or mesh) or OBJ (mesh). Meshes are surface-sampled to
/// `mesh_samples` points. Throws IngestionError with a location on parse
/// failures, empty geometry or non-finite coordinates.
ReconResult ingest_external(const std::filesystem::path& path, GeometryKind expected = GeometryKind::kAuto,
                            std::size_t mesh_samples = kDefaultMeshSamples, std::uint64_t seed = 0);

/// Every `<tree_id>.{ply,obj}` in `dir`, sorted by file name. The backend name
/// is the directory name; an optional meta.json may set {"unitless_scale": bool}.
std::vector<ReconResult> ingest_directory(const std::filesystem::path& dir,
                                          std::size_t mesh_samples = kDefaultMeshSamples, std::uint64_t seed = 0);

/// Removes points on the positive side: normal . p > offset.
struct HalfSpaceCrop {
  Vec3 normal = Vec3::UnitX();
  double offset = 0.0;
};

/// Removes points whose azimuth about the vertical axis through the cloud's
/// base centroid lies in [start_deg, end_deg) (degrees, counter-clockwise from +x).
struct SectorCrop {
  double start_deg = 0.0;
  double end_deg = 180.0;
};

struct Crop {
  enum class Kind { kHalfSpace, kSector } kind = Kind::kHalfSpace;
  HalfSpaceCrop half_space;
  SectorCrop sector;
};

struct DegradeSpec {
  double subsample_fraction = 1.0;
  double noise_sigma = 0.0;  // m
  std::vector<Crop> occlusion;
  bool strip_scale = false;
  std::size_t samples = kDefaultMeshSamples;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Sample the model mesh, crop, jitter, subsample and optionally strip scale.
/// Deterministic in (model, spec). Throws DegenerateDegradation when nothing
/// survives.
ReconResult oracle_backend(const TreeModel& model, const DegradeSpec& spec, const std::string& name = "oracle",
                           const std::string& tree_id = "");

}  // namespace arbor
