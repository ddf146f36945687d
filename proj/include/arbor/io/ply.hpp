#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "arbor/geom/types.hpp"

namespace arbor::io {

struct PlyData {
  PointCloud cloud;
  /// Faces, fan-triangulated, when the file carries a face element.
  std::vector<std::array<std::uint32_t, 3>> triangles;
};

/// Reads ascii, binary_little_endian or binary_big_endian PLY. Coordinates are
/// returned as stored (no finiteness check); throws IngestionError on malformed
/// files with the failing location.
PlyData read_ply(const std::filesystem::path& path);

/// Binary little-endian PLY: x, y, z as float32 and, when present, red, green,
/// blue as uint8.
void write_ply(const std::filesystem::path& path, const PointCloud& cloud);

}  // namespace arbor::io
