#pragma once

#include <filesystem>

#include "arbor/geom/types.hpp"

namespace arbor::io {

/// Wavefront OBJ, `v` and `f` records only. Polygons are fan-triangulated;
/// negative (relative) indices and `v/vt/vn` forms are accepted.
TriMesh read_obj(const std::filesystem::path& path);
void write_obj(const std::filesystem::path& path, const TriMesh& mesh);

}  // namespace arbor::io
