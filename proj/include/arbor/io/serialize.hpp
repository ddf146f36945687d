#pragma once

#include <json.hpp>

#include "arbor/backend/backend.hpp"
#include "arbor/geom/skeleton.hpp"
#include "arbor/geom/types.hpp"
#include "arbor/metrics/metrics.hpp"
#include "arbor/qsm/qsm.hpp"
#include "arbor/qsm/trait_report.hpp"
#include "arbor/reg/icp.hpp"
#include "arbor/scale/scale.hpp"
#include "arbor/seg/background.hpp"
#include "arbor/sim/degrade.hpp"
#include "arbor/sim/trajectory.hpp"
#include "arbor/tree/tree_gen.hpp"

namespace nlohmann {

template <>
struct adl_serializer<arbor::Vec3> {
  static void to_json(json& j, const arbor::Vec3& v);
  static void from_json(const json& j, arbor::Vec3& v);
};

/// Row-major nested arrays.
template <>
struct adl_serializer<arbor::Mat3> {
  static void to_json(json& j, const arbor::Mat3& m);
  static void from_json(const json& j, arbor::Mat3& m);
};

}  // namespace nlohmann

namespace arbor {

using nlohmann::json;

// Readers accept partial objects (missing keys keep their defaults) and
// reject unknown keys with InvalidInput.

void to_json(json& j, const CameraIntrinsics& v);
void from_json(const json& j, CameraIntrinsics& v);
void to_json(json& j, const Rigid& v);
void from_json(const json& j, Rigid& v);
void to_json(json& j, const Aabb& v);
void from_json(const json& j, Aabb& v);
void to_json(json& j, const SkeletonGraph& v);
void from_json(const json& j, SkeletonGraph& v);
void to_json(json& j, const TraitReport& v);
void from_json(const json& j, TraitReport& v);
void to_json(json& j, const TreeParams& v);
void from_json(const json& j, TreeParams& v);
void to_json(json& j, const TreeParamRanges& v);
void from_json(const json& j, TreeParamRanges& v);
void to_json(json& j, const RowSpec& v);
void from_json(const json& j, RowSpec& v);
void to_json(json& j, const NoiseSpec& v);
void from_json(const json& j, NoiseSpec& v);
void to_json(json& j, const SegConfig& v);
void from_json(const json& j, SegConfig& v);
void to_json(json& j, const QsmParams& v);
void from_json(const json& j, QsmParams& v);
void to_json(json& j, const Crop& v);
void from_json(const json& j, Crop& v);
void to_json(json& j, const DegradeSpec& v);
void from_json(const json& j, DegradeSpec& v);
void to_json(json& j, const IcpParams& v);
void from_json(const json& j, IcpParams& v);
void to_json(json& j, const IcpReport& v);
void to_json(json& j, const GeomMetrics& v);
void to_json(json& j, const ErrorStats& v);
void to_json(json& j, const ScaleResult& v);

/// Throws InvalidInput naming the first key of `j` not in `allowed`.
void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* context);

}  // namespace arbor
