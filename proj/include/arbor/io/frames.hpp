#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "arbor/seg/background.hpp"

namespace arbor::io {

/// A frame on disk is `<stem>.pose.json` plus `<stem>.depth.png` (uint16 mm,
/// 0 invalid) and `<stem>.mono.png` (relative inverse depth scaled to 65535),
/// and optionally `<stem>.labels.png` (render label + 1, 0 background).
/// Intrinsics are shared by the directory in `intrinsics.json`.
void write_frame(const std::filesystem::path& dir, const std::string& stem, const FrameBundle& frame,
                 const std::vector<std::int32_t>* labels = nullptr);
FrameBundle read_frame(const std::filesystem::path& dir, const std::string& stem);
/// Render labels if `<stem>.labels.png` exists, otherwise empty.
std::vector<std::int32_t> read_labels(const std::filesystem::path& dir, const std::string& stem);
/// Stems of every `<stem>.pose.json` with a depth image, sorted.
std::vector<std::string> list_frames(const std::filesystem::path& dir);

/// `<stem>.mask.png` (255 keep), `<stem>.provenance.png` (palette by stage)
/// and `<stem>.stages.json` with per-stage pixel counts.
void write_mask(const std::filesystem::path& dir, const std::string& stem, const SegMask& mask);

}  // namespace arbor::io
