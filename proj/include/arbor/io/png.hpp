#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "arbor/geom/types.hpp"

namespace arbor::io {

struct Gray16 {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> pixels;
};

struct Gray8 {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};

using Palette = std::vector<std::array<std::uint8_t, 3>>;

void write_png16(const std::filesystem::path& path, const Gray16& image);
void write_png8(const std::filesystem::path& path, const Gray8& image);
/// 8-bit indexed-color PNG.
void write_png_palette(const std::filesystem::path& path, const Gray8& indices,
                       const Palette& palette);

/// Reads 8- or 16-bit grayscale (or palette indices). 8-bit data is widened.
Gray16 read_png16(const std::filesystem::path& path);
Gray8 read_png8(const std::filesystem::path& path);

/// Depth in millimetres, 0 = invalid. Depths beyond 65.535 m are stored invalid.
Gray16 encode_depth_mm(const DepthMap& depth);
DepthMap decode_depth_mm(const Gray16& image);

/// Unit-range relative depth quantized to 16 bits (0 stays 0).
Gray16 encode_unit16(const DepthMap& values);
DepthMap decode_unit16(const Gray16& image);

}  // namespace arbor::io
