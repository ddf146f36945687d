#include "arbor/io/png.hpp"

#include <png.h>

#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>

#include "arbor/common/error.hpp"

namespace arbor::io {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

constexpr int kCompression = 3;

// libpng reports errors through longjmp; the jmp_buf scope below holds only
// trivially destructible state.
bool write_rows(std::FILE* fp, int width, int height, int bit_depth, int color_type,
                const Palette* palette, const std::uint8_t* data, std::size_t row_bytes) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, fp);
  png_set_compression_level(png, kCompression);
  png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_color colors[256];
  if (palette) {
    for (std::size_t i = 0; i < palette->size() && i < 256; ++i) {
      colors[i].red = (*palette)[i][0];
      colors[i].green = (*palette)[i][1];
      colors[i].blue = (*palette)[i][2];
    }
    png_set_PLTE(png, info, colors, static_cast<int>(std::min<std::size_t>(palette->size(), 256)));
  }
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);  // host little-endian -> PNG big-endian
  for (int y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(data + static_cast<std::size_t>(y) * row_bytes));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

FilePtr open_for_write(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.string().c_str(), "wb"));
  if (!fp) throw Error("png: cannot write " + path.string());
  return fp;
}

struct Decoded {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  std::vector<std::uint8_t> bytes;
};

bool read_rows(std::FILE* fp, Decoded& out) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_init_io(png, fp);
  png_read_info(png, info);
  const int color_type = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color_type == PNG_COLOR_TYPE_RGB || color_type == PNG_COLOR_TYPE_RGB_ALPHA) {
    png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  }
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (depth == 16) png_set_swap(png);
  png_read_update_info(png, info);
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.bit_depth = png_get_bit_depth(png, info);
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  out.bytes.resize(row_bytes * out.height);
  for (int y = 0; y < out.height; ++y) png_read_row(png, out.bytes.data() + row_bytes * y, nullptr);
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

Decoded decode(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.string().c_str(), "rb"));
  if (!fp) throw Error("png: cannot open " + path.string());
  Decoded d;
  if (!read_rows(fp.get(), d)) throw Error("png: decode failed for " + path.string());
  return d;
}

}  // namespace

void write_png16(const std::filesystem::path& path, const Gray16& image) {
  require(image.pixels.size() == static_cast<std::size_t>(image.width) * image.height,
          "png: pixel buffer size mismatch");
  auto fp = open_for_write(path);
  if (!write_rows(fp.get(), image.width, image.height, 16, PNG_COLOR_TYPE_GRAY, nullptr,
                  reinterpret_cast<const std::uint8_t*>(image.pixels.data()),
                  static_cast<std::size_t>(image.width) * 2)) {
    throw Error("png: encode failed for " + path.string());
  }
}

void write_png8(const std::filesystem::path& path, const Gray8& image) {
  require(image.pixels.size() == static_cast<std::size_t>(image.width) * image.height,
          "png: pixel buffer size mismatch");
  auto fp = open_for_write(path);
  if (!write_rows(fp.get(), image.width, image.height, 8, PNG_COLOR_TYPE_GRAY, nullptr,
                  image.pixels.data(), static_cast<std::size_t>(image.width))) {
    throw Error("png: encode failed for " + path.string());
  }
}

void write_png_palette(const std::filesystem::path& path, const Gray8& indices, const Palette& palette) {
  require(!palette.empty() && palette.size() <= 256, "png: palette must hold 1..256 colors");
  auto fp = open_for_write(path);
  if (!write_rows(fp.get(), indices.width, indices.height, 8, PNG_COLOR_TYPE_PALETTE, &palette,
                  indices.pixels.data(), static_cast<std::size_t>(indices.width))) {
    throw Error("png: encode failed for " + path.string());
  }
}

Gray16 read_png16(const std::filesystem::path& path) {
  const Decoded d = decode(path);
  Gray16 img{d.width, d.height, {}};
  img.pixels.resize(static_cast<std::size_t>(d.width) * d.height);
  if (d.bit_depth == 16) {
    std::memcpy(img.pixels.data(), d.bytes.data(), img.pixels.size() * 2);
  } else {
    for (std::size_t i = 0; i < img.pixels.size(); ++i) img.pixels[i] = d.bytes[i];
  }
  return img;
}

Gray8 read_png8(const std::filesystem::path& path) {
  const Decoded d = decode(path);
  require(d.bit_depth == 8, "png: expected an 8-bit image in " + path.string());
  return {d.width, d.height, d.bytes};
}

Gray16 encode_depth_mm(const DepthMap& depth) {
  Gray16 img{depth.width, depth.height, std::vector<std::uint16_t>(depth.size(), 0)};
  for (std::size_t i = 0; i < depth.size(); ++i) {
    const double d = depth.depth[i];
    if (!std::isfinite(d) || d <= 0) continue;
    const double mm = std::round(d * 1000.0);
    if (mm >= 1.0 && mm <= 65535.0) img.pixels[i] = static_cast<std::uint16_t>(mm);
  }
  return img;
}

DepthMap decode_depth_mm(const Gray16& image) {
  DepthMap d(image.width, image.height);
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (image.pixels[i] != 0) d.depth[i] = image.pixels[i] / 1000.0;
  }
  return d;
}

Gray16 encode_unit16(const DepthMap& values) {
  Gray16 img{values.width, values.height, std::vector<std::uint16_t>(values.size(), 0)};
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values.depth[i];
    if (!std::isfinite(v) || v <= 0) continue;
    img.pixels[i] = static_cast<std::uint16_t>(std::lround(std::min(v, 1.0) * 65535.0));
  }
  return img;
}

DepthMap decode_unit16(const Gray16& image) {
  DepthMap d(image.width, image.height, 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) d.depth[i] = image.pixels[i] / 65535.0;
  return d;
}

}  // namespace arbor::io
