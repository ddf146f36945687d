#include "arbor/io/frames.hpp"

#include <algorithm>
#include <string_view>

#include "arbor/common/error.hpp"
#include "arbor/io/files.hpp"
#include "arbor/io/png.hpp"
#include "arbor/io/serialize.hpp"

namespace arbor::io {

void write_frame(const std::filesystem::path& dir, const std::string& stem, const FrameBundle& frame,
                 const std::vector<std::int32_t>* labels) {
  std::filesystem::create_directories(dir);
  write_json(dir / "intrinsics.json", frame.intr);
  write_json(dir / (stem + ".pose.json"), frame.pose);
  write_png16(dir / (stem + ".depth.png"), encode_depth_mm(frame.depth));
  write_png16(dir / (stem + ".mono.png"), encode_unit16(frame.mono));
  if (labels) {
    Gray8 img{frame.depth.width, frame.depth.height, std::vector<std::uint8_t>(labels->size())};
    for (std::size_t i = 0; i < labels->size(); ++i) {
      img.pixels[i] = static_cast<std::uint8_t>(std::clamp((*labels)[i] + 1, 0, 255));
    }
    write_png8(dir / (stem + ".labels.png"), img);
  }
}

FrameBundle read_frame(const std::filesystem::path& dir, const std::string& stem) {
  FrameBundle f;
  f.intr = read_json(dir / "intrinsics.json").get<CameraIntrinsics>();
  f.pose = read_json(dir / (stem + ".pose.json")).get<Rigid>();
  f.depth = decode_depth_mm(read_png16(dir / (stem + ".depth.png")));
  f.mono = decode_unit16(read_png16(dir / (stem + ".mono.png")));
  f.validate();
  return f;
}

std::vector<std::int32_t> read_labels(const std::filesystem::path& dir, const std::string& stem) {
  const auto path = dir / (stem + ".labels.png");
  if (!std::filesystem::exists(path)) return {};
  const Gray8 img = read_png8(path);
  std::vector<std::int32_t> out(img.pixels.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<std::int32_t>(img.pixels[i]) - 1;
  return out;
}

std::vector<std::string> list_frames(const std::filesystem::path& dir) {
  require(std::filesystem::is_directory(dir), "frames: '" + dir.string() + "' is not a directory");
  std::vector<std::string> stems;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    const auto& p = e.path();
    const std::string name = p.filename().string();
    constexpr std::string_view suffix = ".pose.json";
    if (name.size() <= suffix.size() || !name.ends_with(suffix)) continue;
    const std::string stem = name.substr(0, name.size() - suffix.size());
    if (std::filesystem::exists(dir / (stem + ".depth.png"))) stems.push_back(stem);
  }
  std::sort(stems.begin(), stems.end());
  return stems;
}

void write_mask(const std::filesystem::path& dir, const std::string& stem, const SegMask& mask) {
  std::filesystem::create_directories(dir);
  Gray8 keep{mask.width, mask.height, std::vector<std::uint8_t>(mask.keep.size())};
  Gray8 prov{mask.width, mask.height, std::vector<std::uint8_t>(mask.keep.size())};
  for (std::size_t i = 0; i < mask.keep.size(); ++i) {
    keep.pixels[i] = mask.keep[i] ? 255 : 0;
    prov.pixels[i] = static_cast<std::uint8_t>(mask.provenance[i]);
  }
  write_png8(dir / (stem + ".mask.png"), keep);
  const Palette palette{{40, 160, 40}, {90, 90, 90}, {120, 170, 240}, {150, 110, 60}, {220, 60, 60}};
  write_png_palette(dir / (stem + ".provenance.png"), prov, palette);
  write_json(dir / (stem + ".stages.json"), mask.stage_counts());
}

}  // namespace arbor::io
