#include "arbor/io/ply.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "arbor/common/error.hpp"

namespace arbor::io {

namespace {

enum class Format { kAscii, kLittle, kBig };

enum class Type { kI8, kU8, kI16, kU16, kI32, kU32, kF32, kF64 };

struct Property {
  std::string name;
  Type type = Type::kF32;
  bool is_list = false;
  Type count_type = Type::kU8;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;
};

Type parse_type(const std::string& s, const std::string& where) {
  if (s == "char" || s == "int8") return Type::kI8;
  if (s == "uchar" || s == "uint8") return Type::kU8;
  if (s == "short" || s == "int16") return Type::kI16;
  if (s == "ushort" || s == "uint16") return Type::kU16;
  if (s == "int" || s == "int32") return Type::kI32;
  if (s == "uint" || s == "uint32") return Type::kU32;
  if (s == "float" || s == "float32") return Type::kF32;
  if (s == "double" || s == "float64") return Type::kF64;
  throw IngestionError("ply: unknown property type '" + s + "'", where);
}

std::size_t type_size(Type t) {
  switch (t) {
    case Type::kI8:
    case Type::kU8: return 1;
    case Type::kI16:
    case Type::kU16: return 2;
    case Type::kI32:
    case Type::kU32:
    case Type::kF32: return 4;
    case Type::kF64: return 8;
  }
  return 0;
}

template <typename T>
T load(const unsigned char* bytes, bool swap) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, bytes, sizeof(T));
  if (swap) std::reverse(buf, buf + sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

class Reader {
 public:
  Reader(std::istream& in, Format fmt, std::string path) : in_(in), fmt_(fmt), path_(std::move(path)) {}

  double read(Type t, const std::string& where) {
    if (fmt_ == Format::kAscii) {
      std::string token;
      if (!(line_ >> token)) throw IngestionError("ply: truncated record", where);
      try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
      } catch (const std::out_of_range&) {
        return token[0] == '-' ? -HUGE_VAL : HUGE_VAL;
      } catch (const std::exception&) {
        // std::stod accepts "nan"/"inf"; anything else is malformed.
        throw IngestionError("ply: unparsable value '" + token + "'", where);
      }
    }
    unsigned char buf[8];
    const auto n = type_size(t);
    if (!in_.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(n))) {
      throw IngestionError("ply: unexpected end of binary data", where);
    }
    const bool swap = (fmt_ == Format::kBig) == (std::endian::native == std::endian::little);
    switch (t) {
      case Type::kI8: return static_cast<std::int8_t>(buf[0]);
      case Type::kU8: return buf[0];
      case Type::kI16: return load<std::int16_t>(buf, swap);
      case Type::kU16: return load<std::uint16_t>(buf, swap);
      case Type::kI32: return load<std::int32_t>(buf, swap);
      case Type::kU32: return load<std::uint32_t>(buf, swap);
      case Type::kF32: return load<float>(buf, swap);
      case Type::kF64: return load<double>(buf, swap);
    }
    return 0;
  }

  void next_record(const std::string& where) {
    if (fmt_ != Format::kAscii) return;
    std::string text;
    do {
      if (!std::getline(in_, text)) throw IngestionError("ply: truncated ascii data", where);
    } while (text.find_first_not_of(" \t\r") == std::string::npos);
    line_.clear();
    line_.str(text);
  }

 private:
  std::istream& in_;
  Format fmt_;
  std::string path_;
  std::istringstream line_;
};

}  // namespace

PlyData read_ply(const std::filesystem::path& path) {
  const std::string file = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("ply: cannot open file", file);

  std::string line;
  std::getline(in, line);
  if (line.rfind("ply", 0) != 0) throw IngestionError("ply: missing magic", file + ":1");

  Format fmt = Format::kAscii;
  std::vector<Element> elements;
  int line_no = 1;
  bool header_done = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string where = file + ":" + std::to_string(line_no);
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "format") {
      std::string f;
      ss >> f;
      if (f == "ascii") fmt = Format::kAscii;
      else if (f == "binary_little_endian") fmt = Format::kLittle;
      else if (f == "binary_big_endian") fmt = Format::kBig;
      else throw IngestionError("ply: unknown format '" + f + "'", where);
    } else if (key == "element") {
      Element e;
      ss >> e.name >> e.count;
      if (!ss) throw IngestionError("ply: malformed element line", where);
      elements.push_back(e);
    } else if (key == "property") {
      if (elements.empty()) throw IngestionError("ply: property before element", where);
      Property p;
      std::string t;
      ss >> t;
      if (t == "list") {
        std::string ct, it;
        ss >> ct >> it >> p.name;
        p.is_list = true;
        p.count_type = parse_type(ct, where);
        p.type = parse_type(it, where);
      } else {
        p.type = parse_type(t, where);
        ss >> p.name;
      }
      elements.back().properties.push_back(p);
    } else if (key == "end_header") {
      header_done = true;
      break;
    }
  }
  if (!header_done) throw IngestionError("ply: missing end_header", file);

  PlyData data;
  Reader reader(in, fmt, file);
  for (const auto& e : elements) {
    const bool is_vertex = e.name == "vertex";
    const bool is_face = e.name == "face";
    int ix = -1, iy = -1, iz = -1, ir = -1, ig = -1, ib = -1;
    for (int i = 0; i < static_cast<int>(e.properties.size()); ++i) {
      const auto& n = e.properties[i].name;
      if (n == "x") ix = i;
      if (n == "y") iy = i;
      if (n == "z") iz = i;
      if (n == "red" || n == "r") ir = i;
      if (n == "green" || n == "g") ig = i;
      if (n == "blue" || n == "b") ib = i;
    }
    if (is_vertex && (ix < 0 || iy < 0 || iz < 0)) {
      throw IngestionError("ply: vertex element lacks x/y/z", file);
    }
    const bool colors = is_vertex && ir >= 0 && ig >= 0 && ib >= 0;
    const double color_scale =
        colors && (e.properties[ir].type == Type::kF32 || e.properties[ir].type == Type::kF64) ? 1.0 : 1.0 / 255.0;
    if (is_vertex) {
      data.cloud.points.reserve(e.count);
      if (colors) data.cloud.colors.reserve(e.count);
    }

    std::vector<double> values(e.properties.size());
    std::vector<double> list;
    for (std::size_t r = 0; r < e.count; ++r) {
      const std::string where = file + ": " + e.name + " " + std::to_string(r);
      reader.next_record(where);
      std::vector<double> face;
      for (std::size_t pi = 0; pi < e.properties.size(); ++pi) {
        const auto& p = e.properties[pi];
        if (p.is_list) {
          const double cnt = reader.read(p.count_type, where);
          if (!(cnt >= 0) || cnt > 1e6) throw IngestionError("ply: bad list length", where);
          list.resize(static_cast<std::size_t>(cnt));
          for (auto& v : list) v = reader.read(p.type, where);
          if (is_face && (p.name == "vertex_indices" || p.name == "vertex_index")) face = list;
        } else {
          values[pi] = reader.read(p.type, where);
        }
      }
      if (is_vertex) {
        data.cloud.points.emplace_back(values[ix], values[iy], values[iz]);
        if (colors) {
          data.cloud.colors.emplace_back(values[ir] * color_scale, values[ig] * color_scale,
                                         values[ib] * color_scale);
        }
      } else if (is_face && face.size() >= 3) {
        for (std::size_t k = 1; k + 1 < face.size(); ++k) {
          data.triangles.push_back({static_cast<std::uint32_t>(face[0]), static_cast<std::uint32_t>(face[k]),
                                    static_cast<std::uint32_t>(face[k + 1])});
        }
      }
    }
  }
  return data;
}

void write_ply(const std::filesystem::path& path, const PointCloud& cloud) {
  cloud.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("ply: cannot write " + path.string());
  const bool colors = cloud.has_colors();
  out << "ply\nformat binary_little_endian 1.0\n";
  out << "element vertex " << cloud.size() << "\n";
  out << "property float x\nproperty float y\nproperty float z\n";
  if (colors) out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out << "end_header\n";

  const std::size_t stride = 12 + (colors ? 3 : 0);
  std::vector<unsigned char> buf(stride * cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    unsigned char* rec = buf.data() + i * stride;
    for (int a = 0; a < 3; ++a) {
      const float f = static_cast<float>(cloud.points[i][a]);
      auto bits = std::bit_cast<std::uint32_t>(f);
      for (int b = 0; b < 4; ++b) rec[4 * a + b] = static_cast<unsigned char>(bits >> (8 * b));
    }
    if (colors) {
      for (int a = 0; a < 3; ++a) {
        const double c = std::clamp(cloud.colors[i][a], 0.0, 1.0);
        rec[12 + a] = static_cast<unsigned char>(std::lround(c * 255.0));
      }
    }
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error("ply: write failed for " + path.string());
}

}  // namespace arbor::io
