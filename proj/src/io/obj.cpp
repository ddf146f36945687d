#include "arbor/io/obj.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "arbor/common/error.hpp"

namespace arbor::io {

TriMesh read_obj(const std::filesystem::path& path) {
  const std::string file = path.string();
  std::ifstream in(path);
  if (!in) throw IngestionError("obj: cannot open file", file);
  TriMesh mesh;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = file + ":" + std::to_string(line_no);
    std::istringstream ss(line);
    std::string key;
    if (!(ss >> key)) continue;
    if (key == "v") {
      std::string sx, sy, sz;
      if (!(ss >> sx >> sy >> sz)) throw IngestionError("obj: malformed vertex", where);
      try {
        mesh.vertices.emplace_back(std::stod(sx), std::stod(sy), std::stod(sz));
      } catch (const std::exception&) {
        throw IngestionError("obj: unparsable vertex coordinate", where);
      }
    } else if (key == "f") {
      std::vector<std::uint32_t> face;
      std::string tok;
      while (ss >> tok) {
        const auto slash = tok.find('/');
        const std::string head = tok.substr(0, slash);
        long idx = 0;
        const auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), idx);
        if (ec != std::errc{} || ptr != head.data() + head.size() || idx == 0) {
          throw IngestionError("obj: bad face index '" + tok + "'", where);
        }
        const long n = static_cast<long>(mesh.vertices.size());
        const long resolved = idx > 0 ? idx - 1 : n + idx;
        if (resolved < 0 || resolved >= n) throw IngestionError("obj: face index out of range", where);
        face.push_back(static_cast<std::uint32_t>(resolved));
      }
      if (face.size() < 3) throw IngestionError("obj: face with fewer than 3 vertices", where);
      for (std::size_t k = 1; k + 1 < face.size(); ++k) {
        mesh.triangles.push_back({face[0], face[k], face[k + 1]});
      }
    }
  }
  return mesh;
}

namespace {

void append_number(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

void write_obj(const std::filesystem::path& path, const TriMesh& mesh) {
  std::string text;
  text.reserve(mesh.vertices.size() * 40 + mesh.triangles.size() * 24);
  for (const auto& v : mesh.vertices) {
    text += "v ";
    append_number(text, v.x());
    text += ' ';
    append_number(text, v.y());
    text += ' ';
    append_number(text, v.z());
    text += '\n';
  }
  for (const auto& t : mesh.triangles) {
    text += "f " + std::to_string(t[0] + 1) + ' ' + std::to_string(t[1] + 1) + ' ' +
            std::to_string(t[2] + 1) + '\n';
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("obj: cannot write " + path.string());
  out << text;
}

}  // namespace arbor::io
