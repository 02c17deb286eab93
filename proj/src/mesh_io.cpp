#include "stackpack/mesh_io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <vector>

#include "stackpack/errors.hpp"

namespace stackpack {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

[[noreturn]] void fail_line(const std::filesystem::path& path, std::size_t line, const std::string& what) {
  std::ostringstream msg;
  msg << path.string() << ":" << line << ": " << what;
  throw FormatError(msg.str());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open mesh file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool parse_double(const std::string& token, double& out) {
  std::istringstream s(token);
  s.imbue(std::locale::classic());
  s >> out;
  return !s.fail() && s.eof();
}

TriangleMesh load_obj(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  TriangleMesh mesh;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      std::array<double, 3> c{};
      for (double& x : c) {
        std::string tok;
        if (!(ls >> tok) || !parse_double(tok, x)) fail_line(path, lineno, "malformed vertex record");
      }
      mesh.vertices.emplace_back(c[0], c[1], c[2]);
    } else if (tag == "f") {
      std::vector<std::int64_t> idx;
      std::string tok;
      while (ls >> tok) {
        const std::string head = tok.substr(0, tok.find('/'));
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), v);
        if (ec != std::errc() || ptr != head.data() + head.size() || v == 0) {
          fail_line(path, lineno, "malformed face index '" + tok + "'");
        }
        // Negative indices are relative to the vertices read so far.
        idx.push_back(v > 0 ? v - 1 : static_cast<std::int64_t>(mesh.vertices.size()) + v);
      }
      if (idx.size() < 3) fail_line(path, lineno, "face with fewer than 3 vertices");
      for (std::int64_t i : idx) {
        if (i < 0) fail_line(path, lineno, "face index out of range");
      }
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
        mesh.triangles.push_back({static_cast<std::uint32_t>(idx[0]), static_cast<std::uint32_t>(idx[k]),
                                  static_cast<std::uint32_t>(idx[k + 1])});
      }
    }
  }
  return mesh;
}

TriangleMesh load_off(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t lineno = 0;
  // Yields the next non-empty, non-comment line.
  auto next = [&](std::istringstream& ls) -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      ls = std::istringstream(line);
      return true;
    }
    return false;
  };
  std::istringstream ls;
  if (!next(ls)) fail_line(path, lineno, "empty OFF file");
  std::string header;
  ls >> header;
  if (header != "OFF") fail_line(path, lineno, "missing OFF header");
  long nv = -1, nf = -1, ne = 0;
  if (!(ls >> nv)) {
    if (!next(ls)) fail_line(path, lineno, "missing OFF counts");
    ls >> nv;
  }
  if (!(ls >> nf >> ne) || nv < 0 || nf < 0) fail_line(path, lineno, "malformed OFF counts");

  TriangleMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(nv));
  for (long i = 0; i < nv; ++i) {
    if (!next(ls)) fail_line(path, lineno, "unexpected end of file in vertex list");
    std::array<double, 3> c{};
    for (double& x : c) {
      std::string tok;
      if (!(ls >> tok) || !parse_double(tok, x)) fail_line(path, lineno, "malformed vertex record");
    }
    mesh.vertices.emplace_back(c[0], c[1], c[2]);
  }
  for (long i = 0; i < nf; ++i) {
    if (!next(ls)) fail_line(path, lineno, "unexpected end of file in face list");
    long count = 0;
    if (!(ls >> count) || count < 3) fail_line(path, lineno, "malformed face record");
    std::vector<long> idx(static_cast<std::size_t>(count));
    for (long& v : idx) {
      if (!(ls >> v) || v < 0) fail_line(path, lineno, "malformed face index");
    }
    for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
      mesh.triangles.push_back({static_cast<std::uint32_t>(idx[0]), static_cast<std::uint32_t>(idx[k]),
                                static_cast<std::uint32_t>(idx[k + 1])});
    }
  }
  return mesh;
}

class VertexWelder {
 public:
  std::uint32_t add(const Vec3& v, TriangleMesh& mesh) {
    const std::array<double, 3> key{v.x(), v.y(), v.z()};
    auto [it, inserted] = ids_.try_emplace(key, static_cast<std::uint32_t>(mesh.vertices.size()));
    if (inserted) mesh.vertices.push_back(v);
    return it->second;
  }

 private:
  std::map<std::array<double, 3>, std::uint32_t> ids_;
};

bool looks_like_ascii_stl(const std::string& data) {
  if (data.size() < 5 || lower(data.substr(0, 5)) != "solid") return false;
  // Binary files may also start with "solid"; require a matching size mismatch.
  if (data.size() >= 84) {
    std::uint32_t n = 0;
    std::memcpy(&n, data.data() + 80, 4);
    if (84 + 50ull * n == data.size()) return false;
  }
  return true;
}

TriangleMesh load_stl(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  TriangleMesh mesh;
  VertexWelder welder;
  if (looks_like_ascii_stl(data)) {
    std::istringstream in(data);
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::uint32_t> facet;
    while (std::getline(in, line)) {
      ++lineno;
      std::istringstream ls(line);
      std::string tag;
      if (!(ls >> tag)) continue;
      tag = lower(tag);
      if (tag == "vertex") {
        std::array<double, 3> c{};
        for (double& x : c) {
          std::string tok;
          if (!(ls >> tok) || !parse_double(tok, x)) fail_line(path, lineno, "malformed vertex record");
        }
        facet.push_back(welder.add(Vec3(c[0], c[1], c[2]), mesh));
      } else if (tag == "endfacet") {
        if (facet.size() != 3) fail_line(path, lineno, "facet without exactly 3 vertices");
        mesh.triangles.push_back({facet[0], facet[1], facet[2]});
        facet.clear();
      }
    }
    return mesh;
  }
  if (data.size() < 84) {
    throw FormatError(path.string() + ": byte " + std::to_string(data.size()) + ": truncated binary STL header");
  }
  std::uint32_t n = 0;
  std::memcpy(&n, data.data() + 80, 4);
  const std::size_t expected = 84 + 50ull * n;
  if (data.size() < expected) {
    throw FormatError(path.string() + ": byte " + std::to_string(data.size()) +
                      ": truncated binary STL (expected " + std::to_string(expected) + " bytes)");
  }
  for (std::uint32_t t = 0; t < n; ++t) {
    const char* rec = data.data() + 84 + 50ull * t + 12;  // skip the facet normal
    std::array<std::uint32_t, 3> tri{};
    for (int k = 0; k < 3; ++k) {
      float c[3];
      std::memcpy(c, rec + 12 * k, 12);
      tri[k] = welder.add(Vec3(c[0], c[1], c[2]), mesh);
    }
    mesh.triangles.push_back(tri);
  }
  return mesh;
}

}  // namespace

MeshFormat parse_mesh_format(const std::string& name) {
  const std::string n = lower(name);
  if (n == "obj") return MeshFormat::Obj;
  if (n == "stl") return MeshFormat::Stl;
  if (n == "off") return MeshFormat::Off;
  throw ValidationError("unknown mesh format '" + name + "'");
}

MeshFormat mesh_format_from_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  if (!ext.empty()) ext.erase(0, 1);
  return parse_mesh_format(ext);
}

TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
  TriangleMesh mesh;
  switch (format) {
    case MeshFormat::Obj: mesh = load_obj(path); break;
    case MeshFormat::Stl: mesh = load_stl(path); break;
    case MeshFormat::Off: mesh = load_off(path); break;
  }
  try {
    mesh.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return mesh;
}

TriangleMesh load_mesh(const std::filesystem::path& path) { return load_mesh(path, mesh_format_from_path(path)); }

void write_obj(std::ostream& out, const TriangleMesh& mesh) {
  out << std::setprecision(17);
  for (const Vec3& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const Triangle& t : mesh.triangles) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_obj(out, mesh);
  if (!out) throw std::runtime_error("error while writing " + path.string());
}

}  // namespace stackpack
