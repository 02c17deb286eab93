#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "stackpack/geometry.hpp"

namespace stackpack {

enum class MeshFormat { Obj, Stl, Off };

/// Parses "obj", "stl" or "off" (case-insensitive). Throws ValidationError.
MeshFormat parse_mesh_format(const std::string& name);
/// Picks the format from the file extension. Throws ValidationError.
MeshFormat mesh_format_from_path(const std::filesystem::path& path);

/// Reads a mesh in the declared format. OBJ polygons are fan-triangulated,
/// STL may be ASCII or binary (coincident STL vertices are welded).
/// Throws FormatError on parse failure and ValidationError on an invalid mesh.
TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format);
TriangleMesh load_mesh(const std::filesystem::path& path);

void write_obj(std::ostream& out, const TriangleMesh& mesh);
/// Throws std::runtime_error naming the path on I/O failure.
void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh);

}  // namespace stackpack
