#pragma once

#include <vector>

#include "stackpack/geometry.hpp"
#include "stackpack/heightmap.hpp"

namespace stackpack {

/// Placement of a rectangular grid of square cells in the XY plane.
struct GridSpec {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double resolution = 1.0;
  int width = 0;
  int height = 0;
};

/// For every cell, the highest and lowest Z of the mesh surface inside the
/// cell's vertical column (the closed cell square shrunk by a relative 1e-7 so
/// geometry lying exactly on a cell border belongs to one side only).
/// Untouched cells keep -inf in `top` and +inf in `bottom`. Arrays are
/// row-major with i along X; they are resized and reset.
void rasterize_columns(const TriangleMesh& mesh, const GridSpec& grid, std::vector<double>& top,
                       std::vector<double>& bottom);

/// Object heightmaps at a fixed orientation, measured from the object's
/// lowest point. Grid origin is the rotated mesh's XY bounds minimum.
struct ObjectHeightmaps {
  HeightMap top;     ///< H_t: 0 where the column holds no geometry.
  HeightMap bottom;  ///< H_b: +inf where the column holds no geometry.
  Aabb bounds;       ///< Bounds of the rotated mesh.
  /// Z of the lowest rasterized surface point in the rotated frame; both maps
  /// are measured from here. Equals bounds.min.z up to cell-border rounding.
  double base_z = 0.0;
  double object_height() const { return bounds.max.z() - base_z; }
};

/// Throws ValidationError for resolution <= 0.
ObjectHeightmaps raycast_heightmaps(const TriangleMesh& mesh, const Mat3& rotation, double resolution);
/// Same, for a mesh already in its final orientation.
ObjectHeightmaps raycast_heightmaps(const TriangleMesh& oriented_mesh, double resolution);

}  // namespace stackpack
