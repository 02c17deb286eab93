#pragma once

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <utility>
#include <vector>

#include "stackpack/container.hpp"
#include "stackpack/geometry.hpp"

namespace stackpack {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Uniform grid of heights (meters) over the XY plane. Cell (i, j) covers
/// [origin_x + i*res, origin_x + (i+1)*res) x [origin_y + j*res, ...); i runs
/// along X. Entries are >= 0 or +inf.
class HeightMap {
 public:
  HeightMap() = default;
  HeightMap(int width, int height, double resolution, double origin_x = 0.0, double origin_y = 0.0,
            double fill = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  double origin_x() const { return origin_x_; }
  double origin_y() const { return origin_y_; }
  double cell_area() const { return resolution_ * resolution_; }

  double at(int i, int j) const { return data_[index(i, j)]; }
  double& at(int i, int j) { return data_[index(i, j)]; }
  double operator()(int i, int j) const { return at(i, j); }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  double cell_center_x(int i) const { return origin_x_ + (i + 0.5) * resolution_; }
  double cell_center_y(int j) const { return origin_y_ + (j + 0.5) * resolution_; }
  /// Sum over all finite entries.
  double sum() const;
  double max_finite() const;

  bool same_grid(const HeightMap& o) const;
  bool operator==(const HeightMap& o) const;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(i);
  }

  int width_ = 0;
  int height_ = 0;
  double resolution_ = 1.0;
  double origin_x_ = 0.0;
  double origin_y_ = 0.0;
  std::vector<double> data_;
};

/// Number of whole cells of size `resolution` that fit in `length`.
int cells_in(double length, double resolution);

/// Top-down map of the container floor with the placed geometry rasterized in:
/// each cell holds the highest point of any placed mesh inside its column, 0
/// where the floor is exposed.
HeightMap container_heightmap(const Container& container,
                              const std::vector<std::pair<TriangleMesh, RigidTransform>>& placed,
                              double resolution);
/// Same, for meshes already in world coordinates.
HeightMap container_heightmap(const Container& container, const std::vector<TriangleMesh>& placed_world,
                              double resolution);

/// Lowest collision-free placement height for an object whose bottom map
/// `bottom` is laid with its cell (0,0) on terrain cell (x, y). Cells where the
/// object has no geometry (+inf) never bind. Clamped below at 0. Throws
/// BoundsError when the window leaves the terrain.
double lowest_z(const HeightMap& terrain, const HeightMap& bottom, int x, int y);

/// Terrain after laying an object with top map `top` at (x, y, z). A cell of
/// `top` counts as empty when it is <= 1e-9. Does not modify `terrain`.
HeightMap update_heightmap(const HeightMap& terrain, const HeightMap& top, int x, int y, double z);
/// Same, with emptiness decided by the bottom map: a cell is empty only when
/// its top height is ~0 and its bottom is +inf.
HeightMap update_heightmap(const HeightMap& terrain, const HeightMap& top, const HeightMap& bottom, int x,
                           int y, double z);
/// In-place variant of the above.
void update_heightmap_inplace(HeightMap& terrain, const HeightMap& top, const HeightMap& bottom, int x, int y,
                              double z);

/// Throws BoundsError when a w x h window at (x, y) leaves `map`.
void check_window(const HeightMap& map, int w, int h, int x, int y);

/// ASCII PGM (P2). Rows are written from the largest j down so +Y points up
/// in image viewers; +inf cells take the maximum gray level. The header
/// carries a "# meters-per-gray-level <value>" comment.
void write_pgm(std::ostream& out, const HeightMap& map);
void write_pgm(const std::filesystem::path& path, const HeightMap& map);

}  // namespace stackpack
