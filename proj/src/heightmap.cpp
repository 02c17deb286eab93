#include "stackpack/heightmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "stackpack/errors.hpp"
#include "stackpack/raycast.hpp"

namespace stackpack {

namespace {

constexpr double kEmptyTop = 1e-9;

}  // namespace

HeightMap::HeightMap(int width, int height, double resolution, double origin_x, double origin_y, double fill)
    : width_(width), height_(height), resolution_(resolution), origin_x_(origin_x), origin_y_(origin_y) {
  if (width < 1 || height < 1) throw ValidationError("heightmap dimensions must be >= 1");
  if (!(resolution > 0.0) || !std::isfinite(resolution)) throw ValidationError("heightmap resolution must be positive");
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

double HeightMap::sum() const {
  double s = 0.0;
  for (double v : data_) {
    if (std::isfinite(v)) s += v;
  }
  return s;
}

double HeightMap::max_finite() const {
  double m = 0.0;
  for (double v : data_) {
    if (std::isfinite(v)) m = std::max(m, v);
  }
  return m;
}

bool HeightMap::same_grid(const HeightMap& o) const {
  return width_ == o.width_ && height_ == o.height_ && resolution_ == o.resolution_ && origin_x_ == o.origin_x_ &&
         origin_y_ == o.origin_y_;
}

bool HeightMap::operator==(const HeightMap& o) const { return same_grid(o) && data_ == o.data_; }

int cells_in(double length, double resolution) {
  return static_cast<int>(std::floor(length / resolution + 1e-6));
}

HeightMap container_heightmap(const Container& container, const std::vector<TriangleMesh>& placed_world,
                              double resolution) {
  container.validate();
  if (!(resolution > 0.0)) throw ValidationError("heightmap resolution must be positive");
  const int w = cells_in(container.length, resolution);
  const int h = cells_in(container.width, resolution);
  HeightMap map(w, h, resolution);
  GridSpec grid{0.0, 0.0, resolution, w, h};
  std::vector<double> top;
  std::vector<double> bottom;
  for (const TriangleMesh& mesh : placed_world) {
    rasterize_columns(mesh, grid, top, bottom);
    for (std::size_t k = 0; k < top.size(); ++k) {
      if (top[k] > map.data()[k]) map.data()[k] = top[k];
    }
  }
  return map;
}

HeightMap container_heightmap(const Container& container,
                              const std::vector<std::pair<TriangleMesh, RigidTransform>>& placed,
                              double resolution) {
  std::vector<TriangleMesh> world;
  world.reserve(placed.size());
  for (const auto& [mesh, t] : placed) world.push_back(transform_mesh(mesh, t));
  return container_heightmap(container, world, resolution);
}

void check_window(const HeightMap& map, int w, int h, int x, int y) {
  if (x < 0 || y < 0 || w < 0 || h < 0 || x + w > map.width() || y + h > map.height()) {
    std::ostringstream msg;
    msg << "window " << w << "x" << h << " at (" << x << ", " << y << ") exceeds " << map.width() << "x"
        << map.height() << " heightmap";
    throw BoundsError(msg.str());
  }
}

double lowest_z(const HeightMap& terrain, const HeightMap& bottom, int x, int y) {
  check_window(terrain, bottom.width(), bottom.height(), x, y);
  double z = 0.0;
  for (int j = 0; j < bottom.height(); ++j) {
    for (int i = 0; i < bottom.width(); ++i) {
      const double b = bottom(i, j);
      if (std::isinf(b)) continue;
      z = std::max(z, terrain(x + i, y + j) - b);
    }
  }
  return z;
}

HeightMap update_heightmap(const HeightMap& terrain, const HeightMap& top, int x, int y, double z) {
  check_window(terrain, top.width(), top.height(), x, y);
  HeightMap out = terrain;
  for (int j = 0; j < top.height(); ++j) {
    for (int i = 0; i < top.width(); ++i) {
      const double t = top(i, j);
      if (t <= kEmptyTop) continue;
      double& cell = out.at(x + i, y + j);
      cell = std::max(cell, t + z);
    }
  }
  return out;
}

void update_heightmap_inplace(HeightMap& terrain, const HeightMap& top, const HeightMap& bottom, int x, int y,
                              double z) {
  check_window(terrain, top.width(), top.height(), x, y);
  if (top.width() != bottom.width() || top.height() != bottom.height()) {
    throw ValidationError("top and bottom heightmaps differ in size");
  }
  for (int j = 0; j < top.height(); ++j) {
    for (int i = 0; i < top.width(); ++i) {
      const double t = top(i, j);
      if (t <= kEmptyTop && std::isinf(bottom(i, j))) continue;
      double& cell = terrain.at(x + i, y + j);
      cell = std::max(cell, t + z);
    }
  }
}

HeightMap update_heightmap(const HeightMap& terrain, const HeightMap& top, const HeightMap& bottom, int x, int y,
                           double z) {
  HeightMap out = terrain;
  update_heightmap_inplace(out, top, bottom, x, y, z);
  return out;
}

void write_pgm(std::ostream& out, const HeightMap& map) {
  constexpr int kMaxGray = 65535;
  const double top = map.max_finite();
  const double step = top > 0.0 ? top / kMaxGray : 1.0 / kMaxGray;
  out << "P2\n# meters-per-gray-level " << std::setprecision(17) << step << "\n"
      << map.width() << " " << map.height() << "\n"
      << kMaxGray << "\n";
  for (int j = map.height() - 1; j >= 0; --j) {
    for (int i = 0; i < map.width(); ++i) {
      const double v = map(i, j);
      const long g = std::isfinite(v) ? std::lround(std::clamp(v / step, 0.0, double(kMaxGray))) : kMaxGray;
      out << g << (i + 1 < map.width() ? ' ' : '\n');
    }
  }
}

void write_pgm(const std::filesystem::path& path, const HeightMap& map) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_pgm(out, map);
  if (!out) throw std::runtime_error("error while writing " + path.string());
}

}  // namespace stackpack
