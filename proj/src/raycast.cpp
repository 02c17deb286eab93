#include "stackpack/raycast.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "stackpack/errors.hpp"

namespace stackpack {

namespace {

// Small fixed-capacity polygon for clipping a triangle against a cell column.
struct Poly {
  std::array<Vec3, 9> v;
  int n = 0;
};

// Keeps the part of `in` where sign * (p[axis] - bound) >= 0.
void clip(const Poly& in, Poly& out, int axis, double bound, double sign) {
  out.n = 0;
  for (int k = 0; k < in.n; ++k) {
    const Vec3& a = in.v[k];
    const Vec3& b = in.v[(k + 1) % in.n];
    const double da = sign * (a[axis] - bound);
    const double db = sign * (b[axis] - bound);
    if (da >= 0.0) out.v[out.n++] = a;
    if ((da >= 0.0) != (db >= 0.0)) {
      const double t = da / (da - db);
      Vec3 p = a + t * (b - a);
      p[axis] = bound;
      out.v[out.n++] = p;
    }
  }
}

}  // namespace

void rasterize_columns(const TriangleMesh& mesh, const GridSpec& grid, std::vector<double>& top,
                       std::vector<double>& bottom) {
  const std::size_t cells = static_cast<std::size_t>(grid.width) * static_cast<std::size_t>(grid.height);
  top.assign(cells, -kInfinity);
  bottom.assign(cells, kInfinity);
  if (grid.width <= 0 || grid.height <= 0) return;
  const double res = grid.resolution;
  const double shrink = res * 1e-7;

  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Vec3& a = mesh.corner(t, 0);
    const Vec3& b = mesh.corner(t, 1);
    const Vec3& c = mesh.corner(t, 2);
    const double xmin = std::min({a.x(), b.x(), c.x()});
    const double xmax = std::max({a.x(), b.x(), c.x()});
    const double ymin = std::min({a.y(), b.y(), c.y()});
    const double ymax = std::max({a.y(), b.y(), c.y()});
    const double zmin = std::min({a.z(), b.z(), c.z()});
    const double zmax = std::max({a.z(), b.z(), c.z()});
    const int i0 = std::max(0, static_cast<int>(std::floor((xmin - grid.origin_x) / res)));
    const int i1 = std::min(grid.width - 1, static_cast<int>(std::floor((xmax - grid.origin_x) / res)));
    const int j0 = std::max(0, static_cast<int>(std::floor((ymin - grid.origin_y) / res)));
    const int j1 = std::min(grid.height - 1, static_cast<int>(std::floor((ymax - grid.origin_y) / res)));
    for (int j = j0; j <= j1; ++j) {
      const double cy0 = grid.origin_y + j * res + shrink;
      const double cy1 = grid.origin_y + (j + 1) * res - shrink;
      for (int i = i0; i <= i1; ++i) {
        const double cx0 = grid.origin_x + i * res + shrink;
        const double cx1 = grid.origin_x + (i + 1) * res - shrink;
        double lo = 0.0;
        double hi = 0.0;
        if (xmin >= cx0 && xmax <= cx1 && ymin >= cy0 && ymax <= cy1) {
          lo = zmin;
          hi = zmax;
        } else {
          Poly p0;
          Poly p1;
          p0.v[0] = a;
          p0.v[1] = b;
          p0.v[2] = c;
          p0.n = 3;
          clip(p0, p1, 0, cx0, 1.0);
          clip(p1, p0, 0, cx1, -1.0);
          clip(p0, p1, 1, cy0, 1.0);
          clip(p1, p0, 1, cy1, -1.0);
          if (p0.n == 0) continue;
          lo = hi = p0.v[0].z();
          for (int k = 1; k < p0.n; ++k) {
            lo = std::min(lo, p0.v[k].z());
            hi = std::max(hi, p0.v[k].z());
          }
        }
        const std::size_t idx = static_cast<std::size_t>(j) * grid.width + i;
        top[idx] = std::max(top[idx], hi);
        bottom[idx] = std::min(bottom[idx], lo);
      }
    }
  }
}

ObjectHeightmaps raycast_heightmaps(const TriangleMesh& oriented_mesh, double resolution) {
  if (!(resolution > 0.0)) throw ValidationError("heightmap resolution must be positive");
  ObjectHeightmaps maps;
  maps.bounds = oriented_mesh.bounds();
  const Vec3 ext = maps.bounds.extent();
  GridSpec grid;
  grid.origin_x = maps.bounds.min.x();
  grid.origin_y = maps.bounds.min.y();
  grid.resolution = resolution;
  grid.width = std::max(1, static_cast<int>(std::ceil(ext.x() / resolution - 1e-9)));
  grid.height = std::max(1, static_cast<int>(std::ceil(ext.y() / resolution - 1e-9)));

  std::vector<double> top;
  std::vector<double> bottom;
  rasterize_columns(oriented_mesh, grid, top, bottom);

  double base = kInfinity;
  for (double b : bottom) base = std::min(base, b);
  if (!std::isfinite(base)) base = maps.bounds.min.z();
  maps.base_z = base;
  maps.top = HeightMap(grid.width, grid.height, resolution, grid.origin_x, grid.origin_y, 0.0);
  maps.bottom = HeightMap(grid.width, grid.height, resolution, grid.origin_x, grid.origin_y, kInfinity);
  for (std::size_t k = 0; k < top.size(); ++k) {
    if (std::isfinite(bottom[k])) {
      maps.top.data()[k] = std::max(0.0, top[k] - base);
      maps.bottom.data()[k] = std::max(0.0, bottom[k] - base);
    }
  }
  return maps;
}

ObjectHeightmaps raycast_heightmaps(const TriangleMesh& mesh, const Mat3& rotation, double resolution) {
  return raycast_heightmaps(rotate_mesh(mesh, rotation), resolution);
}

}  // namespace stackpack
