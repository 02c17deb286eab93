#include "stackpack/container.hpp"

#include <cmath>

#include "stackpack/errors.hpp"

namespace stackpack {

void Container::validate() const {
  for (double d : {length, width, height}) {
    if (!std::isfinite(d) || d <= 0.0) throw ValidationError("container dimensions must be positive and finite");
  }
  if (!std::isfinite(mu_wall) || mu_wall < 0.0) throw ValidationError("container friction must be >= 0");
}

TriangleMesh container_shell(const Container& c) {
  TriangleMesh m;
  const double L = c.length, W = c.width, H = c.height;
  m.vertices = {{0, 0, 0}, {L, 0, 0}, {L, W, 0}, {0, W, 0}, {0, 0, H}, {L, 0, H}, {L, W, H}, {0, W, H}};
  // Faces wound so their normals point into the container.
  m.triangles = {{0, 1, 2}, {0, 2, 3},   // floor
                 {0, 4, 5}, {0, 5, 1},   // y = 0
                 {1, 5, 6}, {1, 6, 2},   // x = L
                 {2, 6, 7}, {2, 7, 3},   // y = W
                 {3, 7, 4}, {3, 4, 0}};  // x = 0
  return m;
}

}  // namespace stackpack
