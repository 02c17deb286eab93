#pragma once

#include "stackpack/geometry.hpp"

namespace stackpack {

/// Open-top box occupying [0, length] x [0, width] x [0, height], meters.
struct Container {
  double length = 0.0;
  double width = 0.0;
  double height = 0.0;
  /// Friction between items and the container floor/walls.
  double mu_wall = 0.7;

  void validate() const;
  double volume() const { return length * width * height; }
  Aabb bounds() const { return {Vec3::Zero(), Vec3(length, width, height)}; }
  bool operator==(const Container& o) const {
    return length == o.length && width == o.width && height == o.height && mu_wall == o.mu_wall;
  }
};

/// Floor plus four walls as a closed-bottom, open-top shell (8 vertices).
TriangleMesh container_shell(const Container& container);

}  // namespace stackpack
