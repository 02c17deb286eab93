#pragma once

#include <cstddef>
#include <vector>

#include "stackpack/geometry.hpp"

namespace stackpack {

/// A resting pose on a horizontal plane, applied as Ry(roll) * Rx(pitch).
struct StableOrientation {
  double roll = 0.0;
  double pitch = 0.0;
  double probability = 0.0;
  /// Outward normal of the supporting hull facet in the mesh frame.
  Vec3 facet_normal = Vec3::Zero();
};

struct OrientationSet {
  /// Highest-probability entries first, at most top_n of them.
  std::vector<StableOrientation> orientations;
  /// Number of stable facets found before truncation.
  std::size_t available = 0;
};

/// Roll and pitch that turn the unit vector `n` into -Z.
void rpy_for_down_normal(const Vec3& n, double& roll, double& pitch);

/// Solid angle subtended by triangle (a, b, c) at the origin, steradians.
double triangle_solid_angle(const Vec3& a, const Vec3& b, const Vec3& c);

/// Resting orientations from the convex hull. Coplanar hull triangles are
/// merged into facets; a facet is stable when the center of mass projects
/// strictly inside it. Probabilities are facet solid angles seen from the
/// center of mass, normalized over the stable facets. Ties are broken by
/// (roll, pitch). Throws DegeneracyError for flat input and ValidationError
/// for top_n < 1.
OrientationSet planar_stable_orientations(const TriangleMesh& mesh, std::size_t top_n);

}  // namespace stackpack
