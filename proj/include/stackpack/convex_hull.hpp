#pragma once

#include "stackpack/geometry.hpp"

namespace stackpack {

/// Distance below which a point counts as lying on a hull plane, meters.
inline constexpr double kHullTolerance = 1e-9;

/// Incremental 3D convex hull of the mesh vertices. The result is a closed
/// triangle mesh containing only hull vertices, with outward-facing (CCW seen
/// from outside) triangles. Throws DegeneracyError for coplanar, collinear or
/// coincident input.
TriangleMesh convex_hull(const TriangleMesh& mesh);
TriangleMesh convex_hull(const std::vector<Vec3>& points);

}  // namespace stackpack
