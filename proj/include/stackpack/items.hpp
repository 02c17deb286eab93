#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stackpack/geometry.hpp"

namespace stackpack {

enum class ItemKind { Box, LShape, Bowl, Wedge };

ItemKind parse_item_kind(const std::string& name);
std::string to_string(ItemKind kind);

/// [0,a] x [0,b] x [0,c], 12 triangles.
TriangleMesh make_box(double a, double b, double c);
/// L-shaped prism: an a x c profile in XZ with the upper half of the +X side
/// cut away, extruded by b along Y.
TriangleMesh make_lshape(double a, double b, double c);
/// Right-triangle prism: legs a (along X) and c (along Z), extruded by b.
TriangleMesh make_wedge(double a, double b, double c);
/// Open bowl of revolution around the Z axis, centered at the origin.
/// Outer wall runs from radius R/2 at z=0 to R at z=h; the wall has constant
/// horizontal thickness R - r_inner; the flat floor is `floor_thickness`
/// thick (0.4 h when negative).
TriangleMesh make_bowl(double outer_radius, double inner_radius, double height, double floor_thickness = -1.0,
                       int segments = 32);

/// Procedural item. `params` holds the constructor dimensions in order; when
/// empty, desk-scale dimensions are drawn deterministically from `seed`.
/// Throws ValidationError for non-positive or inconsistent dimensions.
TriangleMesh generate_test_item(ItemKind kind, const std::vector<double>& params, std::uint64_t seed);

/// Dimensions that generate_test_item draws for an empty parameter list.
std::vector<double> random_item_params(ItemKind kind, std::uint64_t seed);

}  // namespace stackpack
