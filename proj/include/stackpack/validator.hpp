#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "stackpack/container.hpp"
#include "stackpack/geometry.hpp"
#include "stackpack/planner.hpp"
#include "stackpack/stability.hpp"

namespace stackpack {

/// Generalized winding number of `mesh` around `p` (1 inside, 0 outside for
/// closed outward-oriented meshes).
double winding_number(const TriangleMesh& mesh, const Vec3& p);

/// Unsigned distance from `p` to the surface of `mesh`.
double surface_distance(const TriangleMesh& mesh, const Vec3& p);

/// True when some triangle of `a` crosses some triangle of `b`.
bool surfaces_intersect(const TriangleMesh& a, const TriangleMesh& b);

/// Overlap depth estimate of two world-frame meshes: the largest
/// d_a(p) + d_b(p) over sample points p inside both, where d is the distance
/// to each surface. Samples are the vertices of both meshes and a
/// `grid`^3 lattice over the common bounding box. 0 when disjoint.
double penetration_depth(const TriangleMesh& a, const TriangleMesh& b, int grid = 8);

/// Smallest signed distance from a vertex to the container boundary
/// (negative when outside).
double containment_margin(const TriangleMesh& world_mesh, const Container& container);

struct StepReport {
  std::size_t step = 0;
  std::size_t item = 0;
  std::string item_id;
  double penetration = 0.0;  ///< Worst overlap with earlier items, m.
  double containment_margin = 0.0;
  std::optional<StabilityVerdict> stability;  ///< Unset when not checked.
  std::optional<bool> manipulable;            ///< Unset when not checked.
  bool pass = true;
  std::string failure;  ///< First violated constraint at this step.
};

struct ValidationReport {
  std::vector<StepReport> steps;
  bool pass = true;
  /// Index of the first failing step.
  std::optional<std::size_t> first_failure;
};

/// Tolerances of the replay. The penetration tolerance defaults to the
/// plan's heightmap resolution.
struct ValidationOptions {
  std::optional<double> penetration_tol;
  double containment_tol = 1e-6;
  int sample_grid = 8;
};

/// Replays `plan` step by step over `items` (indexed by PlanStep::item) and
/// checks non-overlap, containment, stability and manipulation feasibility
/// (the last two when enabled in the plan's config). Every step is
/// recorded. Throws ValidationError when a step names an unknown item.
ValidationReport validate_plan(const PackingPlan& plan, const std::vector<PackItem>& items,
                               const ValidationOptions& options = {});

}  // namespace stackpack
