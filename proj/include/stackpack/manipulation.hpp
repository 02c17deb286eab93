#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "stackpack/geometry.hpp"
#include "stackpack/heightmap.hpp"

namespace stackpack {

/// Rectangular vacuum gripper seen from above, extruded upward without bound.
struct GripperModel {
  double length = 0.30;
  double width = 0.02;

  /// Throws ValidationError unless both dimensions are positive and finite.
  void validate() const;
  bool operator==(const GripperModel& o) const = default;
};

/// A top-down grasp. The approach direction is always -Z.
struct GraspCandidate {
  /// End-effector pose relative to the object's mesh frame.
  RigidTransform pose;
  /// Grasp point in the mesh frame.
  Vec3 point = Vec3::Zero();
  /// Gripper yaw about world Z at the destination pose.
  double yaw = 0.0;
  /// Gripper footprint area not over the object footprint, m^2.
  double overhang = 0.0;
};

/// Extra robot-specific acceptance test (reachability, joint limits, ...).
using GraspCheck = std::function<bool(const RigidTransform& object_pose, const GraspCandidate& grasp)>;

/// Grasps at the center of the top surface of `mesh` placed with `placement`.
/// The top surface is the set of object heightmap cells within `contact_tol`
/// of the highest one (rasterized at `resolution`). One candidate per yaw
/// k*2pi/yaw_steps, ordered by overhang, then by how far the gripper could
/// grow before overhanging, then by k. Throws NoGraspError when no top
/// surface is found, ValidationError for bad arguments.
std::vector<GraspCandidate> grasp_candidates(const TriangleMesh& mesh, const RigidTransform& placement,
                                             const GripperModel& gripper, std::size_t yaw_steps = 8,
                                             double resolution = 0.002, double contact_tol = 0.002);

/// Rectangle of the gripper footprint for a grasp of an object at `placement`,
/// as a world-frame center, in-plane axis angle and the grasp-plane height.
struct GripperFootprint {
  double cx = 0.0;
  double cy = 0.0;
  double yaw = 0.0;
  double z = 0.0;
};
GripperFootprint gripper_footprint(const RigidTransform& placement, const GraspCandidate& grasp);

/// Maximum container map height under the gripper rectangle. Cells outside the
/// map are ignored (the gripper passes above the rim there). Returns 0 when no
/// cell is covered.
double max_terrain_under_gripper(const HeightMap& terrain, const GripperModel& gripper, const GripperFootprint& fp);

/// True when some grasp lets the object descend vertically to `placement`
/// without the gripper column meeting the terrain `terrain` (which must not
/// include the object itself) and `external_check` accepts it. The object's
/// own column is assumed clear, as the lowest-Z placement guarantees.
bool is_manip_feasible(const RigidTransform& placement, const TriangleMesh& mesh, const HeightMap& terrain,
                       const GripperModel& gripper, const std::vector<GraspCandidate>& grasps,
                       const GraspCheck& external_check = nullptr);

}  // namespace stackpack
