#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace stackpack {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Axis-aligned bounding box, meters.
struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  Vec3 extent() const { return max - min; }
  double volume() const;
  bool overlaps(const Aabb& other, double pad = 0.0) const;
  bool contains(const Vec3& p, double pad = 0.0) const;
};

using Triangle = std::array<std::uint32_t, 3>;

/// Indexed triangle soup. Coordinates in meters.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;

  /// Throws ValidationError when coordinates are non-finite, an index is out
  /// of range, or there are no triangles.
  void validate() const;
  Aabb bounds() const;

  const Vec3& corner(std::size_t tri, int k) const { return vertices[triangles[tri][k]]; }
};

/// Rotation composed as Rz(yaw) * Ry(roll) * Rx(pitch), then translation.
struct RigidTransform {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
  Vec3 translation = Vec3::Zero();

  Mat3 rotation() const;
  Vec3 apply(const Vec3& p) const { return rotation() * p + translation; }
  bool operator==(const RigidTransform& o) const {
    return roll == o.roll && pitch == o.pitch && yaw == o.yaw && translation == o.translation;
  }
};

Mat3 rotation_from_rpy(double roll, double pitch, double yaw);

TriangleMesh transform_mesh(const TriangleMesh& mesh, const RigidTransform& transform);
TriangleMesh rotate_mesh(const TriangleMesh& mesh, const Mat3& rotation);
/// Uniform scale about `center`.
TriangleMesh scale_mesh(const TriangleMesh& mesh, const Vec3& center, double factor);

Vec3 triangle_normal(const Vec3& a, const Vec3& b, const Vec3& c);
double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);

/// Signed volume by tetrahedron decomposition against the origin.
double signed_volume(const TriangleMesh& mesh);
double surface_area(const TriangleMesh& mesh);

/// True when every edge is used equally often in both directions.
bool is_closed(const TriangleMesh& mesh);

/// Relative tolerance below which a mesh is treated as non-watertight for COM.
inline constexpr double kWatertightVolumeTolerance = 1e-12;

/// Uniform-density volume centroid. Falls back to the area-weighted surface
/// centroid when the mesh is open or its signed volume is below tolerance.
Vec3 center_of_mass(const TriangleMesh& mesh);

/// Enclosed volume used for mass estimates: |signed volume|, or the hull
/// volume when the mesh is open or encloses no volume.
double solid_volume(const TriangleMesh& mesh);

/// Concatenates meshes into one soup.
TriangleMesh merge_meshes(const std::vector<TriangleMesh>& meshes);

}  // namespace stackpack
