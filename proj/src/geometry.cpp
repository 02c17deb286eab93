#include "stackpack/geometry.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "stackpack/convex_hull.hpp"
#include "stackpack/errors.hpp"

namespace stackpack {

double Aabb::volume() const {
  const Vec3 e = extent();
  return e.x() * e.y() * e.z();
}

bool Aabb::overlaps(const Aabb& other, double pad) const {
  for (int k = 0; k < 3; ++k) {
    if (min[k] > other.max[k] + pad || other.min[k] > max[k] + pad) return false;
  }
  return true;
}

bool Aabb::contains(const Vec3& p, double pad) const {
  for (int k = 0; k < 3; ++k) {
    if (p[k] < min[k] - pad || p[k] > max[k] + pad) return false;
  }
  return true;
}

void TriangleMesh::validate() const {
  if (triangles.empty()) throw ValidationError("mesh has no triangles");
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (!vertices[i].allFinite()) {
      std::ostringstream msg;
      msg << "vertex " << i << " has non-finite coordinates";
      throw ValidationError(msg.str());
    }
  }
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    for (std::uint32_t idx : triangles[t]) {
      if (idx >= vertices.size()) {
        std::ostringstream msg;
        msg << "triangle " << t << " references vertex " << idx << " but mesh has "
            << vertices.size() << " vertices";
        throw ValidationError(msg.str());
      }
    }
  }
}

Aabb TriangleMesh::bounds() const {
  Aabb box;
  if (vertices.empty()) return box;
  box.min = box.max = vertices.front();
  for (const Vec3& v : vertices) {
    box.min = box.min.cwiseMin(v);
    box.max = box.max.cwiseMax(v);
  }
  return box;
}

Mat3 rotation_from_rpy(double roll, double pitch, double yaw) {
  return (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) * Eigen::AngleAxisd(roll, Vec3::UnitY()) *
          Eigen::AngleAxisd(pitch, Vec3::UnitX()))
      .toRotationMatrix();
}

Mat3 RigidTransform::rotation() const { return rotation_from_rpy(roll, pitch, yaw); }

TriangleMesh transform_mesh(const TriangleMesh& mesh, const RigidTransform& transform) {
  TriangleMesh out = mesh;
  const bool identity_rotation = transform.roll == 0.0 && transform.pitch == 0.0 && transform.yaw == 0.0;
  const bool zero_translation = transform.translation.isZero(0.0);
  if (identity_rotation && zero_translation) return out;
  const Mat3 r = transform.rotation();
  for (Vec3& v : out.vertices) {
    if (!identity_rotation) v = r * v;
    if (!zero_translation) v += transform.translation;
  }
  return out;
}

TriangleMesh rotate_mesh(const TriangleMesh& mesh, const Mat3& rotation) {
  TriangleMesh out = mesh;
  for (Vec3& v : out.vertices) v = rotation * v;
  return out;
}

TriangleMesh scale_mesh(const TriangleMesh& mesh, const Vec3& center, double factor) {
  TriangleMesh out = mesh;
  for (Vec3& v : out.vertices) v = center + factor * (v - center);
  return out;
}

Vec3 triangle_normal(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 n = (b - a).cross(c - a);
  const double len = n.norm();
  if (len == 0.0) return Vec3::Zero();
  return n / len;
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

double signed_volume(const TriangleMesh& mesh) {
  double vol = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    vol += mesh.corner(t, 0).dot(mesh.corner(t, 1).cross(mesh.corner(t, 2)));
  }
  return vol / 6.0;
}

double surface_area(const TriangleMesh& mesh) {
  double area = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    area += triangle_area(mesh.corner(t, 0), mesh.corner(t, 1), mesh.corner(t, 2));
  }
  return area;
}

bool is_closed(const TriangleMesh& mesh) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> balance;
  for (const Triangle& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      const std::uint32_t a = t[k], b = t[(k + 1) % 3];
      if (a < b) ++balance[{a, b}];
      else --balance[{b, a}];
    }
  }
  for (const auto& [edge, n] : balance) {
    if (n != 0) return false;
  }
  return true;
}

namespace {

Vec3 surface_centroid(const TriangleMesh& mesh) {
  Vec3 acc = Vec3::Zero();
  double area = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Vec3& a = mesh.corner(t, 0);
    const Vec3& b = mesh.corner(t, 1);
    const Vec3& c = mesh.corner(t, 2);
    const double w = triangle_area(a, b, c);
    acc += w * (a + b + c) / 3.0;
    area += w;
  }
  if (area > 0.0) return acc / area;
  // Zero-area soup: plain vertex average.
  Vec3 mean = Vec3::Zero();
  for (const Vec3& v : mesh.vertices) mean += v;
  return mesh.vertices.empty() ? mean : Vec3(mean / static_cast<double>(mesh.vertices.size()));
}

}  // namespace

Vec3 center_of_mass(const TriangleMesh& mesh) {
  // Tetrahedra are formed against a reference point inside the bounds so the
  // accumulation stays well conditioned for meshes far from the origin.
  const Aabb box = mesh.bounds();
  const Vec3 ref = 0.5 * (box.min + box.max);
  const double scale = std::max(box.extent().maxCoeff(), 1e-300);
  double vol = 0.0;
  Vec3 acc = Vec3::Zero();
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Vec3 a = mesh.corner(t, 0) - ref;
    const Vec3 b = mesh.corner(t, 1) - ref;
    const Vec3 c = mesh.corner(t, 2) - ref;
    const double v = a.dot(b.cross(c)) / 6.0;
    vol += v;
    acc += v * (a + b + c) / 4.0;
  }
  if (std::abs(vol) <= kWatertightVolumeTolerance * scale * scale * scale || !is_closed(mesh)) {
    return surface_centroid(mesh);
  }
  return ref + acc / vol;
}

double solid_volume(const TriangleMesh& mesh) {
  const double vol = std::abs(signed_volume(mesh));
  const double scale = mesh.bounds().extent().maxCoeff();
  if (vol > kWatertightVolumeTolerance * scale * scale * scale && is_closed(mesh)) return vol;
  try {
    return std::abs(signed_volume(convex_hull(mesh)));
  } catch (const DegeneracyError&) {
    return 0.0;
  }
}

TriangleMesh merge_meshes(const std::vector<TriangleMesh>& meshes) {
  TriangleMesh out;
  for (const TriangleMesh& m : meshes) {
    const auto base = static_cast<std::uint32_t>(out.vertices.size());
    out.vertices.insert(out.vertices.end(), m.vertices.begin(), m.vertices.end());
    for (const Triangle& t : m.triangles) out.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
  }
  return out;
}

}  // namespace stackpack
