#include "stackpack/manipulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stackpack/errors.hpp"
#include "stackpack/raycast.hpp"

namespace stackpack {

namespace {

constexpr double kClearanceEps = 1e-9;

// Footprint membership of a point in the rotated (not translated) frame.
struct Footprint {
  const HeightMap* bottom;

  bool covers(double x, double y) const {
    const double res = bottom->resolution();
    const int i = static_cast<int>(std::floor((x - bottom->origin_x()) / res));
    const int j = static_cast<int>(std::floor((y - bottom->origin_y()) / res));
    if (i < 0 || j < 0 || i >= bottom->width() || j >= bottom->height()) return false;
    return std::isfinite(bottom->at(i, j));
  }
};

// Area of a length x width rectangle centered at (cx, cy) with its length
// along angle `yaw` that lies outside the footprint, estimated on a sample
// grid of spacing ~res/2.
double overhang_area(const Footprint& fp, double cx, double cy, double yaw, double length, double width,
                     double res) {
  const int nu = std::clamp(static_cast<int>(std::ceil(2.0 * length / res)), 1, 400);
  const int nv = std::clamp(static_cast<int>(std::ceil(2.0 * width / res)), 1, 400);
  const double c = std::cos(yaw), s = std::sin(yaw);
  int outside = 0;
  for (int a = 0; a < nu; ++a) {
    const double u = ((a + 0.5) / nu - 0.5) * length;
    for (int b = 0; b < nv; ++b) {
      const double v = ((b + 0.5) / nv - 0.5) * width;
      if (!fp.covers(cx + c * u - s * v, cy + s * u + c * v)) ++outside;
    }
  }
  return length * width * outside / (static_cast<double>(nu) * nv);
}

// Largest factor in [1, 64] by which the gripper can grow and still lie on the
// footprint; 0 when it overhangs already.
double growth_margin(const Footprint& fp, double cx, double cy, double yaw, const GripperModel& g, double res) {
  if (overhang_area(fp, cx, cy, yaw, g.length, g.width, res) > 0.0) return 0.0;
  double lo = 1.0, hi = 64.0;
  if (overhang_area(fp, cx, cy, yaw, hi * g.length, hi * g.width, res) == 0.0) return hi;
  for (int it = 0; it < 20; ++it) {
    const double mid = 0.5 * (lo + hi);
    (overhang_area(fp, cx, cy, yaw, mid * g.length, mid * g.width, res) == 0.0 ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

void GripperModel::validate() const {
  if (!(length > 0.0 && std::isfinite(length) && width > 0.0 && std::isfinite(width))) {
    throw ValidationError("gripper dimensions must be positive");
  }
}

std::vector<GraspCandidate> grasp_candidates(const TriangleMesh& mesh, const RigidTransform& placement,
                                             const GripperModel& gripper, std::size_t yaw_steps, double resolution,
                                             double contact_tol) {
  gripper.validate();
  if (yaw_steps < 1) throw ValidationError("yaw_steps must be at least 1");
  if (!(resolution > 0.0) || !(contact_tol >= 0.0)) throw ValidationError("bad grasp resolution or tolerance");
  const Mat3 R = placement.rotation();
  const ObjectHeightmaps maps = raycast_heightmaps(mesh, R, resolution);

  double top = -kInfinity;
  for (int j = 0; j < maps.top.height(); ++j) {
    for (int i = 0; i < maps.top.width(); ++i) {
      if (std::isfinite(maps.bottom(i, j))) top = std::max(top, maps.top(i, j));
    }
  }
  if (!std::isfinite(top)) throw NoGraspError("object has no top surface to grasp");
  double sx = 0.0, sy = 0.0;
  int n = 0;
  for (int j = 0; j < maps.top.height(); ++j) {
    for (int i = 0; i < maps.top.width(); ++i) {
      if (std::isfinite(maps.bottom(i, j)) && maps.top(i, j) >= top - contact_tol) {
        sx += maps.top.cell_center_x(i);
        sy += maps.top.cell_center_y(j);
        ++n;
      }
    }
  }
  if (n == 0) throw NoGraspError("object has no top surface to grasp");
  const Vec3 rotated(sx / n, sy / n, maps.base_z + top);
  const Vec3 point = R.transpose() * rotated;

  const Footprint fp{&maps.bottom};
  struct Ranked {
    GraspCandidate grasp;
    double margin;
    std::size_t k;
  };
  std::vector<Ranked> ranked;
  for (std::size_t k = 0; k < yaw_steps; ++k) {
    Ranked r;
    r.k = k;
    r.grasp.point = point;
    r.grasp.yaw = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(yaw_steps);
    r.grasp.overhang = overhang_area(fp, rotated.x(), rotated.y(), r.grasp.yaw, gripper.length, gripper.width,
                                     resolution);
    r.margin = growth_margin(fp, rotated.x(), rotated.y(), r.grasp.yaw, gripper, resolution);
    // Pose relative to the mesh frame: R^T * Rz(yaw) about the grasp point.
    const Eigen::Matrix3d rel = R.transpose() * Eigen::AngleAxisd(r.grasp.yaw, Vec3::UnitZ()).toRotationMatrix();
    const Vec3 e = rel.eulerAngles(2, 1, 0);
    r.grasp.pose.yaw = e[0];
    r.grasp.pose.roll = e[1];
    r.grasp.pose.pitch = e[2];
    r.grasp.pose.translation = point;
    ranked.push_back(r);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.grasp.overhang != b.grasp.overhang) return a.grasp.overhang < b.grasp.overhang;
    if (a.margin != b.margin) return a.margin > b.margin;
    return a.k < b.k;
  });
  std::vector<GraspCandidate> out;
  for (const Ranked& r : ranked) out.push_back(r.grasp);
  return out;
}

GripperFootprint gripper_footprint(const RigidTransform& placement, const GraspCandidate& grasp) {
  const Vec3 p = placement.apply(grasp.point);
  return {p.x(), p.y(), grasp.yaw, p.z()};
}

double max_terrain_under_gripper(const HeightMap& terrain, const GripperModel& gripper, const GripperFootprint& fp) {
  const double c = std::cos(fp.yaw), s = std::sin(fp.yaw);
  const double hu = 0.5 * gripper.length, hv = 0.5 * gripper.width;
  const double ex = std::abs(c) * hu + std::abs(s) * hv;
  const double ey = std::abs(s) * hu + std::abs(c) * hv;
  const double res = terrain.resolution();
  const double h = 0.5 * res - kClearanceEps;  // cells touching only at a border do not count
  const int i0 = std::max(0, static_cast<int>(std::floor((fp.cx - ex - terrain.origin_x()) / res)));
  const int i1 = std::min(terrain.width() - 1, static_cast<int>(std::floor((fp.cx + ex - terrain.origin_x()) / res)));
  const int j0 = std::max(0, static_cast<int>(std::floor((fp.cy - ey - terrain.origin_y()) / res)));
  const int j1 = std::min(terrain.height() - 1, static_cast<int>(std::floor((fp.cy + ey - terrain.origin_y()) / res)));
  double best = 0.0;
  for (int j = j0; j <= j1; ++j) {
    for (int i = i0; i <= i1; ++i) {
      // Separating axis test between the cell square and the gripper rectangle.
      const double dx = terrain.cell_center_x(i) - fp.cx;
      const double dy = terrain.cell_center_y(j) - fp.cy;
      if (std::abs(dx) >= ex + h || std::abs(dy) >= ey + h) continue;
      const double du = c * dx + s * dy;
      const double dv = -s * dx + c * dy;
      const double cell_u = h * (std::abs(c) + std::abs(s));
      if (std::abs(du) >= hu + cell_u || std::abs(dv) >= hv + cell_u) continue;
      const double z = terrain(i, j);
      if (std::isfinite(z)) best = std::max(best, z);
    }
  }
  return best;
}

bool is_manip_feasible(const RigidTransform& placement, const TriangleMesh& /*mesh*/, const HeightMap& terrain,
                       const GripperModel& gripper, const std::vector<GraspCandidate>& grasps,
                       const GraspCheck& external_check) {
  for (const GraspCandidate& g : grasps) {
    const GripperFootprint fp = gripper_footprint(placement, g);
    if (max_terrain_under_gripper(terrain, gripper, fp) > fp.z + kClearanceEps) continue;
    if (external_check && !external_check(placement, g)) continue;
    return true;
  }
  return false;
}

}  // namespace stackpack
