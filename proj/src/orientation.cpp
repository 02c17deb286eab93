#include "stackpack/orientation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stackpack/convex_hull.hpp"
#include "stackpack/errors.hpp"

namespace stackpack {

namespace {

constexpr double kMergeAngle = 1e-6;
constexpr double kInsideMargin = 1e-9;

struct Facet {
  Vec3 normal;
  std::vector<std::size_t> triangles;
};

double cross2(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Monotone chain; counter-clockwise, collinear points dropped.
std::vector<Eigen::Vector2d> hull_2d(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  if (pts.size() < 3) return pts;
  std::vector<Eigen::Vector2d> h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross2(h[k - 2], h[k - 1], p) <= 0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross2(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

double clean_angle(double a) {
  if (a <= -std::numbers::pi) a += 2 * std::numbers::pi;
  if (a > std::numbers::pi) a -= 2 * std::numbers::pi;
  return a == 0.0 ? 0.0 : a;  // folds -0.0
}

}  // namespace

void rpy_for_down_normal(const Vec3& n, double& roll, double& pitch) {
  const double s = std::hypot(n.y(), n.z());
  pitch = s < 1e-12 ? 0.0 : std::atan2(-n.y(), -n.z());
  roll = std::atan2(n.x(), s);
  roll = clean_angle(roll);
  pitch = clean_angle(pitch);
}

double triangle_solid_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double la = a.norm(), lb = b.norm(), lc = c.norm();
  const double num = a.dot(b.cross(c));
  const double den = la * lb * lc + a.dot(b) * lc + a.dot(c) * lb + b.dot(c) * la;
  return 2.0 * std::atan2(num, den);
}

OrientationSet planar_stable_orientations(const TriangleMesh& mesh, std::size_t top_n) {
  if (top_n < 1) throw ValidationError("top_n must be at least 1");
  const TriangleMesh hull = convex_hull(mesh);
  const Vec3 com = center_of_mass(mesh);

  std::vector<Facet> facets;
  for (std::size_t t = 0; t < hull.triangles.size(); ++t) {
    const Vec3 n = triangle_normal(hull.corner(t, 0), hull.corner(t, 1), hull.corner(t, 2));
    auto it = std::find_if(facets.begin(), facets.end(), [&](const Facet& f) {
      return std::atan2(f.normal.cross(n).norm(), f.normal.dot(n)) < kMergeAngle;
    });
    if (it == facets.end()) {
      facets.push_back({n, {t}});
    } else {
      it->triangles.push_back(t);
    }
  }

  struct Scored {
    StableOrientation o;
    double omega;
  };
  std::vector<Scored> stable;
  double total = 0.0;
  for (const Facet& f : facets) {
    const Vec3 n = f.normal;
    const Vec3 u = n.unitOrthogonal();
    const Vec3 v = n.cross(u);
    std::vector<Eigen::Vector2d> pts;
    double omega = 0.0;
    for (std::size_t t : f.triangles) {
      for (int k = 0; k < 3; ++k) pts.emplace_back(u.dot(hull.corner(t, k)), v.dot(hull.corner(t, k)));
      omega += std::abs(triangle_solid_angle(hull.corner(t, 0) - com, hull.corner(t, 1) - com,
                                             hull.corner(t, 2) - com));
    }
    const std::vector<Eigen::Vector2d> poly = hull_2d(pts);
    const Eigen::Vector2d c(u.dot(com), v.dot(com));
    bool inside = poly.size() >= 3;
    for (std::size_t k = 0; inside && k < poly.size(); ++k) {
      const Eigen::Vector2d& a = poly[k];
      const Eigen::Vector2d& b = poly[(k + 1) % poly.size()];
      inside = cross2(a, b, c) / (b - a).norm() > kInsideMargin;
    }
    if (!inside) continue;
    Scored s;
    rpy_for_down_normal(n, s.o.roll, s.o.pitch);
    s.o.facet_normal = n;
    s.omega = omega;
    total += omega;
    stable.push_back(s);
  }

  OrientationSet out;
  out.available = stable.size();
  for (Scored& s : stable) s.o.probability = total > 0.0 ? s.omega / total : 0.0;
  std::sort(stable.begin(), stable.end(), [](const Scored& a, const Scored& b) {
    const double pa = std::round(a.o.probability * 1e9), pb = std::round(b.o.probability * 1e9);
    if (pa != pb) return pa > pb;
    if (a.o.roll != b.o.roll) return a.o.roll < b.o.roll;
    return a.o.pitch < b.o.pitch;
  });
  for (std::size_t k = 0; k < stable.size() && k < top_n; ++k) out.orientations.push_back(stable[k].o);
  return out;
}

}  // namespace stackpack
