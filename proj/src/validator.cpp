#include "stackpack/validator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "stackpack/errors.hpp"
#include "stackpack/manipulation.hpp"

namespace stackpack {

namespace {

// Closest point on triangle (a, b, c) to p, by Voronoi region.
Vec3 closest_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + (d1 / (d1 - d3)) * ab;
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + (d2 / (d2 - d6)) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

// Segment-triangle crossing test used for surface intersection.
bool segment_hits_triangle(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 n = (b - a).cross(c - a);
  const double dp = n.dot(p - a), dq = n.dot(q - a);
  if ((dp > 0 && dq > 0) || (dp < 0 && dq < 0) || dp == dq) return false;
  const Vec3 x = p + (dp / (dp - dq)) * (q - p);
  const double s0 = n.dot((b - a).cross(x - a));
  const double s1 = n.dot((c - b).cross(x - b));
  const double s2 = n.dot((a - c).cross(x - c));
  return (s0 >= 0 && s1 >= 0 && s2 >= 0) || (s0 <= 0 && s1 <= 0 && s2 <= 0);
}

bool inside(const TriangleMesh& mesh, const Vec3& p) { return winding_number(mesh, p) > 0.5; }

}  // namespace

double winding_number(const TriangleMesh& mesh, const Vec3& p) {
  double total = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Vec3 a = mesh.corner(t, 0) - p, b = mesh.corner(t, 1) - p, c = mesh.corner(t, 2) - p;
    const double la = a.norm(), lb = b.norm(), lc = c.norm();
    const double num = a.dot(b.cross(c));
    const double den = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
    total += 2.0 * std::atan2(num, den);
  }
  return total / (4.0 * std::numbers::pi);
}

double surface_distance(const TriangleMesh& mesh, const Vec3& p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    best = std::min(best, (closest_on_triangle(p, mesh.corner(t, 0), mesh.corner(t, 1), mesh.corner(t, 2)) - p).norm());
  }
  return best;
}

bool surfaces_intersect(const TriangleMesh& a, const TriangleMesh& b) {
  if (!a.bounds().overlaps(b.bounds())) return false;
  auto edges_cross = [](const TriangleMesh& m, std::size_t s, const TriangleMesh& o, std::size_t t) {
    for (int k = 0; k < 3; ++k) {
      if (segment_hits_triangle(m.corner(s, k), m.corner(s, (k + 1) % 3), o.corner(t, 0), o.corner(t, 1),
                                o.corner(t, 2))) {
        return true;
      }
    }
    return false;
  };
  for (std::size_t s = 0; s < a.triangles.size(); ++s) {
    const Aabb ba{a.corner(s, 0).cwiseMin(a.corner(s, 1)).cwiseMin(a.corner(s, 2)),
                  a.corner(s, 0).cwiseMax(a.corner(s, 1)).cwiseMax(a.corner(s, 2))};
    for (std::size_t t = 0; t < b.triangles.size(); ++t) {
      const Aabb bb{b.corner(t, 0).cwiseMin(b.corner(t, 1)).cwiseMin(b.corner(t, 2)),
                    b.corner(t, 0).cwiseMax(b.corner(t, 1)).cwiseMax(b.corner(t, 2))};
      if (!ba.overlaps(bb)) continue;
      if (edges_cross(a, s, b, t) || edges_cross(b, t, a, s)) return true;
    }
  }
  return false;
}

double penetration_depth(const TriangleMesh& a, const TriangleMesh& b, int grid) {
  const Aabb ab = a.bounds(), bb = b.bounds();
  if (!ab.overlaps(bb)) return 0.0;
  const Aabb common{ab.min.cwiseMax(bb.min), ab.max.cwiseMin(bb.max)};
  std::vector<Vec3> samples;
  for (const TriangleMesh* m : {&a, &b}) {
    for (const Vec3& v : m->vertices) {
      if (common.contains(v)) samples.push_back(v);
    }
  }
  auto add_lattice = [&](int n) {
    const Vec3 ext = common.extent();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          samples.push_back(common.min +
                            Vec3((i + 0.5) / n * ext.x(), (j + 0.5) / n * ext.y(), (k + 0.5) / n * ext.z()));
        }
      }
    }
  };
  auto deepest = [&](std::size_t from) {
    double depth = 0.0;
    bool hit = false;
    for (std::size_t s = from; s < samples.size(); ++s) {
      const Vec3& p = samples[s];
      if (!inside(a, p) || !inside(b, p)) continue;
      hit = true;
      depth = std::max(depth, surface_distance(a, p) + surface_distance(b, p));
    }
    return std::pair{hit, depth};
  };
  add_lattice(std::max(1, grid));
  const auto [hit, depth] = deepest(0);
  if (hit || !surfaces_intersect(a, b)) return depth;
  // Crossing surfaces but no sample inside both: the overlap is thin; look
  // again on a lattice four times finer.
  const std::size_t mark = samples.size();
  add_lattice(4 * std::max(1, grid));
  return deepest(mark).second;
}

double containment_margin(const TriangleMesh& world_mesh, const Container& container) {
  double m = std::numeric_limits<double>::infinity();
  for (const Vec3& v : world_mesh.vertices) {
    m = std::min({m, v.x(), container.length - v.x(), v.y(), container.width - v.y(), v.z(),
                  container.height - v.z()});
  }
  return m;
}

ValidationReport validate_plan(const PackingPlan& plan, const std::vector<PackItem>& items,
                               const ValidationOptions& options) {
  const SearchConfig& cfg = plan.config;
  const double pen_tol = options.penetration_tol.value_or(cfg.resolution);
  ValidationReport report;
  Arrangement arrangement;
  std::vector<TriangleMesh> world;
  std::vector<double> masses;

  for (std::size_t k = 0; k < plan.steps.size(); ++k) {
    const PlanStep& step = plan.steps[k];
    if (step.item >= items.size()) throw ValidationError("plan step names unknown item " + std::to_string(step.item));
    const PackItem& item = items[step.item];
    StepReport r;
    r.step = k;
    r.item = step.item;
    r.item_id = step.item_id;
    auto fail = [&](const std::string& why) {
      if (r.pass) r.failure = why;
      r.pass = false;
    };

    const TriangleMesh placed = transform_mesh(item.mesh, step.transform);
    for (const TriangleMesh& other : world) {
      double d = penetration_depth(placed, other, options.sample_grid);
      r.penetration = std::max(r.penetration, d);
    }
    if (r.penetration > pen_tol) {
      std::ostringstream msg;
      msg << "overlap: penetration " << r.penetration << " m exceeds " << pen_tol;
      fail(msg.str());
    }

    r.containment_margin = containment_margin(placed, plan.container);
    if (r.containment_margin < -options.containment_tol) {
      std::ostringstream msg;
      msg << "containment: margin " << r.containment_margin << " m";
      fail(msg.str());
    }

    if (cfg.manipulation) {
      // Terrain from the already placed meshes, before this item arrives.
      const HeightMap terrain = container_heightmap(plan.container, world, cfg.resolution);
      bool ok = false;
      try {
        const auto grasps =
            grasp_candidates(item.mesh, step.transform, cfg.gripper, cfg.grasp_yaw_steps, cfg.resolution, cfg.resolution);
        ok = is_manip_feasible(step.transform, item.mesh, terrain, cfg.gripper, grasps);
      } catch (const NoGraspError&) {
        ok = false;
      }
      r.manipulable = ok;
    }

    arrangement.emplace_back(item.mesh, step.transform);
    world.push_back(placed);
    masses.push_back(item.mass);

    if (cfg.stability) {
      StabilityOptions so;
      so.mu = cfg.mu;
      so.scale = cfg.scale_factor;
      so.cluster_grid = cfg.cluster_grid;
      so.density = cfg.density;
      so.masses = masses;
      r.stability = is_stable(arrangement, plan.container, so).verdict;
      if (*r.stability != StabilityVerdict::Stable) fail(std::string("stability: ") + to_string(*r.stability));
    }
    if (r.manipulable && !*r.manipulable) fail("manipulation: no collision-free top-down grasp");

    if (!r.pass && report.pass) {
      report.pass = false;
      report.first_failure = k;
    }
    report.steps.push_back(r);
  }
  return report;
}

}  // namespace stackpack
