#include "stackpack/stability.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <tuple>

#include "stackpack/errors.hpp"

namespace stackpack {

namespace {

constexpr double kPlaneEps = 1e-12;

using Tri = std::array<Vec3, 3>;

Tri corners(const TriangleMesh& m, std::size_t t) { return {m.corner(t, 0), m.corner(t, 1), m.corner(t, 2)}; }

Aabb tri_bounds(const Tri& t) {
  return {t[0].cwiseMin(t[1]).cwiseMin(t[2]), t[0].cwiseMax(t[1]).cwiseMax(t[2])};
}

// Section of a triangle by the zero set of the signed distances d. Returns
// the number of distinct section points (0, 1 or 2).
int plane_section(const Tri& p, const std::array<double, 3>& d, Vec3& s0, Vec3& s1) {
  std::array<Vec3, 4> pts;
  int n = 0;
  for (int k = 0; k < 3; ++k) {
    const int l = (k + 1) % 3;
    if (d[k] == 0.0) pts[n++] = p[k];
    if ((d[k] < 0.0 && d[l] > 0.0) || (d[k] > 0.0 && d[l] < 0.0)) {
      pts[n++] = p[k] + (d[k] / (d[k] - d[l])) * (p[l] - p[k]);
    }
  }
  if (n == 0) return 0;
  s0 = pts[0];
  s1 = pts[n - 1];
  return n == 1 ? 1 : 2;
}

std::array<double, 3> distances(const Tri& t, const Vec3& n, const Vec3& origin) {
  std::array<double, 3> d{};
  for (int k = 0; k < 3; ++k) {
    d[k] = n.dot(t[k] - origin);
    if (std::abs(d[k]) < kPlaneEps) d[k] = 0.0;
  }
  return d;
}

bool one_side(const std::array<double, 3>& d) {
  return (d[0] > 0 && d[1] > 0 && d[2] > 0) || (d[0] < 0 && d[1] < 0 && d[2] < 0);
}

double depth_behind(const std::array<double, 3>& d) { return std::max({0.0, -d[0], -d[1], -d[2]}); }

struct Crossing {
  Vec3 p;
  Vec3 q;
  Vec3 normal;  // from the first triangle's body into the second's
};

// Intersection segment of two non-coplanar triangles. The normal comes from
// the face the other triangle penetrates least; crossings where both
// penetrate deeper than `max_depth` are edge-on-edge grazes and are dropped.
bool crossing(const Tri& ta, const Tri& tb, double max_depth, Crossing& out) {
  const Vec3 na = (ta[1] - ta[0]).cross(ta[2] - ta[0]);
  const Vec3 nb = (tb[1] - tb[0]).cross(tb[2] - tb[0]);
  const double la = na.norm(), lb = nb.norm();
  if (la == 0.0 || lb == 0.0) return false;
  const Vec3 ua = na / la, ub = nb / lb;
  const auto db = distances(tb, ua, ta[0]);
  if (one_side(db)) return false;
  const auto da = distances(ta, ub, tb[0]);
  if (one_side(da)) return false;
  if (db[0] == 0.0 && db[1] == 0.0 && db[2] == 0.0) return false;  // coplanar
  const Vec3 dir = ua.cross(ub);
  if (dir.norm() < 1e-12) return false;
  Vec3 a0, a1, b0, b1;
  if (plane_section(ta, da, a0, a1) == 0 || plane_section(tb, db, b0, b1) == 0) return false;
  double ta0 = dir.dot(a0), ta1 = dir.dot(a1), tb0 = dir.dot(b0), tb1 = dir.dot(b1);
  if (ta0 > ta1) {
    std::swap(ta0, ta1);
    std::swap(a0, a1);
  }
  if (tb0 > tb1) {
    std::swap(tb0, tb1);
    std::swap(b0, b1);
  }
  const double lo = std::max(ta0, tb0), hi = std::min(ta1, tb1);
  if (lo > hi) return false;
  out.p = ta0 >= tb0 ? a0 : b0;
  out.q = ta1 <= tb1 ? a1 : b1;
  const double depth_b = depth_behind(db);  // tb behind the face of ta
  const double depth_a = depth_behind(da);
  if (std::min(depth_a, depth_b) > max_depth) return false;
  out.normal = depth_b <= depth_a ? ua : Vec3(-ub);
  return true;
}

void push_segment(std::vector<Contact>& out, const Vec3& p, const Vec3& q, const Vec3& normal, double mu, int a,
                  int b) {
  out.push_back({p, normal, mu, a, b});
  if ((q - p).squaredNorm() > 0.0) {
    out.push_back({0.5 * (p + q), normal, mu, a, b});
    out.push_back({q, normal, mu, a, b});
  }
}

// Clips segment p-q to lo <= x <= hi on the two in-plane axes (Liang-Barsky).
bool clip_segment(Vec3& p, Vec3& q, int ax0, int ax1, const double lo[2], const double hi[2]) {
  double t0 = 0.0, t1 = 1.0;
  const Vec3 d = q - p;
  const int axes[2] = {ax0, ax1};
  for (int k = 0; k < 2; ++k) {
    const int ax = axes[k];
    const double pk[2] = {-d[ax], d[ax]};
    const double qk[2] = {p[ax] - lo[k], hi[k] - p[ax]};
    for (int s = 0; s < 2; ++s) {
      if (pk[s] == 0.0) {
        if (qk[s] < 0.0) return false;
      } else {
        const double r = qk[s] / pk[s];
        if (pk[s] < 0.0) t0 = std::max(t0, r);
        else t1 = std::min(t1, r);
      }
    }
  }
  if (t0 > t1) return false;
  const Vec3 p0 = p;
  p = p0 + t0 * d;
  q = p0 + t1 * d;
  return true;
}

void tangent_frame(const Vec3& n, Vec3& t1, Vec3& t2) {
  // Gram-Schmidt against the global axis least aligned with n.
  int axis = 0;
  for (int k = 1; k < 3; ++k) {
    if (std::abs(n[k]) < std::abs(n[axis])) axis = k;
  }
  const Vec3 e = Vec3::Unit(axis);
  t1 = (e - e.dot(n) * n).normalized();
  t2 = n.cross(t1);
}

}  // namespace

const char* to_string(StabilityVerdict v) {
  switch (v) {
    case StabilityVerdict::Stable: return "stable";
    case StabilityVerdict::Unstable: return "unstable";
    case StabilityVerdict::Indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

ScaledBody prepare_body(const TriangleMesh& world_mesh, int id, double scale, double density, double mass) {
  ScaledBody body;
  body.state.id = id;
  body.state.com = center_of_mass(world_mesh);
  body.state.mass = mass > 0.0 ? mass : density * solid_volume(world_mesh);
  if (!(body.state.mass > 0.0)) throw ValidationError("body " + std::to_string(id) + " has no mass");
  body.mesh = scale_mesh(world_mesh, body.state.com, scale);
  body.bounds = body.mesh.bounds();
  body.triangle_bounds.reserve(body.mesh.triangles.size());
  double radius = 0.0;
  for (const Vec3& v : world_mesh.vertices) radius = std::max(radius, (v - body.state.com).norm());
  body.inflation = (scale - 1.0) * radius;
  for (std::size_t t = 0; t < body.mesh.triangles.size(); ++t) {
    body.triangle_bounds.push_back(tri_bounds(corners(body.mesh, t)));
  }
  return body;
}

std::vector<Contact> body_contacts(const ScaledBody& a, const ScaledBody& b, double mu) {
  std::vector<Contact> out;
  if (!a.bounds.overlaps(b.bounds)) return out;
  const Aabb common{a.bounds.min.cwiseMax(b.bounds.min), a.bounds.max.cwiseMin(b.bounds.max)};
  std::vector<std::size_t> ta, tb;
  for (std::size_t t = 0; t < a.triangle_bounds.size(); ++t) {
    if (a.triangle_bounds[t].overlaps(common)) ta.push_back(t);
  }
  for (std::size_t t = 0; t < b.triangle_bounds.size(); ++t) {
    if (b.triangle_bounds[t].overlaps(common)) tb.push_back(t);
  }
  const double max_depth = a.inflation + b.inflation + 1e-12;
  Crossing c;
  for (std::size_t i : ta) {
    const Tri pa = corners(a.mesh, i);
    for (std::size_t j : tb) {
      if (!a.triangle_bounds[i].overlaps(b.triangle_bounds[j])) continue;
      if (crossing(pa, corners(b.mesh, j), max_depth, c)) {
        push_segment(out, c.p, c.q, c.normal, mu, a.state.id, b.state.id);
      }
    }
  }
  return out;
}

std::vector<Contact> container_contacts(const ScaledBody& body, const Container& container) {
  std::vector<Contact> out;
  struct Plane {
    int axis;
    double offset;
    double sign;  // inward normal = sign * e_axis
  };
  const Plane planes[] = {{2, 0.0, 1.0},
                          {0, 0.0, 1.0},
                          {0, container.length, -1.0},
                          {1, 0.0, 1.0},
                          {1, container.width, -1.0}};
  const double dims[3] = {container.length, container.width, container.height};
  for (const Plane& pl : planes) {
    const bool beyond = pl.sign > 0 ? body.bounds.min[pl.axis] <= pl.offset : body.bounds.max[pl.axis] >= pl.offset;
    if (!beyond) continue;
    const Vec3 n = pl.sign * Vec3::Unit(pl.axis);
    const int ax0 = (pl.axis + 1) % 3, ax1 = (pl.axis + 2) % 3;
    // The inflated body pokes through neighbouring walls by up to its
    // inflation; clip against the grown rectangle, then clamp back onto it.
    const double grow = body.inflation + 1e-12;
    const double lo[2] = {-grow, -grow};
    const double hi[2] = {dims[ax0] + grow, dims[ax1] + grow};
    for (std::size_t t = 0; t < body.mesh.triangles.size(); ++t) {
      const Aabb& tb = body.triangle_bounds[t];
      if (tb.min[pl.axis] > pl.offset || tb.max[pl.axis] < pl.offset) continue;
      const Tri tri = corners(body.mesh, t);
      std::array<double, 3> d{};
      for (int k = 0; k < 3; ++k) d[k] = tri[k][pl.axis] - pl.offset;
      if (d[0] == 0.0 && d[1] == 0.0 && d[2] == 0.0) continue;
      Vec3 p, q;
      if (plane_section(tri, d, p, q) == 0) continue;
      p[pl.axis] = q[pl.axis] = pl.offset;
      if (!clip_segment(p, q, ax0, ax1, lo, hi)) continue;
      for (Vec3* v : {&p, &q}) {
        (*v)[ax0] = std::clamp((*v)[ax0], 0.0, dims[ax0]);
        (*v)[ax1] = std::clamp((*v)[ax1], 0.0, dims[ax1]);
      }
      push_segment(out, p, q, n, container.mu_wall, kContainerBody, body.state.id);
    }
  }
  return out;
}

// Dominant signed axis of a normal (0..5). Keeps, e.g., floor and wall
// contacts in a corner voxel from being averaged into a diagonal normal.
static int normal_sector(const Vec3& n) {
  Eigen::Index axis = 0;
  n.cwiseAbs().maxCoeff(&axis);
  return 2 * static_cast<int>(axis) + (n[axis] < 0.0 ? 1 : 0);
}

std::vector<Contact> cluster_contacts(const std::vector<Contact>& contacts, double grid) {
  if (!(grid > 0.0)) throw ValidationError("contact cluster grid must be positive");
  using Key = std::tuple<int, int, long long, long long, long long, int>;
  struct Acc {
    Vec3 point = Vec3::Zero();
    Vec3 normal = Vec3::Zero();
    Vec3 first_normal = Vec3::Zero();
    double mu = 0.0;
    std::size_t count = 0;
  };
  std::map<Key, Acc> cells;
  for (const Contact& c : contacts) {
    const Key key{c.body_a, c.body_b, static_cast<long long>(std::floor(c.point.x() / grid)),
                  static_cast<long long>(std::floor(c.point.y() / grid)),
                  static_cast<long long>(std::floor(c.point.z() / grid)), normal_sector(c.normal)};
    Acc& acc = cells[key];
    if (acc.count == 0) {
      acc.first_normal = c.normal;
      acc.mu = c.mu;
    }
    acc.point += c.point;
    acc.normal += c.normal;
    acc.mu = std::min(acc.mu, c.mu);
    ++acc.count;
  }
  std::vector<Contact> out;
  out.reserve(cells.size());
  for (const auto& [key, acc] : cells) {
    Contact c;
    c.body_a = std::get<0>(key);
    c.body_b = std::get<1>(key);
    c.point = acc.point / static_cast<double>(acc.count);
    const double len = acc.normal.norm();
    c.normal = len > 1e-9 ? Vec3(acc.normal / len) : acc.first_normal;
    c.mu = acc.mu;
    out.push_back(c);
  }
  return out;
}

std::vector<Contact> detect_contacts(const Arrangement& arrangement, const Container& container, double scale,
                                     double cluster_grid, double mu) {
  if (!(scale > 1.0)) throw ValidationError("contact scale factor must exceed 1");
  std::vector<ScaledBody> bodies;
  bodies.reserve(arrangement.size());
  for (std::size_t i = 0; i < arrangement.size(); ++i) {
    bodies.push_back(prepare_body(transform_mesh(arrangement[i].first, arrangement[i].second),
                                  static_cast<int>(i) + 1, scale, kDefaultDensity));
  }
  std::vector<Contact> raw;
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    const auto wall = container_contacts(bodies[i], container);
    raw.insert(raw.end(), wall.begin(), wall.end());
    for (std::size_t j = 0; j < i; ++j) {
      const auto c = body_contacts(bodies[j], bodies[i], mu);
      raw.insert(raw.end(), c.begin(), c.end());
    }
  }
  return cluster_contacts(raw, cluster_grid);
}

StabilityResult solve_equilibrium(const EquilibriumProblem& problem, double tol, std::ostream* dump) {
  if (problem.cone_sides < 3) throw ValidationError("friction pyramid needs at least 3 sides");
  StabilityResult result;
  result.contacts = problem.contacts;
  std::map<int, std::size_t> row_of;
  double m_ref = 0.0;
  for (std::size_t i = 0; i < problem.bodies.size(); ++i) {
    const BodyState& b = problem.bodies[i];
    if (!(b.mass > 0.0)) throw ValidationError("body mass must be positive");
    if (b.id == kContainerBody) throw ValidationError("the container is not a balanced body");
    row_of[b.id] = i;
    m_ref = std::max(m_ref, b.mass);
  }
  for (const Contact& c : problem.contacts) {
    if (c.body_a == c.body_b) throw ValidationError("contact between a body and itself");
    for (int id : {c.body_a, c.body_b}) {
      if (id != kContainerBody && !row_of.count(id)) throw ValidationError("contact references unknown body");
    }
  }
  if (problem.bodies.empty()) {
    result.verdict = StabilityVerdict::Stable;
    result.forces.assign(problem.contacts.size(), Vec3::Zero());
    return result;
  }

  // Length reference for lever arms.
  double l_ref = 0.0;
  for (const Contact& c : problem.contacts) {
    for (int id : {c.body_a, c.body_b}) {
      if (id != kContainerBody) l_ref = std::max(l_ref, (c.point - problem.bodies[row_of[id]].com).norm());
    }
  }
  if (l_ref <= 0.0) l_ref = 1.0;

  const int S = problem.cone_sides;
  const auto K = static_cast<Eigen::Index>(problem.contacts.size());
  const auto N = static_cast<Eigen::Index>(problem.bodies.size());
  // Generators of the cone edges, per contact, in force units of m_ref * g.
  std::vector<std::vector<Vec3>> edges(static_cast<std::size_t>(K));
  for (Eigen::Index k = 0; k < K; ++k) {
    const Contact& c = problem.contacts[static_cast<std::size_t>(k)];
    Vec3 t1, t2;
    tangent_frame(c.normal, t1, t2);
    for (int s = 0; s < S; ++s) {
      const double a = (2 * s + 1) * std::numbers::pi / S;
      edges[static_cast<std::size_t>(k)].push_back(c.normal + c.mu * (std::cos(a) * t1 + std::sin(a) * t2));
    }
  }

  LinearProgram lp;
  lp.variables = static_cast<std::size_t>(K * S);
  lp.A = Eigen::MatrixXd::Zero(6 * N, K * S);
  lp.b = Eigen::VectorXd::Zero(6 * N);
  lp.G = Eigen::MatrixXd(0, K * S);
  lp.h = Eigen::VectorXd(0);
  lp.nonnegative.assign(lp.variables, true);
  for (Eigen::Index i = 0; i < N; ++i) lp.b[6 * i + 2] = problem.bodies[static_cast<std::size_t>(i)].mass / m_ref;
  for (Eigen::Index k = 0; k < K; ++k) {
    const Contact& c = problem.contacts[static_cast<std::size_t>(k)];
    for (auto [id, sign] : {std::pair{c.body_b, 1.0}, std::pair{c.body_a, -1.0}}) {
      if (id == kContainerBody) continue;
      const Eigen::Index row = 6 * static_cast<Eigen::Index>(row_of[id]);
      const Vec3 lever = (c.point - problem.bodies[row_of[id]].com) / l_ref;
      for (int s = 0; s < S; ++s) {
        const Vec3& e = edges[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)];
        const Vec3 torque = lever.cross(e);
        for (int r = 0; r < 3; ++r) {
          lp.A(row + r, k * S + s) += sign * e[r];
          lp.A(row + 3 + r, k * S + s) += sign * torque[r];
        }
      }
    }
  }
  if (dump) dump_lp(*dump, lp);
  result.lp = solve_feasibility(lp, tol);
  switch (result.lp.status) {
    case LpStatus::Feasible: result.verdict = StabilityVerdict::Stable; break;
    case LpStatus::Infeasible: result.verdict = StabilityVerdict::Unstable; break;
    case LpStatus::Indeterminate: result.verdict = StabilityVerdict::Indeterminate; break;
  }
  if (result.stable()) {
    result.forces.assign(static_cast<std::size_t>(K), Vec3::Zero());
    for (Eigen::Index k = 0; k < K; ++k) {
      for (int s = 0; s < S; ++s) {
        result.forces[static_cast<std::size_t>(k)] +=
            m_ref * kGravity * result.lp.x[k * S + s] * edges[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)];
      }
    }
  }
  return result;
}

StabilityResult is_stable(const Arrangement& arrangement, const Container& container,
                          const StabilityOptions& options) {
  if (!(options.scale > 1.0)) throw ValidationError("contact scale factor must exceed 1");
  std::vector<ScaledBody> bodies;
  EquilibriumProblem problem;
  problem.cone_sides = options.cone_sides;
  std::vector<Contact> raw;
  for (std::size_t i = 0; i < arrangement.size(); ++i) {
    const double mass = i < options.masses.size() ? options.masses[i] : 0.0;
    bodies.push_back(prepare_body(transform_mesh(arrangement[i].first, arrangement[i].second),
                                  static_cast<int>(i) + 1, options.scale, options.density, mass));
    problem.bodies.push_back(bodies.back().state);
    const auto wall = container_contacts(bodies[i], container);
    raw.insert(raw.end(), wall.begin(), wall.end());
    for (std::size_t j = 0; j < i; ++j) {
      const auto c = body_contacts(bodies[j], bodies[i], options.mu);
      raw.insert(raw.end(), c.begin(), c.end());
    }
  }
  problem.contacts = cluster_contacts(raw, options.cluster_grid);
  return solve_equilibrium(problem, options.tol, options.dump);
}

}  // namespace stackpack
