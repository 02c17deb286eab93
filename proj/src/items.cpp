#include "stackpack/items.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "stackpack/errors.hpp"

namespace stackpack {

namespace {

void require_positive(std::initializer_list<double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v) || v <= 0.0) throw ValidationError(std::string(what) + " dimensions must be positive");
  }
}

// Extrudes a CCW polygon in the XZ plane along +Y. `cap` triangulates the
// polygon with indices into its vertex list.
TriangleMesh extrude_xz(const std::vector<std::array<double, 2>>& profile, const std::vector<Triangle>& cap,
                        double depth) {
  TriangleMesh m;
  const auto n = static_cast<std::uint32_t>(profile.size());
  for (const auto& p : profile) m.vertices.emplace_back(p[0], 0.0, p[1]);
  for (const auto& p : profile) m.vertices.emplace_back(p[0], depth, p[1]);
  // The profile is CCW seen from -Y, so the y=0 cap keeps its winding.
  for (const Triangle& t : cap) {
    m.triangles.push_back({t[0], t[1], t[2]});
    m.triangles.push_back({t[0] + n, t[2] + n, t[1] + n});
  }
  for (std::uint32_t k = 0; k < n; ++k) {
    const std::uint32_t a = k;
    const std::uint32_t b = (k + 1) % n;
    m.triangles.push_back({a, b + n, b});
    m.triangles.push_back({a, a + n, b + n});
  }
  return m;
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double draw(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit(rng); }

}  // namespace

ItemKind parse_item_kind(const std::string& name) {
  if (name == "box") return ItemKind::Box;
  if (name == "lshape") return ItemKind::LShape;
  if (name == "bowl") return ItemKind::Bowl;
  if (name == "wedge") return ItemKind::Wedge;
  throw ValidationError("unknown item kind '" + name + "'");
}

std::string to_string(ItemKind kind) {
  switch (kind) {
    case ItemKind::Box: return "box";
    case ItemKind::LShape: return "lshape";
    case ItemKind::Bowl: return "bowl";
    case ItemKind::Wedge: return "wedge";
  }
  return "box";
}

TriangleMesh make_box(double a, double b, double c) {
  require_positive({a, b, c}, "box");
  return extrude_xz({{0, 0}, {a, 0}, {a, c}, {0, c}}, {{0, 1, 2}, {0, 2, 3}}, b);
}

TriangleMesh make_lshape(double a, double b, double c) {
  require_positive({a, b, c}, "lshape");
  // Fan from the reflex corner (index 3), which sees every other vertex.
  return extrude_xz({{0, 0}, {a, 0}, {a, c / 2}, {a / 2, c / 2}, {a / 2, c}, {0, c}},
                    {{3, 4, 5}, {3, 5, 0}, {3, 0, 1}, {3, 1, 2}}, b);
}

TriangleMesh make_wedge(double a, double b, double c) {
  require_positive({a, b, c}, "wedge");
  return extrude_xz({{0, 0}, {a, 0}, {0, c}}, {{0, 1, 2}}, b);
}

TriangleMesh make_bowl(double R, double r_in, double h, double floor_thickness, int segments) {
  require_positive({R, r_in, h}, "bowl");
  const double t = floor_thickness < 0.0 ? 0.4 * h : floor_thickness;
  if (r_in >= R) throw ValidationError("bowl inner radius must be below the outer radius");
  if (!(t > 0.0) || t >= h) throw ValidationError("bowl floor thickness must lie in (0, height)");
  if (segments < 3) throw ValidationError("bowl needs at least 3 segments");
  const double wall = R - r_in;
  const double floor_radius = R / 2 + (R / 2) * (t / h) - wall;
  if (floor_radius <= 0.0) throw ValidationError("bowl wall too thick for its floor");

  // Profile rings from the outside bottom, over the rim, down to the inner floor.
  const std::array<std::array<double, 2>, 4> rings{{{R / 2, 0.0}, {R, h}, {r_in, h}, {floor_radius, t}}};
  TriangleMesh m;
  m.vertices.emplace_back(0.0, 0.0, 0.0);
  m.vertices.emplace_back(0.0, 0.0, t);
  const auto n = static_cast<std::uint32_t>(segments);
  for (const auto& [r, z] : rings) {
    for (std::uint32_t k = 0; k < n; ++k) {
      const double a = 2.0 * std::numbers::pi * k / n;
      m.vertices.emplace_back(r * std::cos(a), r * std::sin(a), z);
    }
  }
  auto ring = [n](std::uint32_t r, std::uint32_t k) { return 2 + r * n + (k % n); };
  for (std::uint32_t k = 0; k < n; ++k) {
    m.triangles.push_back({0, ring(0, k + 1), ring(0, k)});
    for (std::uint32_t r = 0; r < 3; ++r) {
      m.triangles.push_back({ring(r, k), ring(r, k + 1), ring(r + 1, k + 1)});
      m.triangles.push_back({ring(r, k), ring(r + 1, k + 1), ring(r + 1, k)});
    }
    m.triangles.push_back({1, ring(3, k), ring(3, k + 1)});
  }
  return m;
}

std::vector<double> random_item_params(ItemKind kind, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  switch (kind) {
    case ItemKind::Box:
    case ItemKind::LShape:
    case ItemKind::Wedge:
      return {draw(rng, 0.04, 0.12), draw(rng, 0.04, 0.12), draw(rng, 0.04, 0.12)};
    case ItemKind::Bowl: {
      const double R = draw(rng, 0.04, 0.08);
      const double wall = draw(rng, 0.006, 0.012);
      const double h = draw(rng, 0.03, 0.06);
      return {R, R - wall, h};
    }
  }
  return {};
}

TriangleMesh generate_test_item(ItemKind kind, const std::vector<double>& params, std::uint64_t seed) {
  const std::vector<double> p = params.empty() ? random_item_params(kind, seed) : params;
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (p.size() < lo || p.size() > hi) {
      throw ValidationError(to_string(kind) + " expects " + std::to_string(lo) +
                            (lo == hi ? "" : "-" + std::to_string(hi)) + " parameters");
    }
  };
  switch (kind) {
    case ItemKind::Box: need(3, 3); return make_box(p[0], p[1], p[2]);
    case ItemKind::LShape: need(3, 3); return make_lshape(p[0], p[1], p[2]);
    case ItemKind::Wedge: need(3, 3); return make_wedge(p[0], p[1], p[2]);
    case ItemKind::Bowl: need(3, 4); return make_bowl(p[0], p[1], p[2], p.size() == 4 ? p[3] : -1.0);
  }
  throw ValidationError("unknown item kind");
}

}  // namespace stackpack
