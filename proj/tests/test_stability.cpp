#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "stackpack/errors.hpp"
#include "stackpack/items.hpp"
#include "stackpack/stability.hpp"
#include "test_support.hpp"

using namespace stackpack;
using stackpack::testing::box_mesh;

namespace {

const Container kBigBox{1.0, 1.0, 1.0, 0.7};

std::pair<TriangleMesh, RigidTransform> cube_at(double x, double y, double z, double edge = 0.1) {
  RigidTransform t;
  t.translation = Vec3(x, y, z);
  return {box_mesh(Vec3::Zero(), Vec3::Constant(edge)), t};
}

double cross2(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Signed distance of q to the boundary of the convex hull of pts (positive
// inside), by the minimum over hull edges.
double support_polygon_margin(std::vector<Eigen::Vector2d> pts, const Eigen::Vector2d& q) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
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
  if (h.size() < 3) return -1.0;
  double m = 1e300;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const Eigen::Vector2d a = h[i], b = h[(i + 1) % h.size()];
    m = std::min(m, cross2(a, b, q) / (b - a).norm());
  }
  return m;
}

}  // namespace

TEST(Contacts, CubeOnFloor) {
  const auto contacts = detect_contacts({cube_at(0.3, 0.3, 0.0)}, kBigBox, 1.03, 0.01);
  ASSERT_GE(contacts.size(), 4u);
  for (const Contact& c : contacts) {
    EXPECT_LT((c.normal - Vec3::UnitZ()).norm(), 1e-9);
    EXPECT_EQ(c.body_a, kContainerBody);
    EXPECT_EQ(c.body_b, 1);
    EXPECT_NEAR(c.point.z(), 0.0, 1e-12);
  }
}

TEST(Contacts, SeparatedCubesHaveNone) {
  const auto contacts = detect_contacts({cube_at(0.2, 0.2, 0.3), cube_at(0.35, 0.2, 0.3)}, kBigBox, 1.03, 0.01);
  EXPECT_TRUE(contacts.empty());
}

TEST(Contacts, StackedCubes) {
  const auto contacts = detect_contacts({cube_at(0.3, 0.3, 0.0), cube_at(0.3, 0.3, 0.1)}, kBigBox, 1.03, 0.01);
  int pair = 0, floor = 0;
  for (const Contact& c : contacts) {
    EXPECT_LT(c.body_a, c.body_b);
    EXPECT_NEAR(std::abs(c.normal.norm()), 1.0, 1e-9);
    if (c.body_a == 1 && c.body_b == 2) {
      ++pair;
      EXPECT_LT((c.normal - Vec3::UnitZ()).norm(), 1e-9) << c.point.transpose();
    } else {
      ++floor;
      EXPECT_EQ(c.body_a, kContainerBody);
      EXPECT_EQ(c.body_b, 1);
    }
  }
  EXPECT_GE(pair, 4);
  EXPECT_GE(floor, 4);
}

TEST(Contacts, WallContactsPointInward) {
  const auto contacts = detect_contacts({cube_at(0.0, 0.9, 0.0)}, kBigBox, 1.03, 0.01);
  bool x0 = false, yw = false;
  for (const Contact& c : contacts) {
    if ((c.normal - Vec3::UnitX()).norm() < 1e-12) x0 = true;
    if ((c.normal + Vec3::UnitY()).norm() < 1e-12) yw = true;
    EXPECT_GE(c.point.x(), 0.0);
    EXPECT_LE(c.point.y(), 1.0);
  }
  EXPECT_TRUE(x0);
  EXPECT_TRUE(yw);
}

TEST(Cluster, CoincidentMerge) {
  std::vector<Contact> cs(100, Contact{Vec3(0.1, 0.2, 0.3), Vec3::UnitZ(), 0.5, 0, 1});
  EXPECT_EQ(cluster_contacts(cs, 0.01).size(), 1u);
}

TEST(Cluster, DistinctVoxelsAndPairs) {
  const Contact a{Vec3(0.005, 0.005, 0.005), Vec3::UnitZ(), 0.5, 0, 1};
  Contact b = a;
  b.point.x() += 0.02;
  EXPECT_EQ(cluster_contacts({a, b}, 0.01).size(), 2u);
  Contact c = a;
  c.body_a = 1;
  c.body_b = 2;
  EXPECT_EQ(cluster_contacts({a, c}, 0.01).size(), 2u);
}

TEST(Cluster, CentroidAndNormal) {
  const Vec3 tilted = Vec3(0.2, 0, 1).normalized();
  const Contact a{Vec3(0.001, 0.001, 0.0), Vec3(0, 0, 1), 0.7, 0, 1};
  const Contact b{Vec3(0.003, 0.005, 0.0), tilted, 0.7, 0, 1};
  const auto out = cluster_contacts({a, b}, 0.01);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_LT((out[0].point - Vec3(0.002, 0.003, 0)).norm(), 1e-15);
  EXPECT_LT((out[0].normal - (Vec3::UnitZ() + tilted).normalized()).norm(), 1e-12);
  EXPECT_THROW(cluster_contacts({a}, 0.0), ValidationError);
}

TEST(Cluster, FloorAndWallStaySeparate) {
  const Contact floor{Vec3(0.001, 0.001, 0.0), Vec3::UnitZ(), 0.7, 0, 1};
  const Contact wall{Vec3(0.0, 0.002, 0.001), Vec3::UnitX(), 0.7, 0, 1};
  const auto out = cluster_contacts({floor, wall}, 0.01);
  ASSERT_EQ(out.size(), 2u);
  for (const Contact& c : out) EXPECT_TRUE(c.normal == Vec3::UnitZ() || c.normal == Vec3::UnitX());
}

TEST(Stability, BoxInSmoothCorner) {
  // Frictionless floor and walls: a box pushed into a corner still rests on
  // the floor; corner voxels must not tilt its support normals.
  const Container smooth{0.1, 0.1, 0.2, 0.0};
  EXPECT_TRUE(is_stable({cube_at(0.0, 0.0, 0.0)}, smooth).stable());
}

TEST(Stability, CubeOnFloor) {
  EXPECT_TRUE(is_stable({cube_at(0.3, 0.3, 0.0)}, kBigBox).stable());
}

TEST(Stability, StackedPair) {
  EXPECT_TRUE(is_stable({cube_at(0.3, 0.3, 0.0), cube_at(0.3, 0.3, 0.1)}, kBigBox).stable());
}

TEST(Stability, CubeOnLedgeWithCenterPastEdge) {
  // The upper cube rests on 25% of its bottom; its COM lies beyond the ledge.
  StabilityOptions frictionless;
  frictionless.mu = 0.0;
  Container c = kBigBox;
  c.mu_wall = 0.0;
  const Arrangement scene{cube_at(0.3, 0.3, 0.0), cube_at(0.375, 0.3, 0.1)};
  EXPECT_EQ(is_stable(scene, c, frictionless).verdict, StabilityVerdict::Unstable);
  // Friction cannot help either.
  EXPECT_EQ(is_stable(scene, kBigBox).verdict, StabilityVerdict::Unstable);
}

TEST(Stability, OverhangWithinSupportIsStable) {
  const Arrangement scene{cube_at(0.3, 0.3, 0.0), cube_at(0.34, 0.3, 0.1)};
  EXPECT_TRUE(is_stable(scene, kBigBox).stable());
}

TEST(Stability, UnsupportedBodyFalls) {
  EXPECT_EQ(is_stable({cube_at(0.3, 0.3, 0.2)}, kBigBox).verdict, StabilityVerdict::Unstable);
}

TEST(Stability, ForcesBalanceGravity) {
  const StabilityResult r = is_stable({cube_at(0.3, 0.3, 0.0)}, kBigBox);
  ASSERT_TRUE(r.stable());
  Vec3 total = Vec3::Zero();
  for (const Vec3& f : r.forces) total += f;
  const double weight = kDefaultDensity * 1e-3 * kGravity;
  EXPECT_NEAR(total.z(), weight, 1e-6 * weight);
  EXPECT_NEAR(total.x(), 0.0, 1e-6 * weight);
}

TEST(Stability, FrictionlessMatchesSupportPolygon) {
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  int stable = 0, checked = 0;
  while (checked < 200) {
    const int n = 1 + static_cast<int>(rng() % 6);
    std::vector<Eigen::Vector2d> pts;
    EquilibriumProblem p;
    p.bodies.push_back({1, 2.0, Vec3(u(rng) * 0.5, u(rng) * 0.5, 0.05)});
    for (int k = 0; k < n; ++k) {
      pts.emplace_back(u(rng), u(rng));
      p.contacts.push_back({Vec3(pts.back().x(), pts.back().y(), 0.0), Vec3::UnitZ(), 0.0, 0, 1});
    }
    const double margin = support_polygon_margin(pts, p.bodies[0].com.head<2>());
    if (std::abs(margin) < 1e-4 && n >= 3) continue;
    const bool expected = n >= 3 && margin > 0;
    const StabilityResult r = solve_equilibrium(p);
    ASSERT_NE(r.verdict, StabilityVerdict::Indeterminate);
    EXPECT_EQ(r.stable(), expected) << "margin " << margin;
    stable += expected;
    ++checked;
  }
  EXPECT_GT(stable, 20);
  EXPECT_LT(stable, 180);
}

TEST(Stability, MonotoneInFriction) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1, 1);
  int flips = 0;
  for (int trial = 0; trial < 60; ++trial) {
    EquilibriumProblem p;
    p.bodies.push_back({1, 1.0, Vec3(0.1 * u(rng), 0.1 * u(rng), 0.1)});
    for (int k = 0; k < 4; ++k) {
      const Vec3 n = Vec3(0.6 * u(rng), 0.6 * u(rng), 1.0).normalized();
      p.contacts.push_back({Vec3(0.1 * u(rng), 0.1 * u(rng), 0.05 * u(rng)), n, 0.0, 0, 1});
    }
    bool prev = false;
    for (double mu : {0.0, 0.1, 0.3, 0.5, 0.7, 1.0, 2.0}) {
      for (Contact& c : p.contacts) c.mu = mu;
      const bool now = solve_equilibrium(p).stable();
      if (prev) EXPECT_TRUE(now) << "trial " << trial << " mu " << mu;
      flips += (!prev && now && mu > 0.0);
      prev = now;
    }
  }
  EXPECT_GT(flips, 0);
}

TEST(Stability, ScaleInvariance) {
  for (double lambda : {0.01, 0.5, 3.0, 40.0}) {
    for (auto [dx, expected] : {std::pair{0.34, true}, std::pair{0.375, false}, std::pair{0.3, true}}) {
      const double e = 0.1 * lambda;
      Container c{lambda, lambda, lambda, 0.7};
      const Arrangement scene{cube_at(0.3 * lambda, 0.3 * lambda, 0.0, e), cube_at(dx * lambda, 0.3 * lambda, e, e)};
      StabilityOptions o;
      o.cluster_grid = 0.01 * lambda;
      EXPECT_EQ(is_stable(scene, c, o).stable(), expected) << "lambda " << lambda << " dx " << dx;
    }
  }
}

TEST(Stability, ContainerIsExemptAndIdsChecked) {
  EquilibriumProblem p;
  p.bodies.push_back({0, 1.0, Vec3::Zero()});
  EXPECT_THROW(solve_equilibrium(p), ValidationError);
  EquilibriumProblem q;
  q.bodies.push_back({1, 1.0, Vec3::Zero()});
  q.contacts.push_back({Vec3::Zero(), Vec3::UnitZ(), 0.5, 0, 7});
  EXPECT_THROW(solve_equilibrium(q), ValidationError);
  q.contacts.back().body_b = 1;
  q.cone_sides = 2;
  EXPECT_THROW(solve_equilibrium(q), ValidationError);
}

TEST(Stability, PyramidIsInscribed) {
  // A point mass on one contact whose normal is tilted from vertical. The
  // inscribed 4-sided pyramid always holds below mu*cos(pi/4) and never beyond
  // mu, whatever the azimuth of the tilt.
  const double mu = 0.5;
  auto balanced = [&](double tilt, double azimuth) {
    EquilibriumProblem p;
    p.bodies.push_back({1, 1.0, Vec3::Zero()});
    const Vec3 n(std::sin(tilt) * std::cos(azimuth), std::sin(tilt) * std::sin(azimuth), std::cos(tilt));
    p.contacts.push_back({Vec3::Zero(), n, mu, 0, 1});
    return solve_equilibrium(p).stable();
  };
  const double inner = std::atan(mu * std::cos(std::numbers::pi / 4));
  const double outer = std::atan(mu);
  int between_unstable = 0;
  for (int k = 0; k < 24; ++k) {
    const double az = k * std::numbers::pi / 12;
    EXPECT_TRUE(balanced(0.99 * inner, az)) << az;
    EXPECT_FALSE(balanced(1.01 * outer, az)) << az;
    between_unstable += !balanced(0.98 * outer, az);
  }
  EXPECT_GT(between_unstable, 0);
}

TEST(Stability, DebugDump) {
  std::ostringstream out;
  StabilityOptions o;
  o.dump = &out;
  is_stable({cube_at(0.3, 0.3, 0.0)}, kBigBox, o);
  EXPECT_NE(out.str().find("[A | b]"), std::string::npos);
}

TEST(Stability, ThreeBlockBridge) {
  // Two pillars carrying a plank; removing one pillar leaves the plank's COM
  // far past the remaining support.
  RigidTransform at_plank;
  at_plank.translation = Vec3(0.2, 0.3, 0.1);
  const auto plank = std::pair{box_mesh(Vec3::Zero(), Vec3(0.3, 0.1, 0.02)), at_plank};
  const Arrangement bridge{cube_at(0.2, 0.3, 0.0), cube_at(0.4, 0.3, 0.0), plank};
  EXPECT_TRUE(is_stable(bridge, kBigBox).stable());
  const Arrangement half{cube_at(0.2, 0.3, 0.0), plank};
  EXPECT_EQ(is_stable(half, kBigBox).verdict, StabilityVerdict::Unstable);
}

TEST(Stability, MassesOverrideDensity) {
  StabilityOptions o;
  o.masses = {1.0, 1000.0};
  const StabilityResult r = is_stable({cube_at(0.3, 0.3, 0.0), cube_at(0.3, 0.3, 0.1)}, kBigBox, o);
  ASSERT_TRUE(r.stable());
  // Missing entries fall back to density.
  o.masses = {1.0};
  EXPECT_TRUE(is_stable({cube_at(0.3, 0.3, 0.0), cube_at(0.3, 0.3, 0.1)}, kBigBox, o).stable());
}

TEST(Stability, InvertedBowlSandwich) {
  // An upright bowl standing on an inverted one and capped by a third: 164
  // contacts in tight clusters of near-parallel normals, a numerically hard
  // but feasible equilibrium.
  auto pose = [](double x, double y, double z, double pitch) {
    RigidTransform t;
    t.pitch = pitch;
    t.translation = Vec3(x, y, z);
    return t;
  };
  const double pi = std::numbers::pi;
  const Arrangement scene{
      {make_bowl(0.074579628658736463, 0.066661693723717913, 0.053653207123147473),
       pose(0.07457962865873646, 0.07457962865873646, 0.05365320712314748, pi)},
      {make_bowl(0.06472902693226934, 0.05821535716679474, 0.049519533289912675),
       pose(0.07472902693226934, 0.07472902693226934, 0.05365320712314749, 0.0)},
      {make_bowl(0.075856767941009817, 0.06826400945346206, 0.032958987072984468),
       pose(0.07585676794100982, 0.08585676794100981, 0.13613172748604463, pi)}};
  const StabilityResult r = is_stable(scene, Container{0.2, 0.2, 0.15, 0.7});
  EXPECT_EQ(r.verdict, StabilityVerdict::Stable) << r.lp.message;
}
