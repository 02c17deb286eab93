#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>
#include <numbers>
#include <random>

#include "stackpack/convex_hull.hpp"
#include "stackpack/errors.hpp"
#include "stackpack/geometry.hpp"
#include "stackpack/items.hpp"
#include "stackpack/mesh_io.hpp"
#include "test_support.hpp"

using namespace stackpack;
using stackpack::testing::box_mesh;
using stackpack::testing::TempDir;

namespace {

const char* kCubeOff =
    "OFF\n# unit cube\n8 12 0\n"
    "0 0 0\n1 0 0\n1 1 0\n0 1 0\n0 0 1\n1 0 1\n1 1 1\n0 1 1\n"
    "3 0 2 1\n3 0 3 2\n3 4 5 6\n3 4 6 7\n3 0 1 5\n3 0 5 4\n"
    "3 1 2 6\n3 1 6 5\n3 2 3 7\n3 2 7 6\n3 3 0 4\n3 3 4 7\n";

// Every hull vertex must be a vertex of the input, and every input point must
// lie on or behind every hull face.
void expect_valid_hull(const TriangleMesh& hull, const std::vector<Vec3>& points) {
  ASSERT_FALSE(hull.triangles.empty());
  for (std::size_t t = 0; t < hull.triangles.size(); ++t) {
    const Vec3 n = triangle_normal(hull.corner(t, 0), hull.corner(t, 1), hull.corner(t, 2));
    for (const Vec3& p : points) EXPECT_LE(n.dot(p - hull.corner(t, 0)), 1e-9);
  }
  // Closed: every directed edge has its reverse.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (const Triangle& t : hull.triangles) {
    for (int k = 0; k < 3; ++k) edges.emplace_back(t[k], t[(k + 1) % 3]);
  }
  std::sort(edges.begin(), edges.end());
  for (auto [a, b] : edges) EXPECT_TRUE(std::binary_search(edges.begin(), edges.end(), std::make_pair(b, a)));
  EXPECT_GT(signed_volume(hull), 0.0);
}

// Point p is extreme iff some direction makes it the unique maximizer. For
// points on a sphere the outward radial direction is such a witness, so the
// oracle checks the strict support property directly.
bool is_extreme_point(const std::vector<Vec3>& pts, std::size_t i) {
  const Vec3 d = pts[i].normalized();
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (k != i && d.dot(pts[k]) >= d.dot(pts[i]) - 1e-12) return false;
  }
  return true;
}

}  // namespace

TEST(MeshIo, MinimalObj) {
  TempDir dir("io");
  const auto p = dir.write("tri.obj", "# one face\nv 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
  const TriangleMesh m = load_mesh(p, MeshFormat::Obj);
  EXPECT_EQ(m.vertices.size(), 3u);
  EXPECT_EQ(m.triangles.size(), 1u);
}

TEST(MeshIo, ObjPolygonsAndRelativeIndices) {
  TempDir dir("io");
  const auto p = dir.write("quad.obj", "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf -4/1/1 -3 -2 -1\n");
  const TriangleMesh m = load_mesh(p);
  ASSERT_EQ(m.triangles.size(), 2u);
  EXPECT_EQ(m.triangles[1], (Triangle{0, 2, 3}));
}

TEST(MeshIo, OffCube) {
  TempDir dir("io");
  const TriangleMesh m = load_mesh(dir.write("cube.off", kCubeOff), MeshFormat::Off);
  EXPECT_EQ(m.vertices.size(), 8u);
  EXPECT_EQ(m.triangles.size(), 12u);
  const Aabb b = m.bounds();
  EXPECT_EQ(b.min, Vec3(0, 0, 0));
  EXPECT_EQ(b.max, Vec3(1, 1, 1));
}

TEST(MeshIo, IndexOutOfRangeIsValidationError) {
  TempDir dir("io");
  const auto p = dir.write("bad.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n");
  EXPECT_THROW(load_mesh(p), ValidationError);
}

TEST(MeshIo, EmptyMeshIsValidationError) {
  TempDir dir("io");
  EXPECT_THROW(load_mesh(dir.write("empty.obj", "v 0 0 0\n")), ValidationError);
}

TEST(MeshIo, ParseErrorCarriesLine) {
  TempDir dir("io");
  const auto p = dir.write("bad.obj", "v 0 0 0\nv 1 zero 0\n");
  try {
    load_mesh(p);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
}

TEST(MeshIo, MissingFileNamesPath) {
  try {
    load_mesh("/nonexistent/dir/item.stl");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/item.stl"), std::string::npos);
  }
}

TEST(MeshIo, StlAsciiAndBinaryAgree) {
  TempDir dir("io");
  const TriangleMesh cube = box_mesh(Vec3(0, 0, 0), Vec3(1, 2, 3));
  std::string ascii = "solid cube\n";
  std::string binary(80, '\0');
  const auto n = static_cast<std::uint32_t>(cube.triangles.size());
  binary.append(reinterpret_cast<const char*>(&n), 4);
  for (std::size_t t = 0; t < cube.triangles.size(); ++t) {
    ascii += " facet normal 0 0 0\n  outer loop\n";
    float rec[12] = {0};
    for (int k = 0; k < 3; ++k) {
      const Vec3& v = cube.corner(t, k);
      ascii += "   vertex " + std::to_string(v.x()) + " " + std::to_string(v.y()) + " " + std::to_string(v.z()) + "\n";
      for (int c = 0; c < 3; ++c) rec[3 + 3 * k + c] = static_cast<float>(v[c]);
    }
    ascii += "  endloop\n endfacet\n";
    binary.append(reinterpret_cast<const char*>(rec), 48);
    binary.append(2, '\0');
  }
  ascii += "endsolid cube\n";
  const TriangleMesh a = load_mesh(dir.write("a.stl", ascii));
  const TriangleMesh b = load_mesh(dir.write("b.stl", binary));
  EXPECT_EQ(a.vertices.size(), 8u);
  EXPECT_EQ(b.vertices.size(), 8u);
  EXPECT_EQ(a.triangles.size(), 12u);
  EXPECT_NEAR(signed_volume(a), 6.0, 1e-12);
  EXPECT_NEAR(signed_volume(b), 6.0, 1e-12);
}

TEST(MeshIo, TruncatedBinaryStlReportsByteOffset) {
  TempDir dir("io");
  std::string data(80, '\0');
  const std::uint32_t n = 3;
  data.append(reinterpret_cast<const char*>(&n), 4);
  data.append(20, '\0');
  try {
    load_mesh(dir.write("t.stl", data));
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("byte"), std::string::npos);
  }
}

TEST(MeshIo, ObjRoundTrip) {
  TempDir dir("io");
  const TriangleMesh m = make_bowl(0.1, 0.09, 0.05);
  write_obj(dir.path() / "bowl.obj", m);
  const TriangleMesh r = load_mesh(dir.path() / "bowl.obj");
  ASSERT_EQ(r.vertices.size(), m.vertices.size());
  EXPECT_EQ(r.triangles, m.triangles);
  for (std::size_t i = 0; i < m.vertices.size(); ++i) EXPECT_EQ(r.vertices[i], m.vertices[i]);
}

TEST(Transform, IdentityIsBitwiseCopy) {
  TriangleMesh m = make_bowl(0.1, 0.08, 0.05);
  const TriangleMesh r = transform_mesh(m, RigidTransform{});
  ASSERT_EQ(r.vertices.size(), m.vertices.size());
  EXPECT_EQ(std::memcmp(r.vertices.data(), m.vertices.data(), m.vertices.size() * sizeof(Vec3)), 0);
}

TEST(Transform, Translation) {
  RigidTransform t;
  t.translation = Vec3(1, 0, 0);
  const Aabb b = transform_mesh(box_mesh(Vec3::Zero(), Vec3::Ones()), t).bounds();
  EXPECT_EQ(b.min, Vec3(1, 0, 0));
  EXPECT_EQ(b.max, Vec3(2, 1, 1));
}

TEST(Transform, YawQuarterTurn) {
  RigidTransform t;
  t.yaw = std::numbers::pi / 2;
  EXPECT_LT((t.apply(Vec3(1, 0, 0)) - Vec3(0, 1, 0)).norm(), 1e-9);
}

TEST(Transform, CompositionOrderIsYawRollPitch) {
  const double r = 0.3, p = -0.7, y = 1.1;
  const Mat3 rz = Eigen::AngleAxisd(y, Vec3::UnitZ()).toRotationMatrix();
  const Mat3 ry = Eigen::AngleAxisd(r, Vec3::UnitY()).toRotationMatrix();
  const Mat3 rx = Eigen::AngleAxisd(p, Vec3::UnitX()).toRotationMatrix();
  EXPECT_LT((rotation_from_rpy(r, p, y) - rz * ry * rx).norm(), 1e-15);
}

TEST(Transform, PreservesDistances) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3, 3);
  const TriangleMesh m = make_lshape(0.3, 0.2, 0.4);
  for (int trial = 0; trial < 20; ++trial) {
    RigidTransform t{u(rng), u(rng), u(rng), Vec3(u(rng), u(rng), u(rng))};
    const TriangleMesh r = transform_mesh(m, t);
    for (std::size_t i = 0; i < m.vertices.size(); ++i) {
      for (std::size_t j = i + 1; j < m.vertices.size(); ++j) {
        const double d0 = (m.vertices[i] - m.vertices[j]).norm();
        const double d1 = (r.vertices[i] - r.vertices[j]).norm();
        EXPECT_NEAR(d1, d0, 1e-9 * d0);
      }
    }
  }
}

TEST(ConvexHull, TetrahedronIsItself) {
  const std::vector<Vec3> pts{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const TriangleMesh h = convex_hull(pts);
  EXPECT_EQ(h.triangles.size(), 4u);
  EXPECT_EQ(h.vertices.size(), 4u);
  expect_valid_hull(h, pts);
  EXPECT_NEAR(signed_volume(h), 1.0 / 6.0, 1e-15);
}

TEST(ConvexHull, InteriorPointVanishes) {
  TriangleMesh cube = box_mesh(Vec3::Zero(), Vec3::Ones());
  cube.vertices.emplace_back(0.5, 0.4, 0.3);
  const TriangleMesh h = convex_hull(cube);
  EXPECT_EQ(h.vertices.size(), 8u);
  expect_valid_hull(h, cube.vertices);
  EXPECT_NEAR(signed_volume(h), 1.0, 1e-12);
}

TEST(ConvexHull, RandomSpherePointsAreAllExtreme) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g;
  std::vector<Vec3> pts;
  for (int i = 0; i < 100; ++i) pts.push_back(Vec3(g(rng), g(rng), g(rng)).normalized());
  for (std::size_t i = 0; i < pts.size(); ++i) ASSERT_TRUE(is_extreme_point(pts, i));
  const TriangleMesh h = convex_hull(pts);
  expect_valid_hull(h, pts);
  ASSERT_EQ(h.vertices.size(), pts.size());
  auto key = [](const Vec3& v) { return std::array<double, 3>{v.x(), v.y(), v.z()}; };
  std::vector<std::array<double, 3>> a, b;
  for (const Vec3& v : pts) a.push_back(key(v));
  for (const Vec3& v : h.vertices) b.push_back(key(v));
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  EXPECT_EQ(a, b);
}

TEST(ConvexHull, RandomCloudContainsEveryPoint) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Vec3> pts;
    for (int i = 0; i < 300; ++i) pts.emplace_back(u(rng), u(rng), u(rng));
    const TriangleMesh h = convex_hull(pts);
    expect_valid_hull(h, pts);
    // Hull vertices are drawn from the input.
    for (const Vec3& v : h.vertices) {
      EXPECT_NE(std::find(pts.begin(), pts.end(), v), pts.end());
    }
  }
}

TEST(ConvexHull, DegenerateInputThrows) {
  EXPECT_THROW(convex_hull(std::vector<Vec3>{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}}), DegeneracyError);
  EXPECT_THROW(convex_hull(std::vector<Vec3>{{0, 0, 0}, {1, 1, 1}, {2, 2, 2}, {3, 3, 3}}), DegeneracyError);
  EXPECT_THROW(convex_hull(std::vector<Vec3>{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}), DegeneracyError);
}

TEST(CenterOfMass, CubeCenteredAtOrigin) {
  const Vec3 c = center_of_mass(box_mesh(Vec3(-0.5, -0.5, -0.5), Vec3(0.5, 0.5, 0.5)));
  EXPECT_LT(c.norm(), 1e-9);
}

TEST(CenterOfMass, CubeAtCorner) {
  EXPECT_LT((center_of_mass(box_mesh(Vec3::Zero(), Vec3::Ones())) - Vec3(0.5, 0.5, 0.5)).norm(), 1e-9);
}

TEST(CenterOfMass, TwoCubePrismMatchesCompositeFormula) {
  // Union of unit cubes at x in [0,1] and [1,2] as one 2x1x1 closed mesh.
  const TriangleMesh m = box_mesh(Vec3::Zero(), Vec3(2, 1, 1));
  const Vec3 c1(0.5, 0.5, 0.5), c2(1.5, 0.5, 0.5);
  const Vec3 expected = (1.0 * c1 + 1.0 * c2) / 2.0;
  EXPECT_LT((center_of_mass(m) - expected).norm(), 1e-9);
  EXPECT_LT((center_of_mass(m) - Vec3(1.0, 0.5, 0.5)).norm(), 1e-9);
}

TEST(CenterOfMass, LShapeMatchesCompositeFormula) {
  // make_lshape: a x c bottom slab of height c/2 plus an a/2-wide upper block.
  const double a = 0.4, b = 0.3, c = 0.2;
  const double v1 = a * b * c / 2, v2 = a / 2 * b * c / 2;
  const Vec3 c1(a / 2, b / 2, c / 4), c2(a / 4, b / 2, 3 * c / 4);
  const Vec3 expected = (v1 * c1 + v2 * c2) / (v1 + v2);
  const TriangleMesh m = make_lshape(a, b, c);
  EXPECT_LT((center_of_mass(m) - expected).norm(), 1e-12);
  EXPECT_NEAR(signed_volume(m), v1 + v2, 1e-15);
}

TEST(CenterOfMass, RigidTransformCovariance) {
  const TriangleMesh m = make_bowl(0.08, 0.07, 0.05);
  const RigidTransform t{0.4, -1.2, 2.5, Vec3(3, -2, 1)};
  const Vec3 lhs = center_of_mass(transform_mesh(m, t));
  const Vec3 rhs = t.apply(center_of_mass(m));
  EXPECT_LT((lhs - rhs).norm(), 1e-9);
  const Aabb b = m.bounds();
  EXPECT_TRUE(b.contains(center_of_mass(m)));
}

TEST(CenterOfMass, OpenMeshFallsBackToSurfaceCentroid) {
  TriangleMesh m = box_mesh(Vec3::Zero(), Vec3(2, 1, 1));
  m.triangles.resize(2);  // bottom face only
  const Vec3 c = center_of_mass(m);
  EXPECT_LT((c - Vec3(1.0, 0.5, 0.0)).norm(), 1e-12);
}

TEST(Items, BoxIsUnitCube) {
  const TriangleMesh m = generate_test_item(ItemKind::Box, {1, 1, 1}, 0);
  EXPECT_EQ(m.triangles.size(), 12u);
  EXPECT_NEAR(signed_volume(m), 1.0, 1e-15);
  EXPECT_EQ(m.bounds().max, Vec3(1, 1, 1));
}

TEST(Items, WedgeAndBowlAreClosedAndOutward) {
  const TriangleMesh w = make_wedge(0.2, 0.1, 0.3);
  EXPECT_EQ(w.triangles.size(), 8u);
  EXPECT_NEAR(signed_volume(w), 0.5 * 0.2 * 0.3 * 0.1, 1e-15);
  const TriangleMesh b = make_bowl(0.1, 0.08, 0.05);
  EXPECT_GT(signed_volume(b), 0.0);
  // Closed: every directed edge has its reverse.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (const Triangle& t : b.triangles) {
    for (int k = 0; k < 3; ++k) edges.emplace_back(t[k], t[(k + 1) % 3]);
  }
  std::sort(edges.begin(), edges.end());
  for (auto [x, y] : edges) EXPECT_TRUE(std::binary_search(edges.begin(), edges.end(), std::make_pair(y, x)));
}

TEST(Items, SameSeedIsByteIdentical) {
  for (ItemKind k : {ItemKind::Box, ItemKind::LShape, ItemKind::Bowl, ItemKind::Wedge}) {
    const TriangleMesh a = generate_test_item(k, {}, 42);
    const TriangleMesh b = generate_test_item(k, {}, 42);
    ASSERT_EQ(a.vertices.size(), b.vertices.size());
    EXPECT_EQ(std::memcmp(a.vertices.data(), b.vertices.data(), a.vertices.size() * sizeof(Vec3)), 0);
    EXPECT_EQ(a.triangles, b.triangles);
    EXPECT_NE(random_item_params(k, 42), random_item_params(k, 43));
  }
}

TEST(Items, InvalidParamsThrow) {
  EXPECT_THROW(generate_test_item(ItemKind::Box, {1, -1, 1}, 0), ValidationError);
  EXPECT_THROW(generate_test_item(ItemKind::Bowl, {0.1, 0.12, 0.05}, 0), ValidationError);
  EXPECT_THROW(generate_test_item(ItemKind::Wedge, {1, 1}, 0), ValidationError);
  EXPECT_THROW(parse_item_kind("sphere"), ValidationError);
}
