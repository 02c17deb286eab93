#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <tuple>

#include "stackpack/errors.hpp"
#include "stackpack/heuristics.hpp"
#include "stackpack/items.hpp"
#include "stackpack/raycast.hpp"

using namespace stackpack;

namespace {

PlacementCandidate at_cell(const HeightMap& terrain, int x, int y, double z, std::size_t orientation = 0) {
  PlacementCandidate c;
  c.x = x;
  c.y = y;
  c.X = terrain.origin_x() + x * terrain.resolution();
  c.Y = terrain.origin_y() + y * terrain.resolution();
  c.Z = z;
  c.orientation_index = orientation;
  return c;
}

}  // namespace

TEST(Dblf, Examples) {
  RigidTransform t;
  t.translation = Vec3(0.1, 0.1, 0.2);
  EXPECT_NEAR(score_dblf(t, 1.0), 0.4, 1e-15);
  EXPECT_EQ(score_dblf(RigidTransform{}, 1.0), 0.0);
  PlacementCandidate a, b;
  a.Z = b.Z = 0.3;
  a.X = 0.1;
  b.X = 0.2;
  std::vector<PlacementCandidate> cs{b, a};
  const auto order = rank_candidates(cs, {score_dblf(b, 1.0), score_dblf(a, 1.0)});
  EXPECT_EQ(order.front(), 1u);
}

TEST(Hm, SingleCell) {
  const HeightMap terrain(2, 2, 0.01);
  const HeightMap top(1, 1, 0.01, 0, 0, 0.05);
  EXPECT_NEAR(score_hm(terrain, top, at_cell(terrain, 0, 0, 0.0), 0.0), 0.05, 1e-15);
}

TEST(Hm, FloorPositionsDifferByBiasOnly) {
  const HeightMap terrain(20, 20, 0.01);
  const HeightMap top(3, 2, 0.01, 0, 0, 0.07);
  const PlacementCandidate a = at_cell(terrain, 1, 2, 0.0), b = at_cell(terrain, 9, 14, 0.0);
  const double d = score_hm(terrain, top, b, 1.0) - score_hm(terrain, top, a, 1.0);
  EXPECT_NEAR(d, (b.X + b.Y) - (a.X + a.Y), 1e-12);
}

TEST(Hm, NestedBowlScoresBelowSideBySide) {
  const double res = 0.002;
  const TriangleMesh bowl = make_bowl(0.05, 0.045, 0.03, 0.008);
  const ObjectHeightmaps h = raycast_heightmaps(bowl, Mat3::Identity(), res);
  HeightMap terrain(2 * h.top.width() + 4, h.top.height() + 2, res);
  update_heightmap_inplace(terrain, h.top, h.bottom, 0, 0, 0.0);
  const double z_in = lowest_z(terrain, h.bottom, 0, 0);
  const int side = h.top.width() + 2;
  const double z_side = lowest_z(terrain, h.bottom, side, 0);
  EXPECT_EQ(z_side, 0.0);
  EXPECT_NEAR(z_in, 0.008, 2 * res);
  const double inside = score_hm(terrain, h.top, h.bottom, at_cell(terrain, 0, 0, z_in), 0.01);
  const double beside = score_hm(terrain, h.top, h.bottom, at_cell(terrain, side, 0, z_side), 0.01);
  EXPECT_LT(inside, beside);
}

TEST(Hm, IncrementalDeltaMatchesFullSum) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0, 0.2);
  for (int trial = 0; trial < 100; ++trial) {
    HeightMap terrain(12, 9, 0.01), top(4, 3, 0.01), bottom(4, 3, 0.01);
    for (double& v : terrain.data()) v = u(rng);
    for (std::size_t k = 0; k < top.data().size(); ++k) {
      const bool empty = u(rng) < 0.03;
      bottom.data()[k] = empty ? kInfinity : u(rng) * 0.2;
      top.data()[k] = empty ? 0.0 : bottom.data()[k] + u(rng);
    }
    const PlacementCandidate c = at_cell(terrain, trial % 8, trial % 6, lowest_z(terrain, bottom, trial % 8, trial % 6));
    const double full = score_hm(terrain, top, bottom, c, 1.0);
    const double inc = c.X + c.Y + terrain.sum() + hm_sum_delta(terrain, top, bottom, c.x, c.y, c.Z);
    EXPECT_NEAR(full, inc, 1e-9);
  }
}

TEST(Hm, DifferenceIsLocalToWindows) {
  // Embedding the same terrain in a larger padded map with arbitrary content
  // outside both windows leaves score differences unchanged.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 0.2);
  HeightMap small(10, 10, 0.01), top(3, 3, 0.01, 0, 0, 0.05);
  for (double& v : small.data()) v = u(rng);
  HeightMap padded(16, 14, 0.01);
  for (double& v : padded.data()) v = u(rng);
  for (int j = 0; j < 10; ++j) {
    for (int i = 0; i < 10; ++i) padded.at(i, j) = small(i, j);
  }
  const PlacementCandidate a = at_cell(small, 1, 1, 0.3), b = at_cell(small, 6, 5, 0.25);
  const double d_small = score_hm(small, top, b, 1.0) - score_hm(small, top, a, 1.0);
  const double d_padded = score_hm(padded, top, b, 1.0) - score_hm(padded, top, a, 1.0);
  EXPECT_NEAR(d_small, d_padded, 1e-12);
}

TEST(Hm, FlatFloorArgminMatchesDblf) {
  const HeightMap terrain(15, 12, 0.01);
  const HeightMap top(4, 3, 0.01, 0, 0, 0.06);
  std::vector<PlacementCandidate> cs;
  std::vector<double> hm, dblf;
  for (int y = 0; y + 3 <= 12; y += 2) {
    for (int x = 0; x + 4 <= 15; x += 3) {
      cs.push_back(at_cell(terrain, x, y, 0.0));
      hm.push_back(score_hm(terrain, top, cs.back(), 1.0));
      dblf.push_back(score_dblf(cs.back(), 1.0));
    }
  }
  EXPECT_EQ(rank_candidates(cs, hm).front(), rank_candidates(cs, dblf).front());
}

TEST(Mta, FlatBoxOnFloor) {
  const HeightMap terrain(10, 10, 0.01);
  const HeightMap bottom(4, 3, 0.01, 0, 0, 0.0);
  EXPECT_NEAR(score_mta(terrain, bottom, at_cell(terrain, 2, 2, 0.0), 0.0, 0.002), -12 * 1e-4, 1e-15);
}

TEST(Mta, StepTouchesHighSideOnly) {
  HeightMap terrain(10, 10, 0.01);
  for (int j = 0; j < 10; ++j) {
    for (int i = 5; i < 10; ++i) terrain.at(i, j) = 0.05;
  }
  const HeightMap bottom(4, 2, 0.01, 0, 0, 0.0);
  // Footprint spans x = 3..6: cells 5 and 6 of each row are on the step.
  const PlacementCandidate c = at_cell(terrain, 3, 4, 0.05);
  EXPECT_NEAR(score_mta(terrain, bottom, c, 0.05, 0.002), -4 * 1e-4, 1e-15);
}

TEST(Mta, FloatingHasNoContact) {
  const HeightMap terrain(10, 10, 0.01);
  const HeightMap bottom(2, 2, 0.01, 0, 0, 0.0);
  EXPECT_EQ(score_mta(terrain, bottom, at_cell(terrain, 0, 0, 0.1), 0.1, 0.002), 0.0);
}

TEST(Mta, NonIncreasingInTolerance) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 0.05);
  HeightMap terrain(10, 10, 0.01), bottom(5, 5, 0.01);
  for (double& v : terrain.data()) v = u(rng);
  for (double& v : bottom.data()) v = u(rng);
  const PlacementCandidate c = at_cell(terrain, 2, 3, 0.0);
  const double z = lowest_z(terrain, bottom, 2, 3);
  double prev = 0.0;
  for (double tol = 0.0; tol < 0.1; tol += 0.002) {
    const double s = score_mta(terrain, bottom, c, z, tol);
    EXPECT_LE(s, prev);
    prev = s;
  }
}

TEST(Rank, Examples) {
  std::vector<PlacementCandidate> cs(3);
  EXPECT_EQ(rank_candidates(cs, {3, 1, 2}), (std::vector<std::size_t>{1, 2, 0}));
  EXPECT_EQ(rank_candidates(cs, {5, 5, 5}), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_THROW(rank_candidates(cs, {1, 2}), ValidationError);
}

TEST(Rank, MatchesReferenceSort) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> small(0, 4);
  std::vector<PlacementCandidate> cs(1000);
  std::vector<double> scores(1000);
  for (std::size_t k = 0; k < cs.size(); ++k) {
    cs[k].x = small(rng);
    cs[k].y = small(rng);
    cs[k].orientation_index = static_cast<std::size_t>(small(rng));
    scores[k] = small(rng) * 0.25;
  }
  std::vector<std::tuple<double, std::size_t, int, int, std::size_t>> ref;
  for (std::size_t k = 0; k < cs.size(); ++k) ref.emplace_back(scores[k], cs[k].orientation_index, cs[k].x, cs[k].y, k);
  std::sort(ref.begin(), ref.end());
  const auto order = rank_candidates(cs, scores);
  for (std::size_t k = 0; k < cs.size(); ++k) EXPECT_EQ(order[k], std::get<4>(ref[k]));
}

TEST(Heuristic, Names) {
  EXPECT_EQ(parse_heuristic("dblf"), Heuristic::DBLF);
  EXPECT_EQ(to_string(parse_heuristic("mta")), "mta");
  EXPECT_THROW(parse_heuristic("gls"), ValidationError);
}
