#include "stackpack/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stackpack/errors.hpp"

namespace stackpack {

Heuristic parse_heuristic(const std::string& name) {
  if (name == "hm") return Heuristic::HM;
  if (name == "dblf") return Heuristic::DBLF;
  if (name == "mta") return Heuristic::MTA;
  throw ValidationError("unknown heuristic '" + name + "' (expected hm, dblf or mta)");
}

std::string to_string(Heuristic h) {
  switch (h) {
    case Heuristic::HM: return "hm";
    case Heuristic::DBLF: return "dblf";
    case Heuristic::MTA: return "mta";
  }
  return "hm";
}

double score_dblf(const RigidTransform& t, double c) {
  return t.translation.z() + c * (t.translation.x() + t.translation.y());
}

double score_dblf(const PlacementCandidate& cand, double c) { return cand.Z + c * (cand.X + cand.Y); }

double score_hm(const HeightMap& terrain, const HeightMap& top, const PlacementCandidate& cand, double c) {
  return c * (cand.X + cand.Y) + update_heightmap(terrain, top, cand.x, cand.y, cand.Z).sum();
}

double score_hm(const HeightMap& terrain, const HeightMap& top, const HeightMap& bottom,
                const PlacementCandidate& cand, double c) {
  return c * (cand.X + cand.Y) + update_heightmap(terrain, top, bottom, cand.x, cand.y, cand.Z).sum();
}

double hm_sum_delta(const HeightMap& terrain, const HeightMap& top, const HeightMap& bottom, int x, int y,
                    double z) {
  check_window(terrain, top.width(), top.height(), x, y);
  double delta = 0.0;
  for (int j = 0; j < top.height(); ++j) {
    for (int i = 0; i < top.width(); ++i) {
      const double t = top(i, j);
      if (t <= 1e-9 && std::isinf(bottom(i, j))) continue;
      const double cell = terrain(x + i, y + j);
      if (t + z > cell) delta += t + z - cell;
    }
  }
  return delta;
}

double score_mta(const HeightMap& terrain, const HeightMap& bottom, const PlacementCandidate& cand, double z,
                 double contact_tol) {
  check_window(terrain, bottom.width(), bottom.height(), cand.x, cand.y);
  std::size_t touching = 0;
  for (int j = 0; j < bottom.height(); ++j) {
    for (int i = 0; i < bottom.width(); ++i) {
      const double b = bottom(i, j);
      if (std::isinf(b)) continue;
      if (std::abs(terrain(cand.x + i, cand.y + j) - (z + b)) <= contact_tol) ++touching;
    }
  }
  return -terrain.cell_area() * static_cast<double>(touching);
}

std::vector<std::size_t> rank_candidates(const std::vector<PlacementCandidate>& candidates,
                                         const std::vector<double>& scores) {
  if (candidates.size() != scores.size()) throw ValidationError("candidate and score counts differ");
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] < scores[b];
    const PlacementCandidate& ca = candidates[a];
    const PlacementCandidate& cb = candidates[b];
    if (ca.orientation_index != cb.orientation_index) return ca.orientation_index < cb.orientation_index;
    if (ca.x != cb.x) return ca.x < cb.x;
    return ca.y < cb.y;
  });
  return order;
}

}  // namespace stackpack
