#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "stackpack/geometry.hpp"
#include "stackpack/heightmap.hpp"

namespace stackpack {

enum class Heuristic { HM, DBLF, MTA };

Heuristic parse_heuristic(const std::string& name);
std::string to_string(Heuristic h);

/// A legal placement found by the grid search.
struct PlacementCandidate {
  RigidTransform transform;
  int x = 0;  ///< Footprint corner cell in the container map.
  int y = 0;
  /// Footprint corner and bottom height in container coordinates, meters.
  double X = 0.0;
  double Y = 0.0;
  double Z = 0.0;
  double score = 0.0;
  /// Index into the searched (orientation, yaw) list.
  std::size_t orientation_index = 0;
};

/// Z + c (X + Y) using the transform's translation.
double score_dblf(const RigidTransform& t, double c);
/// Same, using the candidate's footprint corner and bottom height.
double score_dblf(const PlacementCandidate& cand, double c);

/// c (X + Y) plus the sum of the container map after laying the object. The
/// input map is not modified. Throws BoundsError for an out-of-range window.
double score_hm(const HeightMap& terrain, const HeightMap& top, const PlacementCandidate& cand, double c);
/// Same, with the two-map emptiness rule used by the planner.
double score_hm(const HeightMap& terrain, const HeightMap& top, const HeightMap& bottom,
                const PlacementCandidate& cand, double c);
/// Increase of the map sum caused by laying the object; adding it to the
/// current sum reproduces score_hm without copying the map.
double hm_sum_delta(const HeightMap& terrain, const HeightMap& top, const HeightMap& bottom, int x, int y,
                    double z);

/// Minus the area of object cells whose bottom lies within `contact_tol` of
/// the terrain below. Floor cells count as contact.
double score_mta(const HeightMap& terrain, const HeightMap& bottom, const PlacementCandidate& cand, double z,
                 double contact_tol);

/// Permutation ordering candidates by ascending score, then orientation
/// index, x, y; remaining ties keep input order. Throws ValidationError when
/// the lengths differ.
std::vector<std::size_t> rank_candidates(const std::vector<PlacementCandidate>& candidates,
                                         const std::vector<double>& scores);

}  // namespace stackpack
