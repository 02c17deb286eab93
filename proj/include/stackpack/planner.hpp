#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "stackpack/container.hpp"
#include "stackpack/geometry.hpp"
#include "stackpack/heightmap.hpp"
#include "stackpack/heuristics.hpp"
#include "stackpack/manipulation.hpp"
#include "stackpack/orientation.hpp"
#include "stackpack/raycast.hpp"
#include "stackpack/stability.hpp"

namespace stackpack {

/// Parameters of the placement search and its constraint checks.
struct SearchConfig {
  double resolution = 0.002;  ///< Heightmap cell size, m.
  double xy_step = 0.01;      ///< Translation step, m; rounded to whole cells.
  double delta_r = 0.7853981633974483;  ///< Yaw and fallback angle step, rad.
  std::size_t top_n = 4;                ///< Planar-stable orientations per item.
  std::size_t candidate_cap = 100;      ///< Ranked candidates checked per item.
  Heuristic heuristic = Heuristic::HM;
  double c = 1.0;  ///< Positional bias of HM and DBLF.
  bool stability = true;
  bool manipulation = true;
  bool full_yaw_range = false;  ///< Yaws over [0, 2pi) instead of [0, pi).
  /// Search every fallback perturbation up front instead of only on failure.
  bool force_5d = false;
  /// Re-rasterize the whole scene after each placement instead of updating.
  bool full_reraycast = false;
  double mu = 0.7;
  double scale_factor = 1.03;
  double cluster_grid = 0.01;
  double density = kDefaultDensity;
  GripperModel gripper;
  std::size_t grasp_yaw_steps = 8;

  /// Throws ValidationError on non-positive or non-finite parameters.
  void validate() const;
  /// Yaw angles searched for each orientation.
  std::vector<double> yaws() const;
  /// Cells per translation step (at least 1).
  int stride() const;
  bool operator==(const SearchConfig& o) const = default;
};

/// An item to pack: geometry in its own frame plus bookkeeping.
struct PackItem {
  TriangleMesh mesh;
  std::string id;
  std::string mesh_path;  ///< Source file, if any; echoed into plans.
  double mass = 0.0;      ///< kg; <= 0 derives mass from volume and density.
};

/// A (roll, pitch) pair to be combined with every searched yaw.
struct Attitude {
  double roll = 0.0;
  double pitch = 0.0;
};

enum class Fallback { None, Resequenced, FiveD };
const char* to_string(Fallback f);
Fallback parse_fallback(const std::string& name);

struct PlanStep {
  std::size_t item = 0;  ///< Index into the item list.
  std::string item_id;
  std::string mesh_path;
  double mass = 0.0;  ///< As given for the item; <= 0 means density-derived.
  RigidTransform transform;
  double score = 0.0;
  Fallback fallback = Fallback::None;
  std::size_t candidates_generated = 0;
  std::size_t candidates_checked = 0;
  bool operator==(const PlanStep& o) const = default;
};

struct PackingPlan {
  Container container;
  SearchConfig config;
  std::vector<PlanStep> steps;
  bool complete = false;
  /// Item that could not be placed when `complete` is false.
  std::optional<std::size_t> failed_item;
  bool operator==(const PackingPlan& o) const = default;
};

/// Item indices by descending bounding-box volume; ties keep input order.
std::vector<std::size_t> sequence_items(const std::vector<TriangleMesh>& meshes);

/// One searched pose family: an attitude, a yaw and the object maps there.
struct OrientedItem {
  Attitude attitude;
  double yaw = 0.0;
  ObjectHeightmaps maps;
};

/// Object maps for every attitude and yaw in `config`, in search order.
std::vector<OrientedItem> orient_item(const TriangleMesh& mesh, const std::vector<Attitude>& attitudes,
                                      const SearchConfig& config);

/// Transform that lays an oriented object with its footprint corner at cell
/// (x, y) and its lowest point at height z.
RigidTransform placement_transform(const OrientedItem& oi, int x, int y, double z, const HeightMap& terrain);

/// All contained placements of `mesh` over the translation grid, one per
/// (attitude, yaw, x, y), with lowest collision-free Z. Scores are left 0.
/// Uses up to `threads` worker threads (0 = automatic).
std::vector<PlacementCandidate> grid_search_3d(const std::vector<OrientedItem>& oriented, const Container& container,
                                               const HeightMap& terrain, const SearchConfig& config,
                                               unsigned threads = 1);
std::vector<PlacementCandidate> grid_search_3d(const TriangleMesh& mesh, const Container& container,
                                               const std::vector<Attitude>& attitudes, const HeightMap& terrain,
                                               const SearchConfig& config);

/// Container contents during packing, with cached contact data.
class PackState {
 public:
  PackState(const Container& container, const SearchConfig& config);

  const Container& container() const { return container_; }
  const HeightMap& terrain() const { return terrain_; }
  double terrain_sum() const { return terrain_sum_; }
  std::size_t size() const { return placed_.size(); }
  /// World-frame meshes of the placed items, in placement order.
  const std::vector<TriangleMesh>& world_meshes() const { return world_; }
  const std::vector<double>& masses() const { return masses_; }

  /// Equilibrium check of the current contents plus `mesh` at `t`.
  StabilityResult check_stability(const TriangleMesh& mesh, const RigidTransform& t, double mass) const;

  /// Adds an item. `oi` and (x, y, z) must describe the same placement as `t`.
  void place(const TriangleMesh& mesh, const RigidTransform& t, double mass, const OrientedItem& oi, int x, int y,
             double z);

 private:
  Container container_;
  SearchConfig config_;
  HeightMap terrain_;
  double terrain_sum_ = 0.0;
  std::vector<RigidTransform> placed_;
  std::vector<TriangleMesh> world_;
  std::vector<double> masses_;
  std::vector<ScaledBody> bodies_;
  std::vector<Contact> contacts_;  ///< Clustered contacts among placed items.
};

/// Outcome of placing a single item.
struct PlacementResult {
  std::optional<PlacementCandidate> placement;
  std::size_t candidates_generated = 0;
  std::size_t candidates_checked = 0;
};

/// Scores and ranks the grid-search candidates and returns the first of the
/// top `candidate_cap` that passes the enabled checks.
PlacementResult pack_one_item(const PackItem& item, const std::vector<OrientedItem>& oriented, PackState& state,
                              const SearchConfig& config, unsigned threads = 1);

/// Packs items in `sequence` order (all items by volume when empty), with
/// the retry and orientation-perturbation fallbacks. On failure the plan
/// holds the steps placed so far and names the item that did not fit.
PackingPlan pack_all(const std::vector<PackItem>& items, const Container& container,
                     const std::vector<std::size_t>& sequence, const SearchConfig& config);

/// Worker thread count: hardware concurrency capped by STACKPACK_THREADS.
unsigned planner_threads();

}  // namespace stackpack
