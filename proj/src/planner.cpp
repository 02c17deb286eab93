#include "stackpack/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <thread>

#include "stackpack/errors.hpp"

namespace stackpack {

namespace {

constexpr double kContainmentEps = 1e-9;
constexpr double kAttitudeEps = 1e-6;

bool positive(double v) { return v > 0.0 && std::isfinite(v); }

double wrap_angle(double a) {
  const double w = std::remainder(a, 2.0 * std::numbers::pi);
  return w == 0.0 ? 0.0 : w;
}

// Runs body(k) for k in [0, n) on up to `threads` workers. Each k is
// handled by exactly one worker; results must be written to per-k slots.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& body) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), n);
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) body(k);
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t k = w; k < n; k += workers) body(k);
    });
  }
  for (auto& t : pool) t.join();
}

std::vector<int> positions(int terrain_cells, int object_cells, int stride) {
  std::vector<int> out;
  const int last = terrain_cells - object_cells;
  if (last < 0) return out;
  for (int p = 0; p <= last; p += stride) out.push_back(p);
  if (out.back() != last) out.push_back(last);  // flush against the far wall
  return out;
}

Mat3 attitude_matrix(const Attitude& a) { return rotation_from_rpy(a.roll, a.pitch, 0.0); }

// Appends the attitudes of `candidates` not already in `seen` (as rotations).
std::vector<Attitude> unseen(const std::vector<Attitude>& candidates, std::vector<Mat3>& seen) {
  std::vector<Attitude> out;
  for (const Attitude& a : candidates) {
    const Mat3 R = attitude_matrix(a);
    const bool dup = std::any_of(seen.begin(), seen.end(), [&](const Mat3& s) { return (s - R).norm() < kAttitudeEps; });
    if (dup) continue;
    seen.push_back(R);
    out.push_back(a);
  }
  return out;
}

std::vector<double> perturbation_steps(double delta_r) {
  std::vector<double> out;
  for (int k = 0; k * delta_r < 2.0 * std::numbers::pi - 1e-12; ++k) out.push_back(k * delta_r);
  return out;
}

std::vector<Attitude> perturbed(const std::vector<Attitude>& base, double tr, double tp) {
  std::vector<Attitude> out;
  for (const Attitude& a : base) out.push_back({wrap_angle(a.roll + tr), wrap_angle(a.pitch + tp)});
  return out;
}

std::vector<Attitude> stable_attitudes(const TriangleMesh& mesh, std::size_t top_n) {
  std::vector<Attitude> out;
  for (const StableOrientation& o : planar_stable_orientations(mesh, top_n).orientations) {
    out.push_back({o.roll, o.pitch});
  }
  return out;
}

}  // namespace

void SearchConfig::validate() const {
  if (!positive(resolution)) throw ValidationError("resolution must be positive");
  if (!positive(xy_step)) throw ValidationError("xy_step must be positive");
  if (!positive(delta_r)) throw ValidationError("delta_r must be positive");
  if (top_n < 1) throw ValidationError("top_n must be at least 1");
  if (candidate_cap < 1) throw ValidationError("candidate_cap must be at least 1");
  if (!(c >= 0.0 && std::isfinite(c))) throw ValidationError("heuristic constant must be nonnegative");
  if (!(mu >= 0.0 && std::isfinite(mu))) throw ValidationError("friction coefficient must be nonnegative");
  if (!(scale_factor > 1.0 && std::isfinite(scale_factor))) throw ValidationError("scale factor must exceed 1");
  if (!positive(cluster_grid)) throw ValidationError("cluster grid must be positive");
  if (!positive(density)) throw ValidationError("density must be positive");
  if (grasp_yaw_steps < 1) throw ValidationError("grasp yaw steps must be at least 1");
  gripper.validate();
}

std::vector<double> SearchConfig::yaws() const {
  const double range = full_yaw_range ? 2.0 * std::numbers::pi : std::numbers::pi;
  std::vector<double> out;
  for (int k = 0; k * delta_r < range - 1e-12; ++k) out.push_back(k * delta_r);
  return out;
}

int SearchConfig::stride() const { return std::max(1, static_cast<int>(std::lround(xy_step / resolution))); }

const char* to_string(Fallback f) {
  switch (f) {
    case Fallback::None: return "none";
    case Fallback::Resequenced: return "resequenced";
    case Fallback::FiveD: return "5d";
  }
  return "?";
}

Fallback parse_fallback(const std::string& name) {
  if (name == "none") return Fallback::None;
  if (name == "resequenced") return Fallback::Resequenced;
  if (name == "5d") return Fallback::FiveD;
  throw ValidationError("unknown fallback '" + name + "'");
}

std::vector<std::size_t> sequence_items(const std::vector<TriangleMesh>& meshes) {
  std::vector<double> vol;
  for (const TriangleMesh& m : meshes) vol.push_back(m.bounds().volume());
  std::vector<std::size_t> order(meshes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vol[a] > vol[b]; });
  return order;
}

std::vector<OrientedItem> orient_item(const TriangleMesh& mesh, const std::vector<Attitude>& attitudes,
                                      const SearchConfig& config) {
  std::vector<OrientedItem> out;
  for (const Attitude& a : attitudes) {
    for (double yaw : config.yaws()) {
      OrientedItem oi;
      oi.attitude = a;
      oi.yaw = yaw;
      oi.maps = raycast_heightmaps(mesh, rotation_from_rpy(a.roll, a.pitch, yaw), config.resolution);
      out.push_back(std::move(oi));
    }
  }
  return out;
}

RigidTransform placement_transform(const OrientedItem& oi, int x, int y, double z, const HeightMap& terrain) {
  RigidTransform t;
  t.roll = oi.attitude.roll;
  t.pitch = oi.attitude.pitch;
  t.yaw = oi.yaw;
  const double res = terrain.resolution();
  t.translation = Vec3(terrain.origin_x() + x * res - oi.maps.bounds.min.x(),
                       terrain.origin_y() + y * res - oi.maps.bounds.min.y(), z - oi.maps.base_z);
  return t;
}

std::vector<PlacementCandidate> grid_search_3d(const std::vector<OrientedItem>& oriented, const Container& container,
                                               const HeightMap& terrain, const SearchConfig& config,
                                               unsigned threads) {
  const int stride = config.stride();
  std::vector<std::vector<PlacementCandidate>> per(oriented.size());
  parallel_for(oriented.size(), threads == 0 ? planner_threads() : threads, [&](std::size_t k) {
    const OrientedItem& oi = oriented[k];
    const HeightMap& bottom = oi.maps.bottom;
    if (oi.maps.object_height() > container.height + kContainmentEps) return;
    for (int y : positions(terrain.height(), bottom.height(), stride)) {
      for (int x : positions(terrain.width(), bottom.width(), stride)) {
        const double z = lowest_z(terrain, bottom, x, y);
        if (z + oi.maps.object_height() > container.height + kContainmentEps) continue;
        PlacementCandidate c;
        c.transform = placement_transform(oi, x, y, z, terrain);
        c.x = x;
        c.y = y;
        c.X = terrain.origin_x() + x * terrain.resolution();
        c.Y = terrain.origin_y() + y * terrain.resolution();
        c.Z = z;
        c.orientation_index = k;
        per[k].push_back(c);
      }
    }
  });
  std::vector<PlacementCandidate> out;
  for (auto& v : per) out.insert(out.end(), v.begin(), v.end());
  return out;
}

std::vector<PlacementCandidate> grid_search_3d(const TriangleMesh& mesh, const Container& container,
                                               const std::vector<Attitude>& attitudes, const HeightMap& terrain,
                                               const SearchConfig& config) {
  return grid_search_3d(orient_item(mesh, attitudes, config), container, terrain, config, 1);
}

PackState::PackState(const Container& container, const SearchConfig& config)
    : container_(container), config_(config) {
  container_.validate();
  config_.validate();
  terrain_ = container_heightmap(container_, std::vector<TriangleMesh>{}, config_.resolution);
}

StabilityResult PackState::check_stability(const TriangleMesh& mesh, const RigidTransform& t, double mass) const {
  const ScaledBody body = prepare_body(transform_mesh(mesh, t), static_cast<int>(bodies_.size()) + 1,
                                       config_.scale_factor, config_.density, mass);
  std::vector<Contact> raw = container_contacts(body, container_);
  for (const ScaledBody& other : bodies_) {
    const auto c = body_contacts(other, body, config_.mu);
    raw.insert(raw.end(), c.begin(), c.end());
  }
  EquilibriumProblem problem;
  for (const ScaledBody& b : bodies_) problem.bodies.push_back(b.state);
  problem.bodies.push_back(body.state);
  problem.contacts = contacts_;
  const auto fresh = cluster_contacts(raw, config_.cluster_grid);
  problem.contacts.insert(problem.contacts.end(), fresh.begin(), fresh.end());
  return solve_equilibrium(problem);
}

void PackState::place(const TriangleMesh& mesh, const RigidTransform& t, double mass, const OrientedItem& oi, int x,
                      int y, double z) {
  world_.push_back(transform_mesh(mesh, t));
  const ScaledBody body =
      prepare_body(world_.back(), static_cast<int>(bodies_.size()) + 1, config_.scale_factor, config_.density, mass);
  std::vector<Contact> raw = container_contacts(body, container_);
  for (const ScaledBody& other : bodies_) {
    const auto c = body_contacts(other, body, config_.mu);
    raw.insert(raw.end(), c.begin(), c.end());
  }
  const auto fresh = cluster_contacts(raw, config_.cluster_grid);
  contacts_.insert(contacts_.end(), fresh.begin(), fresh.end());
  bodies_.push_back(body);
  masses_.push_back(body.state.mass);
  placed_.push_back(t);
  if (config_.full_reraycast) {
    terrain_ = container_heightmap(container_, world_, config_.resolution);
  } else {
    update_heightmap_inplace(terrain_, oi.maps.top, oi.maps.bottom, x, y, z);
  }
  terrain_sum_ = terrain_.sum();
}

PlacementResult pack_one_item(const PackItem& item, const std::vector<OrientedItem>& oriented, PackState& state,
                              const SearchConfig& config, unsigned threads) {
  PlacementResult result;
  const HeightMap& terrain = state.terrain();
  std::vector<PlacementCandidate> cands = grid_search_3d(oriented, state.container(), terrain, config, threads);
  result.candidates_generated = cands.size();
  if (cands.empty()) return result;

  std::vector<double> scores(cands.size());
  parallel_for(cands.size(), threads == 0 ? planner_threads() : threads, [&](std::size_t k) {
    PlacementCandidate& c = cands[k];
    const ObjectHeightmaps& maps = oriented[c.orientation_index].maps;
    switch (config.heuristic) {
      case Heuristic::HM:
        c.score = state.terrain_sum() + hm_sum_delta(terrain, maps.top, maps.bottom, c.x, c.y, c.Z) +
                  config.c * (c.X + c.Y);
        break;
      case Heuristic::DBLF: c.score = score_dblf(c, config.c); break;
      case Heuristic::MTA: c.score = score_mta(terrain, maps.bottom, c, c.Z, config.resolution); break;
    }
    scores[k] = c.score;
  });
  const std::vector<std::size_t> order = rank_candidates(cands, scores);

  std::vector<std::optional<std::vector<GraspCandidate>>> grasps(oriented.size());
  for (std::size_t r = 0; r < order.size() && r < config.candidate_cap; ++r) {
    const PlacementCandidate& c = cands[order[r]];
    ++result.candidates_checked;
    if (config.stability && !state.check_stability(item.mesh, c.transform, item.mass).stable()) continue;
    if (config.manipulation) {
      auto& g = grasps[c.orientation_index];
      if (!g) {
        // The grasp point in the mesh frame depends on the rotation only.
        try {
          g = grasp_candidates(item.mesh, c.transform, config.gripper, config.grasp_yaw_steps, config.resolution,
                               config.resolution);
        } catch (const NoGraspError&) {
          g = std::vector<GraspCandidate>{};
        }
      }
      if (!is_manip_feasible(c.transform, item.mesh, terrain, config.gripper, *g)) continue;
    }
    result.placement = c;
    return result;
  }
  return result;
}

PackingPlan pack_all(const std::vector<PackItem>& items, const Container& container,
                     const std::vector<std::size_t>& sequence, const SearchConfig& config) {
  config.validate();
  container.validate();
  std::vector<std::size_t> order = sequence;
  if (order.empty()) {
    std::vector<TriangleMesh> meshes;
    for (const PackItem& it : items) meshes.push_back(it.mesh);
    order = sequence_items(meshes);
  }
  std::vector<bool> used(items.size(), false);
  for (std::size_t i : order) {
    if (i >= items.size() || used[i]) throw ValidationError("sequence must list distinct item indices");
    used[i] = true;
  }

  const unsigned threads = planner_threads();
  const std::vector<double> steps = perturbation_steps(config.delta_r);
  PackingPlan plan;
  plan.container = container;
  plan.config = config;
  PackState state(container, config);

  std::vector<std::vector<Attitude>> base(items.size());
  for (std::size_t i : order) {
    base[i] = stable_attitudes(items[i].mesh, config.top_n);
    if (config.force_5d) {
      std::vector<Mat3> seen;
      std::vector<Attitude> all;
      for (double tr : steps) {
        for (double tp : steps) {
          const auto fresh = unseen(perturbed(base[i], tr, tp), seen);
          all.insert(all.end(), fresh.begin(), fresh.end());
        }
      }
      base[i] = all;
    }
  }

  auto commit = [&](std::size_t i, const PlacementResult& r, const std::vector<OrientedItem>& oriented,
                    Fallback fallback) {
    const PlacementCandidate& c = *r.placement;
    state.place(items[i].mesh, c.transform, items[i].mass, oriented[c.orientation_index], c.x, c.y, c.Z);
    PlanStep step;
    step.item = i;
    step.item_id = items[i].id;
    step.mesh_path = items[i].mesh_path;
    step.mass = items[i].mass;
    step.transform = c.transform;
    step.score = c.score;
    step.fallback = fallback;
    step.candidates_generated = r.candidates_generated;
    step.candidates_checked = r.candidates_checked;
    plan.steps.push_back(step);
  };

  std::vector<std::size_t> unplaced;
  for (std::size_t i : order) {
    const auto oriented = orient_item(items[i].mesh, base[i], config);
    const PlacementResult r = pack_one_item(items[i], oriented, state, config, threads);
    if (r.placement) {
      commit(i, r, oriented, Fallback::None);
    } else {
      unplaced.push_back(i);
    }
  }

  for (std::size_t u : unplaced) {
    std::vector<Mat3> seen;
    bool done = false;
    for (std::size_t a = 0; a < steps.size() && !done; ++a) {
      for (std::size_t b = 0; b < steps.size() && !done; ++b) {
        const bool retry = a == 0 && b == 0;
        const std::vector<Attitude> attitudes = unseen(perturbed(base[u], steps[a], steps[b]), seen);
        if (attitudes.empty()) continue;
        const auto oriented = orient_item(items[u].mesh, attitudes, config);
        const PlacementResult r = pack_one_item(items[u], oriented, state, config, threads);
        if (r.placement) {
          commit(u, r, oriented, retry ? Fallback::Resequenced : Fallback::FiveD);
          done = true;
        }
      }
    }
    if (!done) {
      plan.failed_item = u;
      return plan;
    }
  }
  plan.complete = true;
  return plan;
}

unsigned planner_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("STACKPACK_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

}  // namespace stackpack
