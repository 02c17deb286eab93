#include "stackpack/pipeline.hpp"

#include <algorithm>
#include <cstdio>

#include "stackpack/errors.hpp"
#include "stackpack/mesh_io.hpp"

namespace stackpack {

std::vector<PackItem> load_items(const PackRequest& request) {
  std::vector<PackItem> out;
  for (const ItemEntry& e : request.items) {
    if (e.count < 1) throw ValidationError("item count must be at least 1");
    TriangleMesh mesh;
    std::string id = e.id;
    if (!e.mesh_path.empty()) {
      mesh = load_mesh(e.mesh_path);
      if (id.empty()) id = std::filesystem::path(e.mesh_path).stem().string();
    } else if (!e.kind) {
      throw ValidationError("item entry needs a mesh path or a procedural kind");
    } else if (id.empty()) {
      id = to_string(*e.kind);
    }
    for (std::size_t k = 0; k < e.count; ++k) {
      PackItem item;
      item.mesh = e.mesh_path.empty() ? generate_test_item(*e.kind, e.params, request.seed + out.size()) : mesh;
      item.id = e.count > 1 ? id + "#" + std::to_string(k + 1) : id;
      item.mesh_path = e.mesh_path;
      item.mass = e.mass;
      out.push_back(std::move(item));
    }
  }
  if (out.empty()) throw ValidationError("the order holds no items");
  return out;
}

PackOutcome run_pack(const std::vector<PackItem>& items, const std::vector<Container>& containers,
                     const SearchConfig& config, const std::vector<std::size_t>& sequence) {
  PackOutcome outcome;
  outcome.items = items;
  try {
    if (containers.empty()) throw ValidationError("no containers given");
    for (const Container& c : containers) c.validate();
    config.validate();
  } catch (const std::exception& e) {
    outcome.exit_code = kExitInputError;
    outcome.message = e.what();
    return outcome;
  }
  std::vector<std::size_t> order(containers.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return containers[a].volume() < containers[b].volume(); });
  for (std::size_t ci : order) {
    outcome.plan = pack_all(items, containers[ci], sequence, config);
    if (outcome.plan.complete) {
      outcome.container_index = ci;
      outcome.exit_code = kExitOk;
      outcome.message = "packed " + std::to_string(items.size()) + " items into container " + std::to_string(ci);
      return outcome;
    }
  }
  outcome.exit_code = kExitNoSolution;
  outcome.message = "no container admits a complete plan";
  return outcome;
}

PackOutcome run_pack(const PackRequest& request) {
  std::vector<PackItem> items;
  try {
    items = load_items(request);
  } catch (const std::exception& e) {
    PackOutcome outcome;
    outcome.exit_code = kExitInputError;
    outcome.message = e.what();
    return outcome;
  }
  return run_pack(items, request.containers, request.config, request.sequence);
}

std::vector<std::filesystem::path> export_scene(const PackingPlan& plan, const std::vector<PackItem>& items,
                                                const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  const TriangleMesh shell = container_shell(plan.container);
  written.push_back(dir / "container.obj");
  write_obj(written.back(), shell);

  std::vector<TriangleMesh> scene{shell};
  std::vector<TriangleMesh> placed;
  for (std::size_t k = 0; k < plan.steps.size(); ++k) {
    const PlanStep& s = plan.steps[k];
    if (s.item >= items.size()) throw ValidationError("plan step names unknown item " + std::to_string(s.item));
    placed.push_back(transform_mesh(items[s.item].mesh, s.transform));
    scene.push_back(placed.back());
    char name[32];
    std::snprintf(name, sizeof name, "step_%03zu.obj", k + 1);
    written.push_back(dir / name);
    write_obj(written.back(), merge_meshes(scene));
  }
  if (!plan.steps.empty()) {
    written.push_back(dir / "final_heightmap.pgm");
    write_pgm(written.back(), container_heightmap(plan.container, placed, plan.config.resolution));
  }
  return written;
}

}  // namespace stackpack
