#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stackpack/errors.hpp"
#include "stackpack/items.hpp"
#include "stackpack/mesh_io.hpp"
#include "stackpack/pipeline.hpp"
#include "stackpack/plan_io.hpp"
#include "stackpack/validator.hpp"

namespace fs = std::filesystem;
using namespace stackpack;

namespace {

/// Flags shared by pack; unset options leave the loaded config alone.
struct ConfigFlags {
  std::optional<std::string> heuristic;
  std::optional<double> resolution;
  std::optional<double> xy_step;
  std::optional<double> delta_r;
  std::optional<std::size_t> top_n;
  std::optional<std::size_t> candidate_cap;
  std::optional<double> mu;
  std::optional<double> scale_factor;
  bool no_stability = false;
  bool no_manip = false;

  void add_to(CLI::App& app) {
    app.add_option("--heuristic", heuristic, "Placement score")->check(CLI::IsMember({"hm", "dblf", "mta"}));
    app.add_option("--resolution", resolution, "Heightmap cell size in meters");
    app.add_option("--xy-step", xy_step, "Translation step in meters");
    app.add_option("--delta-r", delta_r, "Rotation step in radians");
    app.add_option("--top-n-orientations", top_n, "Stable orientations tried per item");
    app.add_option("--candidate-cap", candidate_cap, "Ranked candidates checked per item");
    app.add_option("--mu", mu, "Friction coefficient between items");
    app.add_option("--scale-factor", scale_factor, "Inflation of placed items for contact detection");
    app.add_flag("--no-stability", no_stability, "Skip the stability check");
    app.add_flag("--no-manip", no_manip, "Skip the gripper check");
  }

  void apply(SearchConfig& c) const {
    if (heuristic) c.heuristic = parse_heuristic(*heuristic);
    if (resolution) c.resolution = *resolution;
    if (xy_step) c.xy_step = *xy_step;
    if (delta_r) c.delta_r = *delta_r;
    if (top_n) c.top_n = *top_n;
    if (candidate_cap) c.candidate_cap = *candidate_cap;
    if (mu) c.mu = *mu;
    if (scale_factor) c.scale_factor = *scale_factor;
    if (no_stability) c.stability = false;
    if (no_manip) c.manipulation = false;
  }
};

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// A value that is either inline JSON or the path of a JSON file.
std::string json_argument(const std::string& value) {
  const auto first = value.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (value[first] == '[' || value[first] == '{')) return value;
  return read_text(value);
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + out);
  f << text;
  if (!f) throw std::runtime_error("error while writing " + out);
}

/// Writes procedural meshes next to the plan and points the steps at them so
/// the plan can be validated and exported later.
void persist_generated(PackOutcome& outcome, const fs::path& plan_path) {
  const fs::path dir_name = plan_path.stem().string() + "_items";
  const fs::path dir = plan_path.parent_path() / dir_name;
  bool created = false;
  for (PlanStep& step : outcome.plan.steps) {
    if (!step.mesh_path.empty()) continue;
    if (!created) {
      fs::create_directories(dir);
      created = true;
    }
    const std::string file = "item_" + std::to_string(step.item) + ".obj";
    write_obj(dir / file, outcome.items.at(step.item).mesh);
    step.mesh_path = (dir_name / file).generic_string();
  }
}

/// Mesh for every item index referenced by the plan. Relative paths are tried
/// against the working directory, then the plan's directory.
std::vector<PackItem> plan_items(const PackingPlan& plan, const fs::path& plan_path) {
  std::size_t n = 0;
  for (const PlanStep& s : plan.steps) n = std::max(n, s.item + 1);
  std::vector<PackItem> items(n);
  std::vector<bool> seen(n, false);
  for (const PlanStep& s : plan.steps) {
    if (seen[s.item]) continue;
    if (s.mesh_path.empty()) throw FormatError("step for item " + s.item_id + " has no mesh path");
    fs::path p = s.mesh_path;
    if (p.is_relative() && !fs::exists(p)) p = plan_path.parent_path() / p;
    items[s.item].mesh = load_mesh(p);
    items[s.item].id = s.item_id;
    items[s.item].mesh_path = s.mesh_path;
    items[s.item].mass = s.mass;
    seen[s.item] = true;
  }
  return items;
}

int run_pack_command(const std::vector<std::string>& inputs, const ConfigFlags& flags,
                     const std::optional<std::string>& containers, std::optional<std::uint64_t> seed,
                     const std::string& out) {
  PackRequest req;
  if (inputs.size() == 1 && fs::path(inputs[0]).extension() == ".json") {
    req = order_from_json(read_text(inputs[0]), fs::path(inputs[0]).parent_path());
  } else {
    for (const std::string& in : inputs) {
      ItemEntry e;
      e.mesh_path = in;
      req.items.push_back(e);
    }
  }
  if (containers) req.containers = containers_from_json(json_argument(*containers));
  if (req.containers.empty()) throw ValidationError("no containers given; use --containers or the order file");
  if (seed) req.seed = *seed;
  flags.apply(req.config);

  PackOutcome outcome = run_pack(req);
  if (outcome.exit_code == kExitInputError) {
    std::cerr << "error: " << outcome.message << "\n";
    return outcome.exit_code;
  }
  if (!out.empty() && out != "-") persist_generated(outcome, out);
  emit(plan_to_json(outcome.plan), out);
  if (outcome.exit_code != kExitOk) {
    std::cerr << "no solution: " << outcome.message << "\n";
  } else {
    std::cerr << "packed " << outcome.plan.steps.size() << " items into container " << *outcome.container_index
              << "\n";
  }
  return outcome.exit_code;
}

int run_validate_command(const std::string& plan_path, const std::string& out) {
  const PackingPlan plan = read_plan(plan_path);
  const ValidationReport report = validate_plan(plan, plan_items(plan, plan_path));
  emit(report_to_json(report), out);
  if (!report.pass) {
    const StepReport& s = report.steps.at(*report.first_failure);
    std::cerr << "step " << s.step << " (" << s.item_id << "): " << s.failure << "\n";
  }
  return report.pass ? kExitOk : kExitNoSolution;
}

int run_gen_command(const std::string& kind_name, const std::vector<double>& params, std::uint64_t seed,
                    std::size_t count, const std::string& out) {
  const ItemKind kind = parse_item_kind(kind_name);
  if (out.empty()) throw ValidationError("gen-items needs --out <dir>");
  fs::create_directories(out);
  for (std::size_t k = 0; k < count; ++k) {
    const fs::path path = fs::path(out) / (kind_name + "_" + std::to_string(k) + ".obj");
    write_obj(path, generate_test_item(kind, params, seed + k));
    std::cout << path.string() << "\n";
  }
  return kExitOk;
}

int run_export_command(const std::string& plan_path, const std::string& out) {
  if (out.empty()) throw ValidationError("export needs --out <dir>");
  const PackingPlan plan = read_plan(plan_path);
  for (const fs::path& p : export_scene(plan, plan_items(plan, plan_path), out)) std::cout << p.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Top-down packing planner for irregular rigid items"};
  app.require_subcommand(1);

  std::string out;
  std::vector<std::string> inputs;
  ConfigFlags flags;
  std::optional<std::string> containers;
  std::optional<std::uint64_t> seed;
  CLI::App* pack = app.add_subcommand("pack", "Plan an order; prints or writes the plan JSON");
  pack->add_option("inputs", inputs, "Order JSON file, or mesh files (OBJ/STL/OFF)")->required();
  flags.add_to(*pack);
  pack->add_option("--containers", containers, "Container list: inline JSON or a JSON file");
  pack->add_option("--seed", seed, "Seed for procedural items");
  pack->add_option("--out", out, "Plan output path (default stdout)");

  std::string plan_path;
  CLI::App* validate = app.add_subcommand("validate", "Replay a plan and check every step");
  validate->add_option("plan", plan_path, "Plan JSON")->required();
  validate->add_option("--out", out, "Report output path (default stdout)");

  std::string kind;
  std::vector<double> params;
  std::uint64_t gen_seed = 0;
  std::size_t count = 1;
  CLI::App* gen = app.add_subcommand("gen-items", "Write procedural test items as OBJ files");
  gen->add_option("kind", kind, "box, lshape, bowl or wedge")->required();
  gen->add_option("--params", params, "Dimensions in meters; random when omitted")->delimiter(',');
  gen->add_option("--seed", gen_seed, "Seed of the first item");
  gen->add_option("--count", count, "Number of items; item k uses seed + k");
  gen->add_option("--out", out, "Output directory")->required();

  CLI::App* exp = app.add_subcommand("export", "Write per-step scene OBJs and the final heightmap");
  exp->add_option("plan", plan_path, "Plan JSON")->required();
  exp->add_option("--out", out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*pack) return run_pack_command(inputs, flags, containers, seed, out);
    if (*validate) return run_validate_command(plan_path, out);
    if (*gen) return run_gen_command(kind, params, gen_seed, count, out);
    if (*exp) return run_export_command(plan_path, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
