#include "stackpack/plan_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "stackpack/errors.hpp"

namespace stackpack {

using nlohmann::json;

namespace {

json container_json(const Container& c) {
  return {{"length", c.length}, {"width", c.width}, {"height", c.height}, {"mu_wall", c.mu_wall}};
}

Container container_from(const json& j) {
  Container c;
  if (j.is_array()) {
    if (j.size() != 3) throw FormatError("container triple must have 3 entries");
    c.length = j.at(0).get<double>();
    c.width = j.at(1).get<double>();
    c.height = j.at(2).get<double>();
  } else {
    c.length = j.at("length").get<double>();
    c.width = j.at("width").get<double>();
    c.height = j.at("height").get<double>();
    c.mu_wall = j.value("mu_wall", c.mu_wall);
  }
  c.validate();
  return c;
}

json config_json(const SearchConfig& c) {
  return {{"resolution", c.resolution},
          {"xy_step", c.xy_step},
          {"delta_r", c.delta_r},
          {"top_n", c.top_n},
          {"candidate_cap", c.candidate_cap},
          {"heuristic", to_string(c.heuristic)},
          {"c", c.c},
          {"stability", c.stability},
          {"manipulation", c.manipulation},
          {"full_yaw_range", c.full_yaw_range},
          {"force_5d", c.force_5d},
          {"full_reraycast", c.full_reraycast},
          {"mu", c.mu},
          {"scale_factor", c.scale_factor},
          {"cluster_grid", c.cluster_grid},
          {"density", c.density},
          {"gripper", {{"length", c.gripper.length}, {"width", c.gripper.width}}},
          {"grasp_yaw_steps", c.grasp_yaw_steps}};
}

SearchConfig config_from(const json& j) {
  SearchConfig c;
  c.resolution = j.value("resolution", c.resolution);
  c.xy_step = j.value("xy_step", c.xy_step);
  c.delta_r = j.value("delta_r", c.delta_r);
  c.top_n = j.value("top_n", c.top_n);
  c.candidate_cap = j.value("candidate_cap", c.candidate_cap);
  if (j.contains("heuristic")) c.heuristic = parse_heuristic(j.at("heuristic").get<std::string>());
  c.c = j.value("c", c.c);
  c.stability = j.value("stability", c.stability);
  c.manipulation = j.value("manipulation", c.manipulation);
  c.full_yaw_range = j.value("full_yaw_range", c.full_yaw_range);
  c.force_5d = j.value("force_5d", c.force_5d);
  c.full_reraycast = j.value("full_reraycast", c.full_reraycast);
  c.mu = j.value("mu", c.mu);
  c.scale_factor = j.value("scale_factor", c.scale_factor);
  c.cluster_grid = j.value("cluster_grid", c.cluster_grid);
  c.density = j.value("density", c.density);
  if (j.contains("gripper")) {
    c.gripper.length = j.at("gripper").value("length", c.gripper.length);
    c.gripper.width = j.at("gripper").value("width", c.gripper.width);
  }
  c.grasp_yaw_steps = j.value("grasp_yaw_steps", c.grasp_yaw_steps);
  c.validate();
  return c;
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("malformed JSON: ") + e.what());
  }
}

// Runs `f`, turning JSON access errors into FormatError.
template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw FormatError(std::string(what) + ": " + e.what());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string plan_to_json(const PackingPlan& plan) {
  json steps = json::array();
  for (const PlanStep& s : plan.steps) {
    const Vec3& t = s.transform.translation;
    steps.push_back({{"item", s.item},
                     {"item_id", s.item_id},
                     {"mesh", s.mesh_path},
                     {"mass", s.mass},
                     {"transform",
                      {{"rpy", {s.transform.roll, s.transform.pitch, s.transform.yaw}}, {"xyz", {t.x(), t.y(), t.z()}}}},
                     {"score", s.score},
                     {"fallback", to_string(s.fallback)},
                     {"candidates_generated", s.candidates_generated},
                     {"candidates_checked", s.candidates_checked}});
  }
  json doc = {{"container", container_json(plan.container)},
              {"config", config_json(plan.config)},
              {"complete", plan.complete},
              {"failed_item", plan.failed_item ? json(*plan.failed_item) : json(nullptr)},
              {"steps", steps}};
  return dump(doc);
}

PackingPlan plan_from_json(const std::string& text) {
  const json doc = parse(text);
  return guarded("plan document", [&] {
    PackingPlan plan;
    plan.container = container_from(doc.at("container"));
    plan.config = config_from(doc.at("config"));
    plan.complete = doc.at("complete").get<bool>();
    if (!doc.at("failed_item").is_null()) plan.failed_item = doc.at("failed_item").get<std::size_t>();
    for (const json& s : doc.at("steps")) {
      PlanStep step;
      step.item = s.at("item").get<std::size_t>();
      step.item_id = s.value("item_id", std::string());
      step.mesh_path = s.value("mesh", std::string());
      step.mass = s.value("mass", 0.0);
      const json& rpy = s.at("transform").at("rpy");
      const json& xyz = s.at("transform").at("xyz");
      if (rpy.size() != 3 || xyz.size() != 3) throw FormatError("transform needs 3 angles and 3 coordinates");
      step.transform.roll = rpy.at(0).get<double>();
      step.transform.pitch = rpy.at(1).get<double>();
      step.transform.yaw = rpy.at(2).get<double>();
      step.transform.translation = Vec3(xyz.at(0).get<double>(), xyz.at(1).get<double>(), xyz.at(2).get<double>());
      step.score = s.value("score", 0.0);
      step.fallback = parse_fallback(s.value("fallback", std::string("none")));
      step.candidates_generated = s.value("candidates_generated", std::size_t{0});
      step.candidates_checked = s.value("candidates_checked", std::size_t{0});
      plan.steps.push_back(step);
    }
    return plan;
  });
}

void write_plan(const std::filesystem::path& path, const PackingPlan& plan) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << plan_to_json(plan);
  if (!out) throw std::runtime_error("error while writing " + path.string());
}

PackingPlan read_plan(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open plan file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return plan_from_json(buf.str());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string config_to_json(const SearchConfig& config) { return dump(config_json(config)); }

SearchConfig config_from_json(const std::string& text) {
  const json j = parse(text);
  return guarded("config", [&] { return config_from(j); });
}

std::vector<Container> containers_from_json(const std::string& text) {
  const json j = parse(text);
  return guarded("container list", [&] {
    if (!j.is_array() || j.empty()) throw FormatError("container list must be a nonempty array");
    std::vector<Container> out;
    for (const json& c : j) out.push_back(container_from(c));
    return out;
  });
}

PackRequest order_from_json(const std::string& text, const std::filesystem::path& base_dir) {
  const json j = parse(text);
  return guarded("order", [&] {
    PackRequest req;
    const json& items = j.at("items");
    if (!items.is_array() || items.empty()) throw FormatError("\"items\" must be a nonempty array");
    for (const json& e : items) {
      ItemEntry entry;
      if (e.contains("mesh")) {
        std::filesystem::path p = e.at("mesh").get<std::string>();
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        entry.mesh_path = p.string();
      } else if (e.contains("kind")) {
        entry.kind = parse_item_kind(e.at("kind").get<std::string>());
        entry.params = e.value("params", std::vector<double>{});
      } else {
        throw FormatError("item entry needs \"mesh\" or \"kind\"");
      }
      entry.mass = e.value("mass", 0.0);
      entry.count = e.value("count", std::size_t{1});
      entry.id = e.value("id", std::string());
      req.items.push_back(std::move(entry));
    }
    if (j.contains("containers")) {
      for (const json& c : j.at("containers")) req.containers.push_back(container_from(c));
    }
    if (j.contains("config")) req.config = config_from(j.at("config"));
    req.seed = j.value("seed", std::uint64_t{0});
    req.sequence = j.value("sequence", std::vector<std::size_t>{});
    return req;
  });
}

std::string report_to_json(const ValidationReport& report) {
  json steps = json::array();
  for (const StepReport& r : report.steps) {
    steps.push_back({{"step", r.step},
                     {"item", r.item},
                     {"item_id", r.item_id},
                     {"penetration", r.penetration},
                     {"containment_margin", r.containment_margin},
                     {"stability", r.stability ? json(to_string(*r.stability)) : json(nullptr)},
                     {"manipulable", r.manipulable ? json(*r.manipulable) : json(nullptr)},
                     {"pass", r.pass},
                     {"failure", r.failure}});
  }
  return dump({{"pass", report.pass},
               {"first_failure", report.first_failure ? json(*report.first_failure) : json(nullptr)},
               {"steps", steps}});
}

}  // namespace stackpack
