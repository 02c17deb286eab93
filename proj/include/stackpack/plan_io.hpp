#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "stackpack/container.hpp"
#include "stackpack/pipeline.hpp"
#include "stackpack/planner.hpp"
#include "stackpack/validator.hpp"

namespace stackpack {

/// Plan document:
///   { "container": {...}, "config": {...}, "complete": bool,
///     "failed_item": index | null,
///     "steps": [ { "item", "item_id", "mesh", "mass",
///                  "transform": { "rpy": [roll, pitch, yaw], "xyz": [x, y, z] },
///                  "score", "fallback", "candidates_generated",
///                  "candidates_checked" } ] }
/// Numbers use the shortest decimal form that reads back to the same double.
std::string plan_to_json(const PackingPlan& plan);
/// Throws FormatError on malformed JSON or missing fields and
/// ValidationError on values that break an invariant.
PackingPlan plan_from_json(const std::string& text);

void write_plan(const std::filesystem::path& path, const PackingPlan& plan);
PackingPlan read_plan(const std::filesystem::path& path);

std::string config_to_json(const SearchConfig& config);
/// Missing keys keep their defaults.
SearchConfig config_from_json(const std::string& text);

/// Accepts a list of [L, W, H] triples or of {"length", "width", "height",
/// "mu_wall"} objects. Throws FormatError or ValidationError.
std::vector<Container> containers_from_json(const std::string& text);

/// Order document:
///   { "items": [ { "mesh": path | "kind": name, "params": [...], "mass",
///                  "count", "id" } ],
///     "containers": [...], "config": {...}, "seed": n, "sequence": [...] }
/// Everything except "items" is optional. Relative mesh paths are resolved
/// against `base_dir`.
PackRequest order_from_json(const std::string& text, const std::filesystem::path& base_dir = {});

std::string report_to_json(const ValidationReport& report);

}  // namespace stackpack
