#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stackpack/container.hpp"
#include "stackpack/items.hpp"
#include "stackpack/planner.hpp"

namespace stackpack {

/// One line of an order: a mesh file or a procedural item, repeated `count`
/// times.
struct ItemEntry {
  std::string mesh_path;          ///< Loaded when set.
  std::optional<ItemKind> kind;   ///< Generated when no mesh path is given.
  std::vector<double> params;     ///< Procedural dimensions; empty = random.
  double mass = 0.0;
  std::size_t count = 1;
  std::string id;  ///< Defaults to the file stem or the kind name.
};

struct PackRequest {
  std::vector<ItemEntry> items;
  /// Tried in order of increasing volume.
  std::vector<Container> containers;
  SearchConfig config;
  /// Seed for procedural items; entry k of the expanded order uses seed + k.
  std::uint64_t seed = 0;
  /// Optional user sequence over the expanded item list.
  std::vector<std::size_t> sequence;
};

/// Process exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitInputError = 1, kExitNoSolution = 2 };

struct PackOutcome {
  int exit_code = kExitOk;
  std::string message;
  PackingPlan plan;  ///< Winning plan, or the last attempt on failure.
  std::optional<std::size_t> container_index;  ///< Into request.containers.
  std::vector<PackItem> items;                 ///< The expanded order.
};

/// Expands counts, loads meshes and generates procedural items. Throws
/// FormatError or ValidationError naming the offending entry.
std::vector<PackItem> load_items(const PackRequest& request);

/// Packs into the smallest container that admits a complete plan. Input
/// problems yield exit code 1 with a message instead of an exception.
PackOutcome run_pack(const PackRequest& request);
/// Same, for items already in memory.
PackOutcome run_pack(const std::vector<PackItem>& items, const std::vector<Container>& containers,
                     const SearchConfig& config, const std::vector<std::size_t>& sequence = {});

/// Writes container.obj, one step_NNN.obj per placed item (container shell
/// plus everything placed so far) and, when the plan has steps,
/// final_heightmap.pgm. Returns the written paths. Throws std::runtime_error
/// naming the path on I/O failure.
std::vector<std::filesystem::path> export_scene(const PackingPlan& plan, const std::vector<PackItem>& items,
                                                const std::filesystem::path& dir);

}  // namespace stackpack
