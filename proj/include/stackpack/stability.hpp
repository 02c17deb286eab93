#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "stackpack/container.hpp"
#include "stackpack/geometry.hpp"
#include "stackpack/lp.hpp"

namespace stackpack {

inline constexpr double kGravity = 9.81;
inline constexpr double kDefaultDensity = 500.0;  // kg/m^3
inline constexpr int kContainerBody = 0;

/// Point contact; the force on body_b is f, on body_a it is -f.
struct Contact {
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();  ///< Unit, pointing from body_a into body_b.
  double mu = 0.0;
  int body_a = 0;
  int body_b = 0;
};

struct BodyState {
  int id = 0;
  double mass = 0.0;  ///< kg
  Vec3 com = Vec3::Zero();
};

struct EquilibriumProblem {
  std::vector<BodyState> bodies;  ///< Non-container bodies that must balance.
  std::vector<Contact> contacts;
  int cone_sides = 4;
};

enum class StabilityVerdict { Stable, Unstable, Indeterminate };

const char* to_string(StabilityVerdict v);

struct StabilityResult {
  StabilityVerdict verdict = StabilityVerdict::Indeterminate;
  /// Contact forces in newtons, one per contact, when Stable.
  std::vector<Vec3> forces;
  std::vector<Contact> contacts;
  LpResult lp;
  bool stable() const { return verdict == StabilityVerdict::Stable; }
};

using Arrangement = std::vector<std::pair<TriangleMesh, RigidTransform>>;

struct StabilityOptions {
  double mu = 0.7;            ///< Friction between items.
  double scale = 1.03;        ///< Inflation about each COM for contact search.
  double cluster_grid = 0.01;  ///< Contact merge voxel, meters.
  int cone_sides = 4;
  double density = kDefaultDensity;
  /// Per-body masses in kg; entries <= 0 (or a short vector) use density.
  std::vector<double> masses;
  double tol = kLpTolerance;
  /// When set, the equilibrium LP is written here before solving.
  std::ostream* dump = nullptr;
};

/// A world-space body inflated for contact search, with cached bounds.
struct ScaledBody {
  TriangleMesh mesh;  ///< Inflated world mesh.
  Aabb bounds;
  std::vector<Aabb> triangle_bounds;
  BodyState state;
  /// Largest outward displacement caused by inflation, meters.
  double inflation = 0.0;
};

/// Inflates `world_mesh` by `scale` about its COM. Mass from density unless
/// `mass` > 0.
ScaledBody prepare_body(const TriangleMesh& world_mesh, int id, double scale, double density, double mass = 0.0);

/// Unclustered contacts between two inflated bodies (a.state.id < b.state.id).
std::vector<Contact> body_contacts(const ScaledBody& a, const ScaledBody& b, double mu);
/// Unclustered contacts between an inflated body and the floor and walls.
std::vector<Contact> container_contacts(const ScaledBody& body, const Container& container);

/// Merges contacts sharing (body pair, voxel of size `grid`, dominant signed
/// axis of the normal) into one at the centroid with the renormalized mean
/// normal. Output is ordered by that key. Throws ValidationError for grid <= 0.
std::vector<Contact> cluster_contacts(const std::vector<Contact>& contacts, double grid);

/// Contacts of the inflated arrangement; body i of `arrangement` gets id i+1.
/// Throws ValidationError for scale <= 1.
std::vector<Contact> detect_contacts(const Arrangement& arrangement, const Container& container, double scale,
                                     double cluster_grid, double mu = 0.7);

/// Static equilibrium LP over a pyramidal friction cone inscribed in the
/// Coulomb cone. Infeasible maps to Unstable, solver failure to
/// Indeterminate.
StabilityResult solve_equilibrium(const EquilibriumProblem& problem, double tol = kLpTolerance,
                                  std::ostream* dump = nullptr);

/// Detects contacts and solves the equilibrium LP for every item.
StabilityResult is_stable(const Arrangement& arrangement, const Container& container,
                          const StabilityOptions& options = {});

}  // namespace stackpack
