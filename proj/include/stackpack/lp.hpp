#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace stackpack {

/// Feasibility problem: find x with A x = b and G x <= h.
struct LinearProgram {
  std::size_t variables = 0;
  Eigen::MatrixXd A;  ///< m x n, may have zero rows.
  Eigen::VectorXd b;
  Eigen::MatrixXd G;  ///< p x n, may have zero rows.
  Eigen::VectorXd h;
  /// Optional per-variable sign bound (x_j >= 0). Empty means all free.
  std::vector<bool> nonnegative;

  /// Throws ValidationError on inconsistent sizes or non-finite coefficients.
  void validate() const;
};

enum class LpStatus { Feasible, Infeasible, Indeterminate };

std::string to_string(LpStatus s);

struct LpResult {
  LpStatus status = LpStatus::Indeterminate;
  Eigen::VectorXd x;  ///< Set when Feasible.
  std::size_t iterations = 0;
  double phase1_objective = 0.0;
  std::string message;
};

inline constexpr double kLpTolerance = 1e-7;
inline constexpr std::size_t kLpIterationLimit = 10000;

/// Phase-I simplex with Bland's rule on a dense tableau. A Feasible result is
/// re-verified by substitution: |A x - b| <= tol and G x <= h + tol, and
/// x_j >= -tol for sign-bounded variables. Indeterminate on the iteration
/// limit or when no verified point can be recovered.
LpResult solve_feasibility(const LinearProgram& lp, double tol = kLpTolerance,
                           std::size_t max_iterations = kLpIterationLimit);

/// Largest violation of the constraints (and sign bounds) at x.
double max_violation(const LinearProgram& lp, const Eigen::VectorXd& x);

/// Plain-text dump of (A, b, G, h) and the sign bounds.
void dump_lp(std::ostream& out, const LinearProgram& lp);

}  // namespace stackpack
