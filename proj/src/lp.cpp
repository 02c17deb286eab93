#include "stackpack/lp.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "stackpack/errors.hpp"

namespace stackpack {

namespace {

constexpr double kPivotEps = 1e-10;
constexpr double kCostEps = 1e-11;

// Column j of the standard-form problem maps back to an original variable
// with coefficient +1 or -1, or to a slack/artificial (var = -1).
struct Column {
  int var = -1;
  double sign = 1.0;
  bool artificial = false;
};

}  // namespace

std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Feasible: return "feasible";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

void LinearProgram::validate() const {
  const auto n = static_cast<Eigen::Index>(variables);
  auto fail = [](const std::string& what) { throw ValidationError("linear program: " + what); };
  if (A.rows() > 0 && A.cols() != n) fail("A has wrong column count");
  if (G.rows() > 0 && G.cols() != n) fail("G has wrong column count");
  if (b.size() != A.rows()) fail("b length differs from rows of A");
  if (h.size() != G.rows()) fail("h length differs from rows of G");
  if (!nonnegative.empty() && nonnegative.size() != variables) fail("sign-bound vector has wrong length");
  if (!A.allFinite() || !b.allFinite() || !G.allFinite() || !h.allFinite()) fail("non-finite coefficient");
}

double max_violation(const LinearProgram& lp, const Eigen::VectorXd& x) {
  double v = 0.0;
  if (lp.A.rows() > 0) v = std::max(v, (lp.A * x - lp.b).cwiseAbs().maxCoeff());
  if (lp.G.rows() > 0) v = std::max(v, (lp.G * x - lp.h).maxCoeff());
  for (std::size_t j = 0; j < lp.nonnegative.size(); ++j) {
    if (lp.nonnegative[j]) v = std::max(v, -x[static_cast<Eigen::Index>(j)]);
  }
  return v;
}

LpResult solve_feasibility(const LinearProgram& lp, double tol, std::size_t max_iterations) {
  lp.validate();
  const auto n = static_cast<Eigen::Index>(lp.variables);
  LpResult result;

  // Presolve: single-entry rows "g x_j <= 0" with g < 0 are sign bounds.
  std::vector<bool> nonneg = lp.nonnegative.empty() ? std::vector<bool>(lp.variables, false) : lp.nonnegative;
  std::vector<Eigen::Index> ineq_rows;
  for (Eigen::Index r = 0; r < lp.G.rows(); ++r) {
    Eigen::Index nz = 0, last = -1;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (lp.G(r, j) != 0.0) {
        ++nz;
        last = j;
      }
    }
    if (nz == 1 && lp.h[r] == 0.0 && lp.G(r, last) < 0.0) {
      nonneg[static_cast<std::size_t>(last)] = true;
    } else if (nz == 0) {
      if (lp.h[r] < -tol) {
        result.status = LpStatus::Infeasible;
        result.message = "empty inequality row with negative bound";
        return result;
      }
    } else {
      ineq_rows.push_back(r);
    }
  }

  // Standard form columns: structural (split when free), slacks, artificials.
  std::vector<Column> cols;
  for (Eigen::Index j = 0; j < n; ++j) {
    cols.push_back({static_cast<int>(j), 1.0, false});
    if (!nonneg[static_cast<std::size_t>(j)]) cols.push_back({static_cast<int>(j), -1.0, false});
  }
  const auto m_eq = lp.A.rows();
  const auto m_in = static_cast<Eigen::Index>(ineq_rows.size());
  const Eigen::Index m = m_eq + m_in;
  const auto n_struct = static_cast<Eigen::Index>(cols.size());
  for (Eigen::Index r = 0; r < m_in; ++r) cols.push_back({-1, 1.0, false});

  // Row data before artificials, scaled to unit max coefficient and flipped
  // to a nonnegative right-hand side.
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(m, static_cast<Eigen::Index>(cols.size()));
  Eigen::VectorXd rhs(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const bool eq = r < m_eq;
    const Eigen::Index src = eq ? r : ineq_rows[static_cast<std::size_t>(r - m_eq)];
    for (Eigen::Index c = 0; c < n_struct; ++c) {
      const Column& col = cols[static_cast<std::size_t>(c)];
      rows(r, c) = col.sign * (eq ? lp.A(src, col.var) : lp.G(src, col.var));
    }
    if (!eq) rows(r, n_struct + (r - m_eq)) = 1.0;
    rhs[r] = eq ? lp.b[src] : lp.h[src];
    const double scale = rows.cols() > 0 ? rows.row(r).cwiseAbs().maxCoeff() : 0.0;
    if (scale > 0.0) {
      rows.row(r) /= scale;
      rhs[r] /= scale;
    } else if (std::abs(rhs[r]) > tol) {
      result.status = LpStatus::Infeasible;
      result.message = "zero row with nonzero right-hand side";
      return result;
    }
    if (rhs[r] < 0.0) {
      rows.row(r) *= -1.0;
      rhs[r] = -rhs[r];
    }
  }

  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m), -1);
  std::vector<Eigen::Index> art_rows;
  for (Eigen::Index r = m_eq; r < m; ++r) {
    const Eigen::Index slack = n_struct + (r - m_eq);
    if (rows(r, slack) > 0.0) basis[static_cast<std::size_t>(r)] = slack;
  }
  for (Eigen::Index r = 0; r < m; ++r) {
    if (basis[static_cast<std::size_t>(r)] < 0) art_rows.push_back(r);
  }
  const auto n_cols = static_cast<Eigen::Index>(cols.size()) + static_cast<Eigen::Index>(art_rows.size());
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m + 1, n_cols + 1);
  T.block(0, 0, m, rows.cols()) = rows;
  T.block(0, n_cols, m, 1) = rhs;
  for (std::size_t k = 0; k < art_rows.size(); ++k) {
    const Eigen::Index c = rows.cols() + static_cast<Eigen::Index>(k);
    cols.push_back({-1, 1.0, true});
    T(art_rows[k], c) = 1.0;
    basis[static_cast<std::size_t>(art_rows[k])] = c;
    T.row(m) -= T.row(art_rows[k]);
    T(m, c) = 0.0;
  }

  // Phase-I problem data for refactorization: the scaled rows with identity
  // columns for the artificials, and unit cost on the artificials.
  Eigen::MatrixXd full = T.topRows(m);
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(n_cols);
  cost.tail(static_cast<Eigen::Index>(art_rows.size())).setOnes();

  // Rebuilds the tableau from the original data for the current basis, which
  // sheds the error accumulated by repeated row operations.
  auto refactor = [&]() {
    if (m == 0) return;
    Eigen::MatrixXd B(m, m);
    Eigen::VectorXd cb(m);
    for (Eigen::Index r = 0; r < m; ++r) {
      B.col(r) = full.col(basis[static_cast<std::size_t>(r)]);
      cb[r] = cost[basis[static_cast<std::size_t>(r)]];
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
    if (!lu.isInvertible() || lu.rcond() < 1e-12) return;
    const Eigen::MatrixXd body = lu.solve(full);
    if (!body.allFinite()) return;
    T.topRows(m) = body;
    T.row(m).head(n_cols) = cost.transpose() - cb.transpose() * body.leftCols(n_cols);
    T(m, n_cols) = -cb.dot(body.col(n_cols));
    for (Eigen::Index r = 0; r < m; ++r) T(r, n_cols) = std::max(0.0, T(r, n_cols));
  };

  // Entering column: lowest index with negative reduced cost. Leaving row:
  // Harris two-pass test (largest pivot among rows whose ratio is within a
  // small feasibility tolerance of the minimum), falling back to Bland's
  // lowest-index rule after a long run of degenerate pivots.
  constexpr double kFeasTol = 1e-9;
  constexpr std::size_t kRefactorEvery = 32;
  constexpr std::size_t kDegenerateRun = 64;
  std::size_t it = 0;
  std::size_t degenerate = 0;
  bool verified_optimum = false;
  for (;; ++it) {
    Eigen::Index enter = -1;
    for (Eigen::Index c = 0; c < n_cols; ++c) {
      if (T(m, c) < -kCostEps) {
        enter = c;
        break;
      }
    }
    if (enter < 0) {
      // Confirm optimality on a freshly factored tableau.
      if (verified_optimum) break;
      refactor();
      verified_optimum = true;
      --it;
      continue;
    }
    verified_optimum = false;
    if (it >= max_iterations) {
      result.status = LpStatus::Indeterminate;
      result.iterations = it;
      result.message = "iteration limit reached";
      return result;
    }
    Eigen::Index leave = -1;
    if (degenerate < kDegenerateRun) {
      double theta = std::numeric_limits<double>::infinity();
      for (Eigen::Index r = 0; r < m; ++r) {
        const double a = T(r, enter);
        if (a > kPivotEps) theta = std::min(theta, (std::max(0.0, T(r, n_cols)) + kFeasTol) / a);
      }
      double best_pivot = 0.0;
      for (Eigen::Index r = 0; r < m; ++r) {
        const double a = T(r, enter);
        if (a <= kPivotEps || std::max(0.0, T(r, n_cols)) / a > theta) continue;
        if (a > best_pivot) {
          best_pivot = a;
          leave = r;
        }
      }
    } else {
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index r = 0; r < m; ++r) {
        const double a = T(r, enter);
        if (a <= kPivotEps) continue;
        const double ratio = T(r, n_cols) / a;
        if (ratio < best - 1e-12 ||
            (ratio <= best + 1e-12 && basis[static_cast<std::size_t>(r)] < basis[static_cast<std::size_t>(leave)])) {
          best = std::min(best, ratio);
          leave = r;
        }
      }
    }
    // Phase I is bounded below by zero, so an unbounded ray means the cost
    // row has drifted numerically.
    if (leave < 0) {
      result.status = LpStatus::Indeterminate;
      result.iterations = it;
      result.message = "numerical breakdown (unbounded phase-I direction)";
      return result;
    }
    degenerate = T(leave, n_cols) <= kFeasTol ? degenerate + 1 : 0;
    T.row(leave) /= T(leave, enter);
    for (Eigen::Index r = 0; r <= m; ++r) {
      if (r == leave) continue;
      const double f = T(r, enter);
      if (f != 0.0) T.row(r) -= f * T.row(leave);
    }
    for (Eigen::Index r = 0; r < m; ++r) T(r, n_cols) = std::max(0.0, T(r, n_cols));
    basis[static_cast<std::size_t>(leave)] = enter;
    if ((it + 1) % kRefactorEvery == 0) refactor();
  }
  result.iterations = it;
  result.phase1_objective = std::max(0.0, -T(m, n_cols));
  if (result.phase1_objective > tol) {
    result.status = LpStatus::Infeasible;
    result.message = "phase-I optimum above tolerance";
    return result;
  }

  auto extract = [&](const Eigen::VectorXd& values) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (Eigen::Index c = 0; c < values.size(); ++c) {
      const Column& col = cols[static_cast<std::size_t>(c)];
      if (col.var >= 0) x[col.var] += col.sign * values[c];
    }
    return x;
  };

  Eigen::VectorXd tableau_values = Eigen::VectorXd::Zero(n_cols);
  for (Eigen::Index r = 0; r < m; ++r) tableau_values[basis[static_cast<std::size_t>(r)]] = T(r, n_cols);
  const Eigen::VectorXd x_tab = extract(tableau_values.cwiseMax(0.0));

  // Cleanup: re-solve the basic non-artificial columns against the scaled
  // rows to shed accumulated pivoting error.
  Eigen::VectorXd x_qr;
  {
    std::vector<Eigen::Index> basic;
    for (Eigen::Index c : basis) {
      if (!cols[static_cast<std::size_t>(c)].artificial) basic.push_back(c);
    }
    if (!basic.empty() && m > 0) {
      Eigen::MatrixXd B(m, static_cast<Eigen::Index>(basic.size()));
      for (std::size_t k = 0; k < basic.size(); ++k) B.col(static_cast<Eigen::Index>(k)) = rows.col(basic[k]);
      const Eigen::VectorXd xb = B.colPivHouseholderQr().solve(rhs);
      if (xb.allFinite()) {
        Eigen::VectorXd values = Eigen::VectorXd::Zero(n_cols);
        for (std::size_t k = 0; k < basic.size(); ++k) {
          values[basic[k]] = std::max(0.0, xb[static_cast<Eigen::Index>(k)]);
        }
        x_qr = extract(values);
      }
    }
  }

  const double v_tab = max_violation(lp, x_tab);
  const double v_qr = x_qr.size() == n ? max_violation(lp, x_qr) : std::numeric_limits<double>::infinity();
  const bool use_qr = v_qr < v_tab;
  const double v = use_qr ? v_qr : v_tab;
  if (!(v <= tol)) {
    result.status = LpStatus::Indeterminate;
    std::ostringstream msg;
    msg << "verification failed (max violation " << v << ")";
    result.message = msg.str();
    return result;
  }
  result.status = LpStatus::Feasible;
  result.x = use_qr ? x_qr : x_tab;
  return result;
}

void dump_lp(std::ostream& out, const LinearProgram& lp) {
  const auto old_precision = out.precision(10);
  out << "LP variables=" << lp.variables << " equalities=" << lp.A.rows() << " inequalities=" << lp.G.rows()
      << "\n";
  out << "[A | b]\n";
  for (Eigen::Index r = 0; r < lp.A.rows(); ++r) {
    for (Eigen::Index c = 0; c < lp.A.cols(); ++c) out << ' ' << std::setw(17) << lp.A(r, c);
    out << " | " << lp.b[r] << "\n";
  }
  out << "[G | h]\n";
  for (Eigen::Index r = 0; r < lp.G.rows(); ++r) {
    for (Eigen::Index c = 0; c < lp.G.cols(); ++c) out << ' ' << std::setw(17) << lp.G(r, c);
    out << " | " << lp.h[r] << "\n";
  }
  out << "nonnegative:";
  for (std::size_t j = 0; j < lp.nonnegative.size(); ++j) {
    if (lp.nonnegative[j]) out << " x" << j;
  }
  out << "\n";
  out.precision(old_precision);
}

}  // namespace stackpack
