#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace reachcert {

// One sparse constraint row: sum of coeff * x[var] (terms) compared to rhs.
struct LpRow {
  std::vector<std::pair<int, double>> terms;
  double rhs = 0.0;
};

// Pure feasibility problem: eq rows hold with equality, le rows with <=.
struct LpProblem {
  int num_vars = 0;
  std::vector<LpRow> eq;
  std::vector<LpRow> le;
};

enum class LpStatus { Feasible, Infeasible, IterationLimit };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd point;      // set when feasible
  double phase1_objective = 0.0;  // artificial-variable sum at termination
  long iterations = 0;
};

// Phase-1 bounded-variable simplex. Feasible iff the artificial sum can be
// driven to <= tol; a returned point is re-checked against every original
// row within 1e-8 relative before it is handed back. max_iters <= 0 picks
// a size-based default. Iteration-limit terminations are reported as their
// own status so callers can distinguish them from proven infeasibility.
LpSolution solve_feasibility(const LpProblem& p, double tol = 1e-9,
                             long max_iters = 0);

}  // namespace reachcert
