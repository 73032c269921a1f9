#pragma once

#include <vector>

#include "tango/model.hpp"

namespace tango {

/// min_x max_i f_i(x), optionally with the objectives organized as a ring and
/// with extra constraints on x.
struct MinimaxProblem {
  int n = 0;
  std::vector<Function> objectives;
  bool ring = false;  // objectives in cyclic neighbour order
  std::vector<Constraint> constraints;
};

/// Epigraph form over (x, z): minimize z subject to f_i(x) - z <= 0, with the
/// extra constraints lifted unchanged. Constraint i < m is objective i; the
/// extra constraints follow in their original order.
Problem epigraph_reformulate(const MinimaxProblem& mp);

/// Lifts x0 to (x0, max_i f_i(x0)) so that no objective starts violated.
Vector epigraph_start(const MinimaxProblem& mp, const Vector& x0);

struct MinimaxResult {
  SolveResult solve;  // on the lifted (n+1)-dimensional problem
  Vector x;
  double z = 0.0;
  Vector objective_values;
  std::vector<int> active_objectives;
};

MinimaxResult run_minimax(const MinimaxProblem& mp, const Vector& x0, const SolverConfig& cfg,
                          const IterationObserver& observer = {});

}  // namespace tango
