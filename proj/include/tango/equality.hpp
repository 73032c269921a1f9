#pragma once

#include <stdexcept>
#include <vector>

#include "tango/model.hpp"

namespace tango {

class MaxIterationsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solves (G^T G) lambda = g - eta G^T grad_f, where the columns of G are the
/// constraint gradients. Throws RankDeficientError when the smallest
/// eigenvalue of the Gram matrix is below rho_min times the largest.
Vector solve_multiplier_system(const Matrix& G, const Vector& g, const Vector& grad_f,
                               double eta, double rho_min);

/// Iteration multipliers for the equality constraints of `p` at x.
Vector compute_multipliers(const Problem& p, const Vector& x, double eta, double rho_min = 1e-12);

struct EqualityStep {
  Vector x_next;
  Vector multipliers;
};

/// x_next = x - eta grad f(x) - grad g(x) lambda, which satisfies the Newton
/// condition Dg(x) (x_next - x) = -g(x).
EqualityStep equality_step(const Problem& p, const Vector& x, double eta, double rho_min = 1e-12);

/// Gradient/Newton iteration for problems with equality constraints only.
/// Stops when the step norm drops below cfg.tol.
SolveResult run_equality(const Problem& p, const Vector& x0, const SolverConfig& cfg,
                         const IterationObserver& observer = {});

/// Plain fixed-step steepest descent, the unconstrained baseline.
SolveResult steepest_descent(const Function& f, const Vector& x0, const SolverConfig& cfg,
                             const IterationObserver& observer = {});

/// Under-determined Newton iteration x <- x - Dg(x)^+ g(x) until ||g|| < cfg.tol.
/// Throws RankDeficientError or MaxIterationsError.
Vector newton_restore(const std::vector<Function>& g, const Vector& x0, const SolverConfig& cfg);

}  // namespace tango
