#pragma once

#include <stdexcept>
#include <vector>

#include "tango/model.hpp"

namespace tango {

/// More constraints would be active than there are variables.
class ActiveSetOverflowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Constraints currently treated as equalities. Equality constraints are
/// always members; active box constraints block their variable.
struct ActiveSetState {
  std::vector<int> active;  // sorted constraint indices

  bool contains(int i) const;
  void insert(int i);
  void erase(int i);

  /// Variables held fixed by active box constraints (sorted).
  std::vector<int> blocked_variables(const Problem& p) const;
  /// Active constraints that are not box constraints, in index order.
  std::vector<int> general_active(const Problem& p) const;
};

ActiveSetState initial_state(const Problem& p);

struct Activation {
  ActiveSetState state;
  Vector x;
  std::vector<Event> events;
};

/// Activates every violated constraint (g_i(x) > 0). Box constraints are also
/// projected onto their bound. Ring members are activated only when they are
/// violated local maxima of g along the ring (a plateau counts once, at its
/// first member) and their gradient is independent of the active set.
/// Throws ActiveSetOverflowError when more than n constraints would be active.
Activation activate_violated(const ActiveSetState& state, const Problem& p, const Vector& x,
                             const SolverConfig& cfg = {});

/// Multipliers for `state.active` (same order). General constraints solve the
/// Gram system over the non-blocked coordinates; box multipliers follow by
/// back-substitution, assuming every active box constraint holds exactly.
Vector solve_reduced_multipliers(const ActiveSetState& state, const Problem& p, const Vector& x,
                                 double eta, double rho_min = 1e-12);

struct Deactivation {
  ActiveSetState state;
  Vector multipliers;  // aligned with state.active
  std::vector<Event> events;
  double eta = 0.0;
};

/// Removes the inequality with the most negative multiplier (lowest index on
/// ties) and re-solves, until every inequality multiplier is nonnegative.
/// Equality constraints are never removed.
Deactivation deactivation_loop(const ActiveSetState& state, const Problem& p, const Vector& x,
                               double eta, const SolverConfig& cfg = {});

/// Active-set iteration for mixed equality, inequality, and box constraints.
SolveResult run_active_set(const Problem& p, const Vector& x0, const SolverConfig& cfg,
                           const IterationObserver& observer = {});

}  // namespace tango
