#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tango/model.hpp"

namespace tango {

class InsufficientTailError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Spectral radius of the Jacobian of the iteration map
///   S(x) = x - eta grad f(x) - grad g(x) Lambda(x)
/// at x_star, where Lambda solves the Gram system for the `active`
/// constraints (all equality constraints when empty). The Jacobian is built
/// by central differences and its radius estimated by 200 steps of power
/// iteration from a seeded random start.
double spectral_radius_iteration_map(const Problem& p, const Vector& x_star, double eta,
                                     const std::vector<int>& active = {},
                                     std::uint64_t seed = 0);

struct ReportOptions {
  int min_tail = 20;           // fewest error samples the fit accepts
  int drop_last = 5;           // trailing records biased by using the last iterate as x*
  double error_floor = 1e-11;  // relative to 1 + ||x*||
  double constraint_floor = 1e-14;
};

struct ConvergenceReport {
  double rate = 0.0;         // fitted L from the log-error slope
  double rate_r2 = 0.0;      // coefficient of determination of that fit
  double error_slope = 0.0;  // d log||x_k - x*|| / dk
  /// d log||g(x_k)|| / dk; -infinity when constraints vanish (e.g. linear ones).
  double constraint_slope = 0.0;
  std::optional<double> slope_ratio;  // constraint_slope / error_slope
  std::optional<double> spectral_radius;
  std::vector<double> errors;
  int fit_begin = 0;
  int fit_end = 0;
  bool linear = false;          // R^2 > 0.99 and 0 < L < 1
  bool decay_verified = false;  // slope ratio within [1.7, 2.3]
};

/// Fits the linear rate of ||x_k - x*|| and the decay rate of the active
/// constraint values over the tail of `trace`. Throws InsufficientTailError
/// when fewer than options.min_tail usable samples remain.
ConvergenceReport convergence_report(const std::vector<IterationRecord>& trace,
                                     const Vector& x_star, const ReportOptions& options = {});

/// Largest componentwise |analytic - fd| / max(|analytic|, |fd|, 1), using
/// central differences with h = 1e-6 (1 + |p_i|).
double check_gradient(const Function& fn, const Vector& p);

/// Smallest eigenvalue of the Lagrangian Hessian (second differences of
/// gradients) restricted to the tangent space of the active constraints.
/// `multipliers` holds one entry per constraint. Returns +infinity when the
/// tangent space is trivial.
double second_order_probe(const Problem& p, const Vector& x_star, const std::vector<int>& active,
                          const Vector& multipliers, double rho_min = 1e-12);

}  // namespace tango
