#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tango/expr.hpp"

namespace tango {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// The active constraint gradients are (numerically) linearly dependent, so
/// the point is not regular and the multiplier system has no unique solution.
class RankDeficientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scalar function of x with its exact gradient.
class Function {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradientFn = std::function<Vector(const Vector&)>;

  Function(ValueFn value, GradientFn gradient)
      : value_(std::move(value)), gradient_(std::move(gradient)) {}

  static Function from_expression(Expression e);

  double operator()(const Vector& x) const { return value_(x); }
  Vector gradient(const Vector& x) const { return gradient_(x); }

 private:
  ValueFn value_;
  GradientFn gradient_;
};

enum class ConstraintKind { Equality, Inequality, BoxLower, BoxUpper };

/// g(x) = 0 for equalities and g(x) <= 0 otherwise. Box constraints store the
/// variable and bound; their g is a - x_i (lower) or x_i - b (upper).
struct Constraint {
  ConstraintKind kind;
  Function g;
  int var = -1;  // 0-based, box kinds only
  double bound = 0.0;

  bool is_box() const noexcept {
    return kind == ConstraintKind::BoxLower || kind == ConstraintKind::BoxUpper;
  }
  bool is_equality() const noexcept { return kind == ConstraintKind::Equality; }

  static Constraint equality(Function g);
  static Constraint inequality(Function g);
  static Constraint box_lower(int dimension, int var, double lower);
  static Constraint box_upper(int dimension, int var, double upper);
};

/// min f(x) subject to the constraint list. `ring`, when non-empty, lists
/// inequality constraint indices in cyclic neighbour order: each entry's
/// neighbours are the previous and next entries, wrapping around.
struct Problem {
  int n = 0;
  Function objective;
  std::vector<Constraint> constraints;
  std::vector<int> ring;

  int num_constraints() const noexcept { return static_cast<int>(constraints.size()); }
  int num_equalities() const noexcept;
};

enum class DeactivationPolicy { MostNegative, WarnOnMultiple };

struct SolverConfig {
  double eta = 0.1;
  double tol = 1e-10;
  int max_iters = 10000;
  double rho_min = 1e-12;
  DeactivationPolicy policy = DeactivationPolicy::MostNegative;
  /// Halve eta on "going too fast" warnings and on divergence (step norm 10x
  /// larger than five iterations earlier).
  bool halve_eta = false;
  /// Relative residual below which a ring leader's gradient counts as
  /// dependent on the active set; such leaders are not activated.
  double leader_independence = 1e-6;

  /// Throws std::invalid_argument on eta <= 0, tol <= 0, max_iters < 1, rho_min <= 0.
  void validate() const;
};

struct Event {
  enum class Type { Activate, Deactivate, Project, WarnTooFast, HalveEta, SkipDependent };

  Type type;
  int index = -1;      // constraint index
  double value = 0.0;  // Project: bound; HalveEta: new eta
  int count = 0;       // WarnTooFast: number of simultaneous candidates

  static Event activate(int i) { return {Type::Activate, i}; }
  static Event deactivate(int i) { return {Type::Deactivate, i}; }
  static Event project(int i, double bound) { return {Type::Project, i, bound}; }
  static Event warn_too_fast(int count) { return {Type::WarnTooFast, -1, 0.0, count}; }
  static Event halve_eta(double eta) { return {Type::HalveEta, -1, eta}; }
  static Event skip_dependent(int i) { return {Type::SkipDependent, i}; }

  friend bool operator==(const Event&, const Event&) = default;
};

const char* to_string(Event::Type t);

/// One pass of a solver loop. `x` is the point the step was taken from
/// (after any projection), `multipliers` the raw iteration multipliers aligned
/// with `active`, `step_norm` the norm of x^(k+1) - x^(k).
struct IterationRecord {
  int k = 0;
  Vector x;
  double f = 0.0;
  Vector g;
  std::vector<int> active;
  std::vector<double> multipliers;
  double step_norm = 0.0;
  std::vector<Event> events;
};

enum class Status { Converged, MaxIterations, NumericalFailure };
enum class Failure { None, RankDeficient, ActiveSetOverflow, NonFinite };

const char* to_string(Status s);
const char* to_string(Failure f);

struct SolveResult {
  Vector x;
  Status status = Status::MaxIterations;
  Failure failure = Failure::None;
  std::string message;
  /// Recovered Lagrange multipliers (iteration multipliers divided by eta),
  /// one per constraint, zero for inactive constraints.
  Vector multipliers;
  std::vector<int> active;
  double kkt_residual = 0.0;
  int iterations = 0;
  double eta = 0.0;  // final step size (differs from the config after halving)
  std::vector<IterationRecord> trace;
};

using IterationObserver = std::function<void(const IterationRecord&)>;

Vector constraint_values(const Problem& p, const Vector& x);

/// n x |indices| matrix whose columns are the constraint gradients.
Matrix constraint_gradients(const Problem& p, const Vector& x, const std::vector<int>& indices);

/// max of: stationarity ||grad f + sum lambda_i grad g_i||_inf over the active
/// set, |g_i| on active (and all equality) constraints, positive part of
/// inactive g_i, and negative part of active inequality multipliers.
/// `multipliers` is aligned with `active`.
double kkt_residual(const Problem& p, const Vector& x, const std::vector<int>& active,
                    const std::vector<double>& multipliers);

/// Every structural problem in `p`; empty when well-formed.
std::vector<std::string> validate(const Problem& p);

}  // namespace tango
