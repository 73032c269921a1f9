#include "tango/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace tango {

Function Function::from_expression(Expression e) {
  return Function([e](const Vector& x) { return tango::evaluate(e, x); },
                  [e](const Vector& x) { return tango::gradient(e, x); });
}

Constraint Constraint::equality(Function g) { return {ConstraintKind::Equality, std::move(g)}; }

Constraint Constraint::inequality(Function g) {
  return {ConstraintKind::Inequality, std::move(g)};
}

Constraint Constraint::box_lower(int dimension, int var, double lower) {
  Function g([var, lower](const Vector& x) { return lower - x[var]; },
             [dimension, var](const Vector&) {
               Vector d = Vector::Zero(dimension);
               d[var] = -1.0;
               return d;
             });
  return {ConstraintKind::BoxLower, std::move(g), var, lower};
}

Constraint Constraint::box_upper(int dimension, int var, double upper) {
  Function g([var, upper](const Vector& x) { return x[var] - upper; },
             [dimension, var](const Vector&) {
               Vector d = Vector::Zero(dimension);
               d[var] = 1.0;
               return d;
             });
  return {ConstraintKind::BoxUpper, std::move(g), var, upper};
}

int Problem::num_equalities() const noexcept {
  return static_cast<int>(std::count_if(constraints.begin(), constraints.end(),
                                        [](const Constraint& c) { return c.is_equality(); }));
}

void SolverConfig::validate() const {
  if (!(eta > 0.0)) throw std::invalid_argument("step size eta must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  if (!(rho_min > 0.0)) throw std::invalid_argument("rho_min must be positive");
}

const char* to_string(Event::Type t) {
  switch (t) {
    case Event::Type::Activate: return "activate";
    case Event::Type::Deactivate: return "deactivate";
    case Event::Type::Project: return "project";
    case Event::Type::WarnTooFast: return "warn_too_fast";
    case Event::Type::HalveEta: return "halve_eta";
    case Event::Type::SkipDependent: return "skip_dependent";
  }
  return "?";
}

const char* to_string(Status s) {
  switch (s) {
    case Status::Converged: return "converged";
    case Status::MaxIterations: return "max_iterations";
    case Status::NumericalFailure: return "numerical_failure";
  }
  return "?";
}

const char* to_string(Failure f) {
  switch (f) {
    case Failure::None: return "none";
    case Failure::RankDeficient: return "rank_deficient";
    case Failure::ActiveSetOverflow: return "active_set_overflow";
    case Failure::NonFinite: return "non_finite";
  }
  return "?";
}

Vector constraint_values(const Problem& p, const Vector& x) {
  Vector g(p.num_constraints());
  for (int i = 0; i < p.num_constraints(); ++i) g[i] = p.constraints[i].g(x);
  return g;
}

Matrix constraint_gradients(const Problem& p, const Vector& x, const std::vector<int>& indices) {
  Matrix G(p.n, static_cast<Eigen::Index>(indices.size()));
  for (std::size_t c = 0; c < indices.size(); ++c)
    G.col(static_cast<Eigen::Index>(c)) = p.constraints[indices[c]].g.gradient(x);
  return G;
}

double kkt_residual(const Problem& p, const Vector& x, const std::vector<int>& active,
                    const std::vector<double>& multipliers) {
  if (x.size() != p.n) throw std::invalid_argument("kkt_residual: point dimension mismatch");
  if (active.size() != multipliers.size())
    throw std::invalid_argument("kkt_residual: multipliers must align with the active set");

  Vector stationarity = p.objective.gradient(x);
  std::vector<bool> is_active(p.constraints.size(), false);
  double residual = 0.0;
  for (std::size_t a = 0; a < active.size(); ++a) {
    const int i = active[a];
    if (i < 0 || i >= p.num_constraints())
      throw std::invalid_argument("kkt_residual: active index out of range");
    is_active[i] = true;
    stationarity += multipliers[a] * p.constraints[i].g.gradient(x);
    if (!p.constraints[i].is_equality()) residual = std::max(residual, -multipliers[a]);
  }
  residual = std::max(residual, stationarity.lpNorm<Eigen::Infinity>());
  for (int i = 0; i < p.num_constraints(); ++i) {
    const double gi = p.constraints[i].g(x);
    if (is_active[i] || p.constraints[i].is_equality()) residual = std::max(residual, std::abs(gi));
    else residual = std::max(residual, gi);
  }
  return residual;
}

std::vector<std::string> validate(const Problem& p) {
  std::vector<std::string> errors;
  if (p.n < 1) errors.push_back("dimension n must be at least 1");
  const int m = p.num_equalities();
  if (m >= p.n && p.n >= 1)
    errors.push_back("m<n violated: " + std::to_string(m) + " equality constraints for n=" +
                     std::to_string(p.n));

  std::map<int, double> lower, upper;
  for (int i = 0; i < p.num_constraints(); ++i) {
    const Constraint& c = p.constraints[i];
    if (!c.is_box()) continue;
    if (c.var < 0 || c.var >= p.n) {
      errors.push_back("constraint " + std::to_string(i) + ": box variable index " +
                       std::to_string(c.var + 1) + " out of range");
      continue;
    }
    auto& bounds = c.kind == ConstraintKind::BoxLower ? lower : upper;
    if (!bounds.emplace(c.var, c.bound).second)
      errors.push_back("constraint " + std::to_string(i) + ": duplicate box bound on x" +
                       std::to_string(c.var + 1));
    if (!std::isfinite(c.bound))
      errors.push_back("constraint " + std::to_string(i) + ": box bound is not finite");
  }
  for (const auto& [var, a] : lower) {
    auto it = upper.find(var);
    if (it != upper.end() && a > it->second)
      errors.push_back("box bounds on x" + std::to_string(var + 1) + " have lower > upper");
  }

  std::set<int> seen;
  for (int idx : p.ring) {
    if (idx < 0 || idx >= p.num_constraints()) {
      errors.push_back("ring entry " + std::to_string(idx) + " out of range");
      continue;
    }
    if (p.constraints[idx].kind != ConstraintKind::Inequality)
      errors.push_back("ring entry " + std::to_string(idx) + " is not a general inequality");
    if (!seen.insert(idx).second)
      errors.push_back("ring entry " + std::to_string(idx) + " repeated; ring must be a cycle");
  }
  if (p.ring.size() == 1) errors.push_back("ring needs at least two members");
  return errors;
}

}  // namespace tango
