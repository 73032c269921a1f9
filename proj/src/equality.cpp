#include "tango/equality.hpp"

#include <Eigen/Dense>

#include "solver_common.hpp"

namespace tango {

namespace detail {

void require_valid(const Problem& p) {
  const auto problems = validate(p);
  if (problems.empty()) return;
  std::string msg = "invalid problem:";
  for (const auto& e : problems) msg += " " + e + ";";
  msg.pop_back();
  throw std::invalid_argument(msg);
}

void finalize(const Problem& p, const std::vector<int>& active,
              const std::vector<double>& iteration_multipliers, double eta, SolveResult& r) {
  r.eta = eta;
  r.active = active;
  r.multipliers = Vector::Zero(p.num_constraints());
  std::vector<double> recovered(iteration_multipliers.size());
  for (std::size_t a = 0; a < active.size(); ++a) {
    recovered[a] = iteration_multipliers[a] / eta;
    r.multipliers[active[a]] = recovered[a];
  }
  r.kkt_residual = r.x.allFinite() ? kkt_residual(p, r.x, active, recovered)
                                   : std::numeric_limits<double>::infinity();
}

}  // namespace detail

Vector solve_multiplier_system(const Matrix& G, const Vector& g, const Vector& grad_f,
                               double eta, double rho_min) {
  if (G.cols() == 0) return Vector(0);
  const Matrix gram = G.transpose() * G;
  const Vector rhs = g - eta * (G.transpose() * grad_f);

  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  const double largest = eig.eigenvalues().maxCoeff();
  const double smallest = eig.eigenvalues().minCoeff();
  if (!(largest > 0.0) || smallest < rho_min * largest)
    throw RankDeficientError("constraint gradients are linearly dependent (Gram eigenvalue ratio " +
                             std::to_string(largest > 0.0 ? smallest / largest : 0.0) + ")");
  return gram.ldlt().solve(rhs);
}

namespace {

std::vector<int> equality_indices(const Problem& p) {
  std::vector<int> idx;
  for (int i = 0; i < p.num_constraints(); ++i)
    if (p.constraints[i].is_equality()) idx.push_back(i);
  return idx;
}

}  // namespace

Vector compute_multipliers(const Problem& p, const Vector& x, double eta, double rho_min) {
  const auto idx = equality_indices(p);
  Vector g(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) g[i] = p.constraints[idx[i]].g(x);
  return solve_multiplier_system(constraint_gradients(p, x, idx), g, p.objective.gradient(x), eta,
                                 rho_min);
}

EqualityStep equality_step(const Problem& p, const Vector& x, double eta, double rho_min) {
  const auto idx = equality_indices(p);
  const Matrix G = constraint_gradients(p, x, idx);
  Vector g(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) g[i] = p.constraints[idx[i]].g(x);
  const Vector grad_f = p.objective.gradient(x);
  Vector lambda = solve_multiplier_system(G, g, grad_f, eta, rho_min);
  return {x - eta * grad_f - G * lambda, std::move(lambda)};
}

SolveResult run_equality(const Problem& p, const Vector& x0, const SolverConfig& cfg,
                         const IterationObserver& observer) {
  cfg.validate();
  detail::require_valid(p);
  if (x0.size() != p.n) throw std::invalid_argument("run_equality: x0 has the wrong dimension");
  const auto idx = equality_indices(p);
  if (static_cast<int>(idx.size()) != p.num_constraints())
    throw std::invalid_argument("run_equality: problem has non-equality constraints");

  SolveResult result;
  result.x = x0;
  double eta = cfg.eta;
  detail::DivergenceMonitor monitor;
  std::vector<double> last_lambda(idx.size(), 0.0);

  for (int k = 0; k < cfg.max_iters; ++k) {
    IterationRecord rec;
    rec.k = k;
    rec.x = result.x;
    rec.f = p.objective(result.x);
    rec.g = constraint_values(p, result.x);
    rec.active = idx;

    Vector lambda;
    const Vector grad_f = p.objective.gradient(result.x);
    const Matrix G = constraint_gradients(p, result.x, idx);
    try {
      lambda = solve_multiplier_system(G, rec.g, grad_f, eta, cfg.rho_min);
    } catch (const RankDeficientError& e) {
      result.status = Status::NumericalFailure;
      result.failure = Failure::RankDeficient;
      result.message = e.what();
      break;
    }
    const Vector x_next = result.x - eta * grad_f - G * lambda;
    const Vector step = x_next - result.x;
    rec.multipliers.assign(lambda.data(), lambda.data() + lambda.size());
    rec.step_norm = step.norm();

    result.iterations = k + 1;
    last_lambda = rec.multipliers;
    const bool finite = x_next.allFinite();
    if (finite) result.x = x_next;

    if (cfg.halve_eta && monitor.diverging(rec.step_norm)) {
      eta *= 0.5;
      rec.events.push_back(Event::halve_eta(eta));
      monitor.reset();
    }
    const double step_norm = rec.step_norm;
    if (observer) observer(rec);
    result.trace.push_back(std::move(rec));

    if (!finite) {
      result.status = Status::NumericalFailure;
      result.failure = Failure::NonFinite;
      result.message = "iterate became non-finite";
      break;
    }
    if (step_norm < cfg.tol) {
      result.status = Status::Converged;
      break;
    }
  }
  if (result.status == Status::MaxIterations)
    result.message = "no convergence after " + std::to_string(cfg.max_iters) + " iterations";
  detail::finalize(p, idx, last_lambda, eta, result);
  return result;
}

SolveResult steepest_descent(const Function& f, const Vector& x0, const SolverConfig& cfg,
                             const IterationObserver& observer) {
  cfg.validate();
  SolveResult result;
  result.x = x0;
  result.eta = cfg.eta;
  for (int k = 0; k < cfg.max_iters; ++k) {
    IterationRecord rec;
    rec.k = k;
    rec.x = result.x;
    rec.f = f(result.x);
    const Vector step = -cfg.eta * f.gradient(result.x);
    rec.step_norm = step.norm();
    result.iterations = k + 1;
    const Vector x_next = result.x + step;
    const bool finite = x_next.allFinite();
    if (finite) result.x = x_next;
    if (observer) observer(rec);
    result.trace.push_back(std::move(rec));
    if (!finite) {
      result.status = Status::NumericalFailure;
      result.failure = Failure::NonFinite;
      result.message = "iterate became non-finite";
      break;
    }
    if (result.trace.back().step_norm < cfg.tol) {
      result.status = Status::Converged;
      break;
    }
  }
  result.multipliers = Vector(0);
  result.kkt_residual = result.x.allFinite() ? f.gradient(result.x).lpNorm<Eigen::Infinity>()
                                             : std::numeric_limits<double>::infinity();
  return result;
}

Vector newton_restore(const std::vector<Function>& g, const Vector& x0, const SolverConfig& cfg) {
  cfg.validate();
  Vector x = x0;
  const auto m = static_cast<Eigen::Index>(g.size());
  Vector values(m);
  Matrix G(x.size(), m);
  for (int k = 0; k <= cfg.max_iters; ++k) {
    for (Eigen::Index i = 0; i < m; ++i) values[i] = g[i](x);
    if (values.norm() < cfg.tol) return x;
    if (k == cfg.max_iters) break;
    for (Eigen::Index i = 0; i < m; ++i) G.col(i) = g[i].gradient(x);
    // Dg^+ g with Dg^+ = grad g (Dg grad g)^-1; reuse the guarded Gram solve with eta = 0.
    x -= G * solve_multiplier_system(G, values, Vector::Zero(x.size()), 0.0, cfg.rho_min);
  }
  throw MaxIterationsError("newton_restore: ||g|| = " + std::to_string(values.norm()) +
                           " after " + std::to_string(cfg.max_iters) + " iterations");
}

}  // namespace tango
