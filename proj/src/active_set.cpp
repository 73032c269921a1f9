#include "tango/active_set.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "solver_common.hpp"
#include "tango/equality.hpp"

namespace tango {

bool ActiveSetState::contains(int i) const {
  return std::binary_search(active.begin(), active.end(), i);
}

void ActiveSetState::insert(int i) {
  auto it = std::lower_bound(active.begin(), active.end(), i);
  if (it == active.end() || *it != i) active.insert(it, i);
}

void ActiveSetState::erase(int i) {
  auto it = std::lower_bound(active.begin(), active.end(), i);
  if (it != active.end() && *it == i) active.erase(it);
}

std::vector<int> ActiveSetState::blocked_variables(const Problem& p) const {
  std::vector<int> vars;
  for (int i : active)
    if (p.constraints[i].is_box()) vars.push_back(p.constraints[i].var);
  std::sort(vars.begin(), vars.end());
  return vars;
}

std::vector<int> ActiveSetState::general_active(const Problem& p) const {
  std::vector<int> out;
  for (int i : active)
    if (!p.constraints[i].is_box()) out.push_back(i);
  return out;
}

ActiveSetState initial_state(const Problem& p) {
  ActiveSetState s;
  for (int i = 0; i < p.num_constraints(); ++i)
    if (p.constraints[i].is_equality()) s.active.push_back(i);
  return s;
}

namespace {

std::vector<int> free_variables(int n, const std::vector<int>& blocked) {
  std::vector<int> free;
  for (int j = 0; j < n; ++j)
    if (!std::binary_search(blocked.begin(), blocked.end(), j)) free.push_back(j);
  return free;
}

Matrix restrict_rows(const Matrix& m, const std::vector<int>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = m.row(rows[r]);
  return out;
}

Vector restrict(const Vector& v, const std::vector<int>& rows) {
  Vector out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) out[static_cast<Eigen::Index>(r)] = v[rows[r]];
  return out;
}

// Whether `candidate` adds a direction to the span of the general active
// gradients, measured over the free coordinates.
bool independent_of_active(const ActiveSetState& state, const Problem& p, const Vector& x,
                           int candidate, double tol) {
  const auto free = free_variables(p.n, state.blocked_variables(p));
  const Vector v = restrict(p.constraints[candidate].g.gradient(x), free);
  const double scale = v.norm();
  if (!(scale > 0.0)) return false;
  const auto general = state.general_active(p);
  if (general.empty()) return true;
  const Matrix B = restrict_rows(constraint_gradients(p, x, general), free);
  if (B.cols() >= B.rows()) return false;
  Eigen::HouseholderQR<Matrix> qr(B);
  const Matrix Q = qr.householderQ() * Matrix::Identity(B.rows(), B.cols());
  const Vector residual = v - Q * (Q.transpose() * v);
  return residual.norm() > tol * scale;
}

// Ring positions whose value is a violated local maximum; plateaus (values
// equal within a relative 1e-12) are represented by their first position.
std::vector<int> ring_leader_positions(const std::vector<double>& values) {
  const int m = static_cast<int>(values.size());
  std::vector<int> leaders;
  if (m == 0) return leaders;
  double scale = 1.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  const double delta = 1e-12 * scale;
  auto same = [&](int a, int b) { return std::abs(values[a] - values[b]) <= delta; };
  auto at = [&](int q) { return ((q % m) + m) % m; };

  bool flat = true;
  for (int q = 1; q < m; ++q) flat = flat && same(q, 0);
  if (flat) {
    if (values[0] > 0.0) leaders.push_back(0);
    return leaders;
  }
  for (int q = 0; q < m; ++q) {
    if (!(values[q] > 0.0)) continue;
    const int left = at(q - 1);
    if (same(left, q) || values[left] > values[q]) continue;
    int end = q;
    while (same(at(end + 1), q)) ++end;
    if (values[at(end + 1)] > values[q]) continue;
    leaders.push_back(q);
  }
  return leaders;
}

}  // namespace

Activation activate_violated(const ActiveSetState& state, const Problem& p, const Vector& x,
                             const SolverConfig& cfg) {
  Activation out{state, x, {}};
  std::vector<bool> in_ring(p.constraints.size(), false);
  for (int i : p.ring) in_ring[i] = true;

  int discrete = 0;
  for (int i = 0; i < p.num_constraints(); ++i) {
    const Constraint& c = p.constraints[i];
    if (in_ring[i] || out.state.contains(i)) continue;
    if (!(c.g(out.x) > 0.0)) continue;
    ++discrete;
    out.state.insert(i);
    out.events.push_back(Event::activate(i));
    if (c.is_box()) {
      out.x[c.var] = c.bound;
      out.events.push_back(Event::project(i, c.bound));
    }
  }
  if (cfg.policy == DeactivationPolicy::WarnOnMultiple && discrete >= 2)
    out.events.push_back(Event::warn_too_fast(discrete));

  if (!p.ring.empty()) {
    std::vector<double> values(p.ring.size());
    for (std::size_t q = 0; q < p.ring.size(); ++q) values[q] = p.constraints[p.ring[q]].g(out.x);
    for (int q : ring_leader_positions(values)) {
      const int i = p.ring[q];
      if (out.state.contains(i)) continue;
      if (!independent_of_active(out.state, p, out.x, i, cfg.leader_independence)) {
        out.events.push_back(Event::skip_dependent(i));
        continue;
      }
      out.state.insert(i);
      out.events.push_back(Event::activate(i));
    }
  }

  if (static_cast<int>(out.state.active.size()) > p.n)
    throw ActiveSetOverflowError(std::to_string(out.state.active.size()) +
                                 " active constraints exceed n = " + std::to_string(p.n));
  return out;
}

Vector solve_reduced_multipliers(const ActiveSetState& state, const Problem& p, const Vector& x,
                                 double eta, double rho_min) {
  const auto free = free_variables(p.n, state.blocked_variables(p));
  const auto general = state.general_active(p);
  const Vector grad_f = p.objective.gradient(x);
  const Matrix G = constraint_gradients(p, x, general);

  Vector g(static_cast<Eigen::Index>(general.size()));
  for (std::size_t k = 0; k < general.size(); ++k) g[k] = p.constraints[general[k]].g(x);
  const Vector lambda_general =
      solve_multiplier_system(restrict_rows(G, free), g, restrict(grad_f, free), eta, rho_min);

  Vector lambda(static_cast<Eigen::Index>(state.active.size()));
  std::size_t k = 0;
  for (std::size_t a = 0; a < state.active.size(); ++a) {
    const Constraint& c = p.constraints[state.active[a]];
    if (!c.is_box()) {
      lambda[a] = lambda_general[k++];
      continue;
    }
    const double sign = c.kind == ConstraintKind::BoxUpper ? 1.0 : -1.0;
    const double coupling = G.cols() > 0 ? G.row(c.var).dot(lambda_general) : 0.0;
    lambda[a] = -sign * (eta * grad_f[c.var] + coupling);
  }
  return lambda;
}

Deactivation deactivation_loop(const ActiveSetState& state, const Problem& p, const Vector& x,
                               double eta, const SolverConfig& cfg) {
  Deactivation out{state, {}, {}, eta};
  bool halved = false;
  for (;;) {
    out.multipliers = solve_reduced_multipliers(out.state, p, x, out.eta, cfg.rho_min);
    int argmin = -1;
    int negatives = 0;
    for (std::size_t a = 0; a < out.state.active.size(); ++a) {
      if (p.constraints[out.state.active[a]].is_equality()) continue;
      if (out.multipliers[a] < 0.0) ++negatives;
      if (argmin < 0 || out.multipliers[a] < out.multipliers[argmin]) argmin = static_cast<int>(a);
    }
    if (argmin < 0 || !(out.multipliers[argmin] < 0.0)) break;

    if (cfg.policy == DeactivationPolicy::WarnOnMultiple && negatives >= 2) {
      out.events.push_back(Event::warn_too_fast(negatives));
      if (cfg.halve_eta && !halved) {
        halved = true;
        out.eta *= 0.5;
        out.events.push_back(Event::halve_eta(out.eta));
        continue;
      }
    }
    const int removed = out.state.active[argmin];
    out.state.erase(removed);
    out.events.push_back(Event::deactivate(removed));
  }
  return out;
}

SolveResult run_active_set(const Problem& p, const Vector& x0, const SolverConfig& cfg,
                           const IterationObserver& observer) {
  cfg.validate();
  detail::require_valid(p);
  if (x0.size() != p.n) throw std::invalid_argument("run_active_set: x0 has the wrong dimension");

  SolveResult result;
  result.x = x0;
  double eta = cfg.eta;
  ActiveSetState state = initial_state(p);
  std::vector<double> last_lambda(state.active.size(), 0.0);
  detail::DivergenceMonitor monitor;

  auto fail = [&](Failure f, const std::string& msg) {
    result.status = Status::NumericalFailure;
    result.failure = f;
    result.message = msg;
  };

  for (int k = 0; k < cfg.max_iters; ++k) {
    IterationRecord rec;
    rec.k = k;
    Deactivation deact;
    try {
      Activation act = activate_violated(state, p, result.x, cfg);
      state = std::move(act.state);
      result.x = std::move(act.x);
      rec.events = std::move(act.events);
      const bool warned = std::any_of(rec.events.begin(), rec.events.end(), [](const Event& e) {
        return e.type == Event::Type::WarnTooFast;
      });
      if (warned && cfg.halve_eta) {
        eta *= 0.5;
        rec.events.push_back(Event::halve_eta(eta));
      }
      deact = deactivation_loop(state, p, result.x, eta, cfg);
    } catch (const ActiveSetOverflowError& e) {
      fail(Failure::ActiveSetOverflow, e.what());
      break;
    } catch (const RankDeficientError& e) {
      fail(Failure::RankDeficient, e.what());
      break;
    }
    state = std::move(deact.state);
    eta = deact.eta;
    rec.events.insert(rec.events.end(), deact.events.begin(), deact.events.end());

    const Vector& x = result.x;
    rec.x = x;
    rec.f = p.objective(x);
    rec.g = constraint_values(p, x);
    rec.active = state.active;
    rec.multipliers.assign(deact.multipliers.data(),
                           deact.multipliers.data() + deact.multipliers.size());

    const auto general = state.general_active(p);
    Vector lambda_general(static_cast<Eigen::Index>(general.size()));
    for (std::size_t a = 0, j = 0; a < state.active.size(); ++a)
      if (!p.constraints[state.active[a]].is_box()) lambda_general[j++] = deact.multipliers[a];

    const Vector grad_f = p.objective.gradient(x);
    Vector x_next = x - eta * grad_f - constraint_gradients(p, x, general) * lambda_general;
    for (int v : state.blocked_variables(p)) x_next[v] = x[v];
    rec.step_norm = (x_next - x).norm();

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
      fail(Failure::NonFinite, "iterate became non-finite");
      break;
    }
    if (step_norm < cfg.tol) {
      result.status = Status::Converged;
      break;
    }
  }
  if (result.status == Status::MaxIterations)
    result.message = "no convergence after " + std::to_string(cfg.max_iters) + " iterations";
  if (last_lambda.size() != state.active.size()) last_lambda.assign(state.active.size(), 0.0);
  detail::finalize(p, state.active, last_lambda, eta, result);
  return result;
}

}  // namespace tango
