#include "tango/minimax.hpp"

#include <algorithm>
#include <stdexcept>

#include "tango/active_set.hpp"

namespace tango {

namespace {

Function lift(const Function& f, int n) {
  return Function([f, n](const Vector& xz) { return f(Vector(xz.head(n))); },
                  [f, n](const Vector& xz) {
                    Vector grad = Vector::Zero(n + 1);
                    grad.head(n) = f.gradient(Vector(xz.head(n)));
                    return grad;
                  });
}

}  // namespace

Problem epigraph_reformulate(const MinimaxProblem& mp) {
  if (mp.objectives.empty()) throw std::invalid_argument("minimax needs at least one objective");
  const int n = mp.n;
  Problem p{n + 1,
            Function([n](const Vector& xz) { return xz[n]; },
                     [n](const Vector&) {
                       Vector e = Vector::Zero(n + 1);
                       e[n] = 1.0;
                       return e;
                     }),
            {},
            {}};
  for (const Function& f : mp.objectives) {
    p.constraints.push_back(Constraint::inequality(
        Function([f, n](const Vector& xz) { return f(Vector(xz.head(n))) - xz[n]; },
                 [f, n](const Vector& xz) {
                   Vector grad(n + 1);
                   grad.head(n) = f.gradient(Vector(xz.head(n)));
                   grad[n] = -1.0;
                   return grad;
                 })));
  }
  for (const Constraint& c : mp.constraints) {
    switch (c.kind) {
      case ConstraintKind::BoxLower: p.constraints.push_back(Constraint::box_lower(n + 1, c.var, c.bound)); break;
      case ConstraintKind::BoxUpper: p.constraints.push_back(Constraint::box_upper(n + 1, c.var, c.bound)); break;
      default: p.constraints.push_back({c.kind, lift(c.g, n)});
    }
  }
  if (mp.ring && mp.objectives.size() >= 2)
    for (int i = 0; i < static_cast<int>(mp.objectives.size()); ++i) p.ring.push_back(i);
  return p;
}

Vector epigraph_start(const MinimaxProblem& mp, const Vector& x0) {
  Vector xz(mp.n + 1);
  xz.head(mp.n) = x0;
  double z = mp.objectives.front()(x0);
  for (const Function& f : mp.objectives) z = std::max(z, f(x0));
  xz[mp.n] = z;
  return xz;
}

MinimaxResult run_minimax(const MinimaxProblem& mp, const Vector& x0, const SolverConfig& cfg,
                          const IterationObserver& observer) {
  if (x0.size() != mp.n) throw std::invalid_argument("run_minimax: x0 has the wrong dimension");
  const Problem lifted = epigraph_reformulate(mp);
  MinimaxResult out;
  out.solve = run_active_set(lifted, epigraph_start(mp, x0), cfg, observer);
  out.x = out.solve.x.head(mp.n);
  out.z = out.solve.x[mp.n];
  out.objective_values.resize(static_cast<Eigen::Index>(mp.objectives.size()));
  for (std::size_t i = 0; i < mp.objectives.size(); ++i)
    out.objective_values[static_cast<Eigen::Index>(i)] = mp.objectives[i](out.x);
  for (int i : out.solve.active)
    if (i < static_cast<int>(mp.objectives.size())) out.active_objectives.push_back(i);
  return out;
}

}  // namespace tango
