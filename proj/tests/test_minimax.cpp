#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "tango/active_set.hpp"
#include "tango/minimax.hpp"

using namespace tango;
using oracle::expr;

namespace {

Vector point(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  std::copy(v.begin(), v.end(), out.data());
  return out;
}

SolverConfig with_eta(double eta) {
  SolverConfig cfg;
  cfg.eta = eta;
  return cfg;
}

double largest(const MinimaxProblem& mp, const Vector& x) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& f : mp.objectives) m = std::max(m, f(x));
  return m;
}

}  // namespace

TEST_CASE("epigraph reformulation") {
  MinimaxProblem mp = oracle::two_parabolas();
  mp.constraints.push_back(Constraint::box_upper(1, 0, 3.0));
  mp.constraints.push_back(Constraint::equality(expr("x1 - 0.5")));
  const Problem p = epigraph_reformulate(mp);
  REQUIRE(p.n == 2);
  REQUIRE(p.num_constraints() == 4);
  const Vector xz = point({2.0, 0.5});
  CHECK(p.objective(xz) == 0.5);
  CHECK(p.objective.gradient(xz) == point({0, 1}));
  CHECK(p.constraints[0].g(xz) == doctest::Approx(1.0 - 0.5));
  CHECK(p.constraints[1].g.gradient(xz) == point({6, -1}));
  CHECK(p.constraints[2].kind == ConstraintKind::BoxUpper);
  CHECK(p.constraints[2].var == 0);
  CHECK(p.constraints[2].g.gradient(xz) == point({1, 0}));
  CHECK(p.constraints[3].g(xz) == doctest::Approx(1.5));
  CHECK(p.constraints[3].g.gradient(xz) == point({1, 0}));
  CHECK(p.ring.empty());

  mp.ring = true;
  CHECK(epigraph_reformulate(mp).ring == std::vector<int>{0, 1});

  const Vector start = epigraph_start(oracle::two_parabolas(), point({0.5}));
  CHECK(start == point({0.5, 2.25}));
}

TEST_CASE("two parabolas") {
  const auto r = run_minimax(oracle::two_parabolas(), point({0.7}), with_eta(0.1));
  REQUIRE(r.solve.status == Status::Converged);
  CHECK(std::abs(r.x[0]) < 1e-6);
  CHECK(std::abs(r.z - 1.0) < 1e-5);
  CHECK(r.active_objectives == std::vector<int>{0, 1});
  CHECK(std::abs(r.solve.multipliers[0] - 0.5) < 1e-6);
  CHECK(std::abs(r.solve.multipliers[1] - 0.5) < 1e-6);
  CHECK(r.objective_values.size() == 2);
}

TEST_CASE("absolute value as a minimax") {
  MinimaxProblem mp;
  mp.n = 1;
  mp.objectives = {expr("x1"), expr("-x1")};
  const auto r = run_minimax(mp, point({0.8}), with_eta(0.1));
  REQUIRE(r.solve.status == Status::Converged);
  CHECK(std::abs(r.x[0]) < 1e-9);
  CHECK(std::abs(r.z) < 1e-9);
}

TEST_CASE("a single objective matches the plain solve") {
  MinimaxProblem mp;
  mp.n = 2;
  mp.objectives = {expr("(x1-1)^2 + 2*x2^2")};
  const auto r = run_minimax(mp, point({3, -1}), with_eta(0.1));
  const SolveResult plain = run_active_set(oracle::make_problem(2, "(x1-1)^2 + 2*x2^2"), point({3, -1}), with_eta(0.1));
  REQUIRE(r.solve.status == Status::Converged);
  REQUIRE(plain.status == Status::Converged);
  CHECK((r.x - plain.x).norm() < 1e-8);
  CHECK(std::abs(r.z - mp.objectives[0](plain.x)) < 1e-8);
}

TEST_CASE("duplicated objectives on a ring behave like one") {
  MinimaxProblem mp;
  mp.n = 2;
  mp.ring = true;
  for (int i = 0; i < 10; ++i) mp.objectives.push_back(expr("x1^2 + x2^2"));
  const auto r = run_minimax(mp, point({1, -2}), with_eta(0.1));
  REQUIRE(r.solve.status == Status::Converged);
  CHECK(r.x.norm() < 1e-8);
  CHECK(std::abs(r.z) < 1e-8);

  // Without the ring every copy activates at once and the copies are dependent.
  mp.ring = false;
  const auto flat = run_minimax(mp, point({1, -2}), with_eta(0.1));
  CHECK(flat.solve.status == Status::NumericalFailure);
}

TEST_CASE("ring of linear functionals matches a grid search") {
  MinimaxProblem mp;
  mp.n = 2;
  mp.ring = true;
  const double offsets[10] = {0.3, -0.1, 0.25, 0.0, 0.4, -0.2, 0.15, 0.05, -0.3, 0.2};
  std::vector<std::pair<Vector, double>> pieces;
  for (int i = 0; i < 10; ++i) {
    const double th = 2 * std::numbers::pi * i / 10;
    const Vector c = point({std::cos(th), std::sin(th)});
    const double d = offsets[i];
    pieces.emplace_back(c, d);
    mp.objectives.emplace_back([c, d](const Vector& x) { return c.dot(x) + d; },
                               [c](const Vector&) { return c; });
  }
  // Brute force on a 4001 x 4001 grid over [-2, 2]^2.
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a <= 4000; ++a)
    for (int b = 0; b <= 4000; ++b) {
      const double x = -2.0 + a * 1e-3, y = -2.0 + b * 1e-3;
      double m = -std::numeric_limits<double>::infinity();
      for (const auto& [c, d] : pieces) m = std::max(m, c[0] * x + c[1] * y + d);
      best = std::min(best, m);
    }
  const auto r = run_minimax(mp, point({0.5, 0.5}), with_eta(0.1));
  REQUIRE(r.solve.status == Status::Converged);
  CHECK(std::abs(largest(mp, r.x) - best) < 1e-3);
}

TEST_CASE("minimax invariants") {
  const SolverConfig cfg = with_eta(0.1);
  MinimaxProblem mp;
  mp.n = 2;
  mp.objectives = {expr("(x1-1)^2 + x2^2"), expr("(x1+1)^2 + x2^2"), expr("x1^2 + (x2-1)^2")};
  const auto r = run_minimax(mp, point({0.3, -0.4}), cfg);
  REQUIRE(r.solve.status == Status::Converged);
  CHECK(std::abs(r.z - largest(mp, r.x)) <= 10 * cfg.tol);
  double sum = 0.0;
  for (int i : r.active_objectives) {
    CHECK(r.solve.multipliers[i] >= 0.0);
    sum += r.solve.multipliers[i];
  }
  CHECK(std::abs(sum - 1.0) < 1e-6);

  MinimaxProblem shifted = mp;
  for (auto& f : shifted.objectives) {
    const Function base = f;
    f = Function([base](const Vector& x) { return base(x) + 2.5; }, [base](const Vector& x) { return base.gradient(x); });
  }
  const auto s = run_minimax(shifted, point({0.3, -0.4}), cfg);
  REQUIRE(s.solve.status == Status::Converged);
  CHECK((s.x - r.x).norm() < 1e-8);
  CHECK(std::abs(s.z - r.z - 2.5) < 1e-8);
}

TEST_CASE("extra constraints pass through") {
  MinimaxProblem mp = oracle::two_parabolas();
  mp.constraints.push_back(Constraint::box_lower(1, 0, 0.5));
  const auto r = run_minimax(mp, point({2.0}), with_eta(0.1));
  REQUIRE(r.solve.status == Status::Converged);
  CHECK(r.x[0] == 0.5);
  CHECK(std::abs(r.z - 2.25) < 1e-8);
  CHECK(r.active_objectives == std::vector<int>{1});
}
