// Command-line front end: solve, minimax, auxetic-demo, diagnose.
//
// Exit codes: 0 converged (diagnose: rate verified), 1 input error,
// 2 iteration limit (diagnose: tail too short), 3 numerical failure
// (diagnose: rate not verified).

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "tango/active_set.hpp"
#include "tango/diagnostics.hpp"
#include "tango/elasticity.hpp"
#include "tango/equality.hpp"
#include "tango/io.hpp"
#include "tango/minimax.hpp"

namespace {

using namespace tango;

struct RunFlags {
  std::optional<double> eta;
  std::optional<double> tol;
  std::optional<int> max_iters;
  std::string out;
  std::string trace;
  std::string history;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--eta", f.eta, "step size (overrides the file config)");
  cmd->add_option("--tol", f.tol, "step-norm tolerance (overrides the file config)");
  cmd->add_option("--max-iters", f.max_iters, "iteration limit (overrides the file config)");
  cmd->add_option("--out", f.out, "result JSON path (default: stdout)");
  cmd->add_option("--trace", f.trace, "trace JSON path");
  cmd->add_option("--history", f.history, "history CSV path");
}

SolverConfig merged(SolverConfig cfg, const RunFlags& f) {
  if (f.eta) cfg.eta = *f.eta;
  if (f.tol) cfg.tol = *f.tol;
  if (f.max_iters) cfg.max_iters = *f.max_iters;
  cfg.validate();
  return cfg;
}

int exit_code(Status s) {
  switch (s) {
    case Status::Converged: return 0;
    case Status::MaxIterations: return 2;
    case Status::NumericalFailure: return 3;
  }
  return 3;
}

void emit(const json& j, const std::string& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

/// Runs `solve` with the trace streamed to disk when requested.
template <typename Solve>
SolveResult run_with_artifacts(const RunFlags& f, Solve&& solve) {
  std::optional<TraceWriter> writer;
  if (!f.trace.empty()) writer.emplace(f.trace);
  IterationObserver observer;
  if (writer) observer = [&](const IterationRecord& r) { writer->write(r); };
  SolveResult r = solve(observer);
  if (writer) writer->close();
  if (!f.history.empty()) write_history_csv(f.history, r.trace);
  return r;
}

int cmd_solve(const std::string& file, const RunFlags& flags) {
  const ProblemFile pf = parse_problem(read_json_file(file));
  const SolverConfig cfg = merged(pf.config, flags);
  const Problem& p = pf.problem;
  const bool equality_only = std::all_of(p.constraints.begin(), p.constraints.end(),
                                         [](const Constraint& c) { return c.is_equality(); });
  const SolveResult r = run_with_artifacts(flags, [&](const IterationObserver& obs) {
    return equality_only ? run_equality(p, pf.x0, cfg, obs) : run_active_set(p, pf.x0, cfg, obs);
  });
  json j = to_json(r);
  j["solver"] = equality_only ? "equality" : "active_set";
  j["f"] = std::isfinite(r.x.norm()) ? json(p.objective(r.x)) : json(nullptr);
  emit(j, flags.out);
  return exit_code(r.status);
}

json minimax_json(const MinimaxResult& r) {
  json j = to_json(r.solve);
  j["x"] = std::vector<double>(r.x.data(), r.x.data() + r.x.size());
  j["z"] = r.z;
  j["lifted_x"] = std::vector<double>(r.solve.x.data(), r.solve.x.data() + r.solve.x.size());
  j["objective_values"] =
      std::vector<double>(r.objective_values.data(), r.objective_values.data() + r.objective_values.size());
  j["active_objectives"] = r.active_objectives;
  return j;
}

int cmd_minimax(const std::string& file, const RunFlags& flags) {
  const ProblemFile pf = parse_problem(read_json_file(file), true);
  const SolverConfig cfg = merged(pf.config, flags);
  MinimaxResult mr;
  run_with_artifacts(flags, [&](const IterationObserver& obs) {
    mr = run_minimax(*pf.minimax, pf.x0, cfg, obs);
    return mr.solve;
  });
  emit(minimax_json(mr), flags.out);
  return exit_code(mr.solve.status);
}

struct AuxeticFlags {
  int directions = 10;
  std::string curve;
};

int cmd_auxetic(const AuxeticFlags& af, RunFlags flags) {
  if (af.directions < 2) throw std::invalid_argument("--directions must be at least 2");
  if (!flags.eta) flags.eta = 0.1;
  const SolverConfig cfg = merged(SolverConfig{}, flags);
  const MinimaxProblem mp = build_auxetic_problem(af.directions);

  std::ofstream curve;
  if (!af.curve.empty()) {
    curve.open(af.curve);
    if (!curve) throw std::runtime_error("cannot write " + af.curve);
    curve << "k,max_nu,min_nu\n" << std::setprecision(17);
  }
  MinimaxResult mr;
  run_with_artifacts(flags, [&](const IterationObserver& obs) {
    IterationObserver both = [&](const IterationRecord& r) {
      if (obs) obs(r);
      if (curve.is_open()) {
        const Vector nu = auxetic_ratios(r.x, af.directions);
        curve << r.k << ',' << nu.maxCoeff() << ',' << nu.minCoeff() << '\n';
      }
    };
    mr = run_minimax(mp, auxetic_start(), cfg, both);
    return mr.solve;
  });

  json j = minimax_json(mr);
  const Matrix3<double> C = stiffness_from_factor(mr.x);
  json c = json::array();
  for (int i = 0; i < 3; ++i) c.push_back({C(i, 0), C(i, 1), C(i, 2)});
  j["stiffness"] = c;
  j["angles"] = ring_angles(af.directions);
  j["nu"] = j["objective_values"];
  j["active_directions"] = j["active_objectives"];
  j["max_nu"] = mr.objective_values.maxCoeff();
  j["min_nu"] = mr.objective_values.minCoeff();
  emit(j, flags.out);
  return exit_code(mr.solve.status);
}

struct DiagnoseFlags {
  std::string trace;
  std::string problem;
  std::optional<double> eta;
  int min_tail = 20;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_diagnose(const DiagnoseFlags& df) {
  const json problem_json = read_json_file(df.problem);
  const bool minimax = problem_json.is_object() && problem_json.contains("objectives");
  const ProblemFile pf = parse_problem(problem_json, minimax);
  const auto trace = trace_from_json(read_json_file(df.trace));
  if (trace.empty()) throw SchemaError("trace", "is empty");
  for (const auto& r : trace)
    if (r.x.size() != pf.problem.n || r.g.size() != pf.problem.num_constraints())
      throw SchemaError("trace[" + std::to_string(r.k) + "]",
                        "dimensions do not match the problem (n=" + std::to_string(pf.problem.n) +
                            ", m=" + std::to_string(pf.problem.num_constraints()) + ")");
  const double eta = df.eta.value_or(pf.config.eta);
  if (!(eta > 0.0)) throw std::invalid_argument("--eta must be positive");

  ReportOptions options;
  options.min_tail = df.min_tail;
  const Vector x_star = trace.back().x;
  ConvergenceReport report;
  try {
    report = convergence_report(trace, x_star, options);
  } catch (const InsufficientTailError& e) {
    std::cerr << "insufficient tail: " << e.what() << '\n';
    return 2;
  }
  const auto& active = trace.back().active;
  const bool any_box = std::any_of(active.begin(), active.end(), [&](int i) {
    return pf.problem.constraints[i].is_box();
  });
  if (!any_box) {
    try {
      report.spectral_radius =
          spectral_radius_iteration_map(pf.problem, x_star, eta, active, df.seed);
    } catch (const RankDeficientError&) {
    }
  }
  json j = to_json(report);
  j["eta"] = eta;
  const bool verified =
      report.linear && (!report.spectral_radius || *report.spectral_radius < 1.0);
  j["verified"] = verified;
  emit(j, df.out);
  return verified ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained gradient/Newton optimizer"};
  app.require_subcommand(1);

  RunFlags solve_flags, minimax_flags, auxetic_flags;
  std::string solve_file, minimax_file;
  auto* solve = app.add_subcommand("solve", "solve an equality/inequality/box problem file");
  solve->add_option("problem", solve_file, "problem JSON")->required();
  add_run_flags(solve, solve_flags);

  auto* mm = app.add_subcommand("minimax", "minimize the largest of several objectives");
  mm->add_option("problem", minimax_file, "problem JSON with \"objectives\"")->required();
  add_run_flags(mm, minimax_flags);

  AuxeticFlags af;
  auto* aux = app.add_subcommand("auxetic-demo", "minimize the largest Poisson ratio over k directions");
  aux->add_option("--directions", af.directions, "number of ring directions")->capture_default_str();
  aux->add_option("--curve", af.curve, "CSV of k,max_nu,min_nu per iteration");
  add_run_flags(aux, auxetic_flags);

  DiagnoseFlags df;
  auto* diag = app.add_subcommand("diagnose", "fit convergence rates of a saved trace");
  diag->add_option("trace", df.trace, "trace JSON")->required();
  diag->add_option("problem", df.problem, "problem JSON the trace came from")->required();
  diag->add_option("--eta", df.eta, "step size used for the run (default: file config)");
  diag->add_option("--min-tail", df.min_tail, "fewest tail iterations to fit")->capture_default_str();
  diag->add_option("--seed", df.seed, "power-iteration seed")->capture_default_str();
  diag->add_option("--out", df.out, "report JSON path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*solve) return cmd_solve(solve_file, solve_flags);
    if (*mm) return cmd_minimax(minimax_file, minimax_flags);
    if (*aux) return cmd_auxetic(af, auxetic_flags);
    if (*diag) return cmd_diagnose(df);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
