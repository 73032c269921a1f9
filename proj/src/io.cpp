#include "tango/io.hpp"

#include <cmath>
#include <iomanip>
#include <limits>

#include "tango/expr.hpp"

namespace tango {

namespace {

const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw SchemaError(path + "." + key, "missing required field");
  return j.at(key);
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
  return j.get<int>();
}

const json& array(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array");
  return j;
}

Function expression_function(const json& j, const std::string& path, int n) {
  if (!j.is_string()) throw SchemaError(path, "expected an expression string");
  const auto text = j.get<std::string>();
  auto parsed = [&] {
    try {
      return parse(text);
    } catch (const ParseError& err) {
      throw SchemaError(path, "parse error at offset " + std::to_string(err.offset()) + ": " +
                                  err.what());
    }
  };
  Expression e = parsed();
  if (e.max_variable() > n)
    throw SchemaError(path, "uses x" + std::to_string(e.max_variable()) + " but n=" +
                                std::to_string(n));
  return Function::from_expression(std::move(e));
}

SolverConfig parse_config(const json& j, const std::string& path) {
  SolverConfig cfg;
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  if (j.contains("eta")) cfg.eta = number(j["eta"], path + ".eta");
  if (j.contains("tol")) cfg.tol = number(j["tol"], path + ".tol");
  if (j.contains("max_iters")) cfg.max_iters = integer(j["max_iters"], path + ".max_iters");
  if (j.contains("rho_min")) cfg.rho_min = number(j["rho_min"], path + ".rho_min");
  if (j.contains("leader_independence"))
    cfg.leader_independence = number(j["leader_independence"], path + ".leader_independence");
  if (j.contains("halve_eta")) {
    if (!j["halve_eta"].is_boolean()) throw SchemaError(path + ".halve_eta", "expected a boolean");
    cfg.halve_eta = j["halve_eta"].get<bool>();
  }
  if (j.contains("policy")) {
    const auto& v = j["policy"];
    if (v == "most_negative") cfg.policy = DeactivationPolicy::MostNegative;
    else if (v == "warn_on_multiple") cfg.policy = DeactivationPolicy::WarnOnMultiple;
    else throw SchemaError(path + ".policy", "expected \"most_negative\" or \"warn_on_multiple\"");
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(path, e.what());
  }
  return cfg;
}

json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vector_from(const json& j, const std::string& path) {
  array(j, path);
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

}  // namespace

ProblemFile parse_problem(const json& j, bool minimax) {
  const std::string root = "$";
  if (!j.is_object()) throw SchemaError(root, "expected an object");
  ProblemFile out{Problem{0, Function(nullptr, nullptr), {}, {}}, std::nullopt, Vector(), SolverConfig{}};
  const int n = integer(field(j, "n", root), root + ".n");
  if (n < 1) throw SchemaError(root + ".n", "must be at least 1");
  out.problem.n = n;

  std::vector<Function> objectives;
  if (minimax) {
    const auto& objs = array(field(j, "objectives", root), root + ".objectives");
    if (objs.empty()) throw SchemaError(root + ".objectives", "must not be empty");
    for (std::size_t i = 0; i < objs.size(); ++i)
      objectives.push_back(
          expression_function(objs[i], root + ".objectives[" + std::to_string(i) + "]", n));
  } else {
    out.problem.objective = expression_function(field(j, "objective", root), root + ".objective", n);
  }

  int general = 0;
  if (j.contains("constraints")) {
    const auto& cs = array(j["constraints"], root + ".constraints");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::string path = root + ".constraints[" + std::to_string(i) + "]";
      if (!cs[i].is_object()) throw SchemaError(path, "expected an object");
      Function g = expression_function(field(cs[i], "expr", path), path + ".expr", n);
      const auto& kind = field(cs[i], "kind", path);
      if (kind == "eq") out.problem.constraints.push_back(Constraint::equality(std::move(g)));
      else if (kind == "ineq") out.problem.constraints.push_back(Constraint::inequality(std::move(g)));
      else throw SchemaError(path + ".kind", "expected \"eq\" or \"ineq\"");
    }
    general = static_cast<int>(cs.size());
  }

  if (j.contains("box")) {
    const auto& bs = array(j["box"], root + ".box");
    for (std::size_t i = 0; i < bs.size(); ++i) {
      const std::string path = root + ".box[" + std::to_string(i) + "]";
      if (!bs[i].is_object()) throw SchemaError(path, "expected an object");
      const int var = integer(field(bs[i], "var", path), path + ".var");
      if (var < 1 || var > n) throw SchemaError(path + ".var", "must be in 1..n");
      const bool has_lower = bs[i].contains("lower") && !bs[i]["lower"].is_null();
      const bool has_upper = bs[i].contains("upper") && !bs[i]["upper"].is_null();
      if (!has_lower && !has_upper) throw SchemaError(path, "needs \"lower\" or \"upper\"");
      if (has_lower)
        out.problem.constraints.push_back(
            Constraint::box_lower(n, var - 1, number(bs[i]["lower"], path + ".lower")));
      if (has_upper)
        out.problem.constraints.push_back(
            Constraint::box_upper(n, var - 1, number(bs[i]["upper"], path + ".upper")));
    }
  }

  if (j.contains("ring") && !j["ring"].is_null()) {
    const auto& ring = array(j["ring"], root + ".ring");
    for (std::size_t i = 0; i < ring.size(); ++i) {
      const int idx = integer(ring[i], root + ".ring[" + std::to_string(i) + "]");
      if (!minimax && (idx < 0 || idx >= general))
        throw SchemaError(root + ".ring[" + std::to_string(i) + "]",
                          "must index the constraints array");
      out.problem.ring.push_back(idx);
    }
  }

  out.x0 = vector_from(field(j, "x0", root), root + ".x0");
  if (out.x0.size() != n)
    throw SchemaError(root + ".x0", "has " + std::to_string(out.x0.size()) + " entries, n=" +
                                        std::to_string(n));
  if (j.contains("config")) out.config = parse_config(j["config"], root + ".config");

  if (minimax) {
    MinimaxProblem mp;
    mp.n = n;
    mp.objectives = std::move(objectives);
    mp.constraints = out.problem.constraints;
    const auto m = static_cast<int>(mp.objectives.size());
    if (!out.problem.ring.empty()) {
      bool cyclic = static_cast<int>(out.problem.ring.size()) == m;
      for (int i = 0; cyclic && i < m; ++i) cyclic = out.problem.ring[i] == i;
      if (!cyclic) throw SchemaError(root + ".ring", "minimax rings must list objectives 0..m-1");
      mp.ring = true;
    }
    out.problem.ring.clear();
    out.minimax = std::move(mp);
    out.problem = epigraph_reformulate(*out.minimax);
  } else {
    const auto problems = validate(out.problem);
    if (!problems.empty()) throw SchemaError(root, problems.front());
  }
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path, "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path, std::string("malformed JSON: ") + e.what());
  }
}

json to_json(const Event& e) {
  json j{{"type", to_string(e.type)}};
  switch (e.type) {
    case Event::Type::Activate:
    case Event::Type::Deactivate:
    case Event::Type::SkipDependent: j["index"] = e.index; break;
    case Event::Type::Project:
      j["index"] = e.index;
      j["bound"] = e.value;
      break;
    case Event::Type::WarnTooFast: j["count"] = e.count; break;
    case Event::Type::HalveEta: j["eta"] = e.value; break;
  }
  return j;
}

json to_json(const IterationRecord& r) {
  json events = json::array();
  for (const auto& e : r.events) events.push_back(to_json(e));
  return {{"k", r.k},
          {"x", vector_json(r.x)},
          {"f", r.f},
          {"g", vector_json(r.g)},
          {"active", r.active},
          {"multipliers", r.multipliers},
          {"step_norm", r.step_norm},
          {"events", events}};
}

IterationRecord record_from_json(const json& j) {
  const std::string path = "record";
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  IterationRecord r;
  r.k = integer(field(j, "k", path), path + ".k");
  r.x = vector_from(field(j, "x", path), path + ".x");
  const auto& f = field(j, "f", path);
  r.f = f.is_null() ? std::numeric_limits<double>::quiet_NaN() : number(f, path + ".f");
  r.g = vector_from(field(j, "g", path), path + ".g");
  r.active = field(j, "active", path).get<std::vector<int>>();
  r.multipliers = field(j, "multipliers", path).get<std::vector<double>>();
  r.step_norm = number(field(j, "step_norm", path), path + ".step_norm");
  return r;
}

std::vector<IterationRecord> trace_from_json(const json& j) {
  if (!j.is_array()) throw SchemaError("trace", "expected an array of iteration records");
  std::vector<IterationRecord> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    try {
      out.push_back(record_from_json(j[i]));
    } catch (const SchemaError& e) {
      throw SchemaError("trace[" + std::to_string(i) + "]", e.what());
    } catch (const json::exception& e) {
      throw SchemaError("trace[" + std::to_string(i) + "]", e.what());
    }
  }
  return out;
}

json to_json(const SolveResult& r, bool with_trace) {
  json j{{"status", to_string(r.status)},
         {"failure", to_string(r.failure)},
         {"message", r.message},
         {"x", vector_json(r.x)},
         {"multipliers", vector_json(r.multipliers)},
         {"active", r.active},
         {"kkt_residual", r.kkt_residual},
         {"iterations", r.iterations},
         {"eta", r.eta}};
  if (with_trace) {
    json trace = json::array();
    for (const auto& rec : r.trace) trace.push_back(to_json(rec));
    j["trace"] = trace;
  }
  return j;
}

json to_json(const ConvergenceReport& r) {
  json j{{"rate", r.rate},
         {"rate_r2", r.rate_r2},
         {"error_slope", r.error_slope},
         {"constraint_slope", std::isinf(r.constraint_slope) ? json("-inf") : json(r.constraint_slope)},
         {"slope_ratio", r.slope_ratio ? json(*r.slope_ratio) : json(nullptr)},
         {"spectral_radius", r.spectral_radius ? json(*r.spectral_radius) : json(nullptr)},
         {"fit_begin", r.fit_begin},
         {"fit_end", r.fit_end},
         {"linear", r.linear},
         {"decay_verified", r.decay_verified}};
  return j;
}

TraceWriter::TraceWriter(const std::string& path) : out_(path) {
  if (!out_) throw std::runtime_error("cannot write trace file " + path);
  out_ << "[";
  out_.flush();
}

TraceWriter::~TraceWriter() { close(); }

void TraceWriter::write(const IterationRecord& r) {
  out_ << (first_ ? "\n" : ",\n") << to_json(r).dump();
  first_ = false;
  out_.flush();
}

void TraceWriter::close() {
  if (closed_) return;
  out_ << "\n]\n";
  out_.close();
  closed_ = true;
}

double active_constraint_norm(const IterationRecord& r) {
  double sq = 0.0;
  for (int i : r.active)
    if (i >= 0 && i < r.g.size()) sq += r.g[i] * r.g[i];
  return std::sqrt(sq);
}

void write_history_csv(const std::string& path, const std::vector<IterationRecord>& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write history file " + path);
  out << "k,f,gnorm,step,active_count\n" << std::setprecision(17);
  for (const auto& r : trace)
    out << r.k << ',' << r.f << ',' << active_constraint_norm(r) << ',' << r.step_norm << ','
        << r.active.size() << '\n';
}

}  // namespace tango
