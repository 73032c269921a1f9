#pragma once

#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "tango/diagnostics.hpp"
#include "tango/minimax.hpp"
#include "tango/model.hpp"

namespace tango {

using json = nlohmann::json;

/// Malformed input file; the message starts with the offending field path.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// A problem file. General constraints come first in file order, followed by
/// the box bounds (lower before upper for each "box" entry); "ring" indexes
/// the "constraints" array from 0 and "var" numbers variables from 1.
struct ProblemFile {
  Problem problem;                       // objective from "objective"
  std::optional<MinimaxProblem> minimax;  // from "objectives"
  Vector x0;
  SolverConfig config;
};

/// Parses {"n", "objective" | "objectives", "constraints", "box", "ring", "x0",
/// "config"}. With `minimax` set, "objectives" is required and the ring (if
/// any) must list every objective in order.
ProblemFile parse_problem(const json& j, bool minimax = false);

json read_json_file(const std::string& path);

json to_json(const Event& e);
json to_json(const IterationRecord& r);
IterationRecord record_from_json(const json& j);
std::vector<IterationRecord> trace_from_json(const json& j);

json to_json(const SolveResult& r, bool with_trace = false);
json to_json(const ConvergenceReport& r);

/// Writes a JSON array of iteration records one element at a time, flushing
/// after each so that an interrupted run still leaves every finished record.
class TraceWriter {
 public:
  explicit TraceWriter(const std::string& path);
  ~TraceWriter();
  TraceWriter(const TraceWriter&) = delete;
  TraceWriter& operator=(const TraceWriter&) = delete;

  void write(const IterationRecord& r);
  void close();

 private:
  std::ofstream out_;
  bool first_ = true;
  bool closed_ = false;
};

/// ||g|| over the record's active constraints.
double active_constraint_norm(const IterationRecord& r);

/// CSV with header k,f,gnorm,step,active_count, one row per record.
void write_history_csv(const std::string& path, const std::vector<IterationRecord>& trace);

}  // namespace tango
