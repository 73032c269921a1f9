#pragma once

#include <cmath>
#include <deque>

#include "tango/model.hpp"

namespace tango::detail {

inline bool all_finite(const Vector& v) { return v.allFinite(); }

/// Watches step norms for growth of 10x over five iterations.
class DivergenceMonitor {
 public:
  bool diverging(double step) {
    history_.push_back(step);
    if (history_.size() > 6) history_.pop_front();
    return history_.size() == 6 && history_.front() > 0.0 && step > 10.0 * history_.front();
  }
  void reset() { history_.clear(); }

 private:
  std::deque<double> history_;
};

/// Throws std::invalid_argument listing every structural problem of `p`.
void require_valid(const Problem& p);

/// Fills the recovered multipliers, active set, and KKT residual of `r` from
/// the last iteration multipliers.
void finalize(const Problem& p, const std::vector<int>& active,
              const std::vector<double>& iteration_multipliers, double eta, SolveResult& r);

}  // namespace tango::detail
