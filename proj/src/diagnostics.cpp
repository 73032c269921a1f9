#include "tango/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "tango/equality.hpp"

namespace tango {

namespace {

std::vector<int> default_active(const Problem& p, const std::vector<int>& active) {
  if (!active.empty()) return active;
  std::vector<int> eq;
  for (int i = 0; i < p.num_constraints(); ++i)
    if (p.constraints[i].is_equality()) eq.push_back(i);
  return eq;
}

struct LineFit {
  double slope = 0.0;
  double r2 = 0.0;
};

LineFit least_squares(const std::vector<double>& t, const std::vector<double>& y) {
  const auto n = static_cast<double>(t.size());
  double mt = 0, my = 0;
  for (std::size_t i = 0; i < t.size(); ++i) mt += t[i], my += y[i];
  mt /= n;
  my /= n;
  double stt = 0, sty = 0, syy = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - mt) * (t[i] - mt);
    sty += (t[i] - mt) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sty / stt;
  fit.r2 = syy > 0.0 ? (sty * sty) / (stt * syy) : 1.0;
  return fit;
}

}  // namespace

double spectral_radius_iteration_map(const Problem& p, const Vector& x_star, double eta,
                                     const std::vector<int>& active_in, std::uint64_t seed) {
  const auto active = default_active(p, active_in);
  auto S = [&](const Vector& x) -> Vector {
    const Matrix G = constraint_gradients(p, x, active);
    Vector g(static_cast<Eigen::Index>(active.size()));
    for (std::size_t i = 0; i < active.size(); ++i) g[i] = p.constraints[active[i]].g(x);
    const Vector grad_f = p.objective.gradient(x);
    return x - eta * grad_f - G * solve_multiplier_system(G, g, grad_f, eta, 1e-12);
  };

  {
    // Regularity at x* itself; the differencing below never evaluates there.
    const Matrix G = constraint_gradients(p, x_star, active);
    solve_multiplier_system(G, Vector::Zero(G.cols()), Vector::Zero(x_star.size()), 0.0, 1e-12);
  }
  const Eigen::Index n = x_star.size();
  Matrix J(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double h = 1e-6 * (1.0 + std::abs(x_star[j]));
    Vector xp = x_star, xm = x_star;
    xp[j] += h;
    xm[j] -= h;
    J.col(j) = (S(xp) - S(xm)) / (2.0 * h);
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  v.normalize();

  // Geometric mean growth over the second half of the run is insensitive to
  // oscillation between eigenvalues of equal modulus.
  constexpr int kSteps = 200;
  double log_growth = 0.0;
  for (int step = 0; step < kSteps; ++step) {
    Vector w = J * v;
    const double norm = w.norm();
    if (!(norm > 0.0)) return 0.0;
    if (step >= kSteps / 2) log_growth += std::log(norm);
    v = w / norm;
  }
  return std::exp(log_growth / (kSteps - kSteps / 2));
}

ConvergenceReport convergence_report(const std::vector<IterationRecord>& trace,
                                     const Vector& x_star, const ReportOptions& options) {
  ConvergenceReport r;
  for (const auto& rec : trace) {
    if (rec.x.size() != x_star.size())
      throw std::invalid_argument("convergence_report: trace and x* dimensions differ");
    r.errors.push_back((rec.x - x_star).norm());
  }

  const int usable_end = std::max(0, static_cast<int>(trace.size()) - options.drop_last);
  const double floor = options.error_floor * (1.0 + x_star.norm());
  std::vector<int> eligible;
  for (int k = 0; k < usable_end; ++k)
    if (r.errors[k] > floor && std::isfinite(r.errors[k])) eligible.push_back(k);
  if (static_cast<int>(eligible.size()) < std::max(options.min_tail, 2))
    throw InsufficientTailError("only " + std::to_string(eligible.size()) +
                                " usable tail iterations, need " + std::to_string(options.min_tail));

  const int count = static_cast<int>(eligible.size());
  const int tail = std::max(options.min_tail, count / 2);
  std::vector<double> t, y;
  for (int q = std::max(0, count - tail); q < count; ++q) {
    t.push_back(eligible[q]);
    y.push_back(std::log(r.errors[eligible[q]]));
  }
  r.fit_begin = static_cast<int>(t.front());
  r.fit_end = static_cast<int>(t.back()) + 1;
  const LineFit ex = least_squares(t, y);
  r.error_slope = ex.slope;
  r.rate = std::exp(ex.slope);
  r.rate_r2 = ex.r2;
  r.linear = r.rate_r2 > 0.99 && r.rate > 0.0 && r.rate < 1.0;

  // Constraint values from the first step on; iterate 0 is the arbitrary start.
  std::vector<double> tg, yg;
  for (int k = 1; k < usable_end; ++k) {
    const auto& rec = trace[k];
    double sq = 0.0;
    for (int i : rec.active)
      if (i >= 0 && i < rec.g.size()) sq += rec.g[i] * rec.g[i];
    const double norm = std::sqrt(sq);
    if (norm > options.constraint_floor && std::isfinite(norm)) {
      tg.push_back(k);
      yg.push_back(std::log(norm));
    }
  }
  if (tg.size() < 3) {
    r.constraint_slope = -std::numeric_limits<double>::infinity();
  } else {
    r.constraint_slope = least_squares(tg, yg).slope;
    if (r.error_slope < 0.0) {
      r.slope_ratio = r.constraint_slope / r.error_slope;
      r.decay_verified = *r.slope_ratio >= 1.7 && *r.slope_ratio <= 2.3;
    }
  }
  return r;
}

double check_gradient(const Function& fn, const Vector& p) {
  const Vector analytic = fn.gradient(p);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double h = 1e-6 * (1.0 + std::abs(p[i]));
    Vector xp = p, xm = p;
    xp[i] += h;
    xm[i] -= h;
    const double fd = (fn(xp) - fn(xm)) / (2.0 * h);
    const double scale = std::max({std::abs(analytic[i]), std::abs(fd), 1.0});
    worst = std::max(worst, std::abs(analytic[i] - fd) / scale);
  }
  return worst;
}

double second_order_probe(const Problem& p, const Vector& x_star, const std::vector<int>& active,
                          const Vector& multipliers, double rho_min) {
  if (multipliers.size() != p.num_constraints())
    throw std::invalid_argument("second_order_probe: need one multiplier per constraint");
  const Eigen::Index n = x_star.size();
  auto lagrangian_gradient = [&](const Vector& x) {
    Vector grad = p.objective.gradient(x);
    for (int i : active) grad += multipliers[i] * p.constraints[i].g.gradient(x);
    return grad;
  };

  Matrix H(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double h = 1e-5 * (1.0 + std::abs(x_star[j]));
    Vector xp = x_star, xm = x_star;
    xp[j] += h;
    xm[j] -= h;
    H.col(j) = (lagrangian_gradient(xp) - lagrangian_gradient(xm)) / (2.0 * h);
  }
  H = 0.5 * (H + H.transpose()).eval();

  const auto m = static_cast<Eigen::Index>(active.size());
  if (m >= n) return std::numeric_limits<double>::infinity();
  Matrix Z;
  if (m == 0) {
    Z = Matrix::Identity(n, n);
  } else {
    const Matrix G = constraint_gradients(p, x_star, active);
    Eigen::SelfAdjointEigenSolver<Matrix> gram(G.transpose() * G, Eigen::EigenvaluesOnly);
    const double largest = gram.eigenvalues().maxCoeff();
    if (!(largest > 0.0) || gram.eigenvalues().minCoeff() < rho_min * largest)
      throw RankDeficientError("second_order_probe: active gradients are dependent");
    Eigen::HouseholderQR<Matrix> qr(G);
    const Matrix Q = qr.householderQ();
    Z = Q.rightCols(n - m);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(Z.transpose() * H * Z, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

}  // namespace tango
