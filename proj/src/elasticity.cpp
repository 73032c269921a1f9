#include "tango/elasticity.hpp"

#include <stdexcept>

namespace tango {

namespace {

constexpr int kRow[6] = {0, 1, 1, 2, 2, 2};
constexpr int kCol[6] = {0, 0, 1, 0, 1, 2};

}  // namespace

Matrix3<double> cholesky_factor(const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() < 6) throw std::invalid_argument("cholesky_factor: need 6 parameters");
  Matrix3<double> L = Matrix3<double>::Zero();
  for (int q = 0; q < 6; ++q) L(kRow[q], kCol[q]) = x[q];
  return L;
}

Matrix3<double> stiffness_from_factor(const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Matrix3<double> L = cholesky_factor(x);
  return L * L.transpose();
}

std::vector<double> ring_angles(int k) {
  std::vector<double> out;
  for (int i = 0; i < k; ++i) out.push_back(180.0 * i / k);
  return out;
}

MinimaxProblem build_auxetic_problem(int k, const AuxeticOptions& options) {
  if (k < 2) throw std::invalid_argument("build_auxetic_problem: need at least 2 directions");

  MinimaxProblem mp;
  mp.n = 6;
  mp.ring = true;
  for (double phi : ring_angles(k)) {
    const Direction<double> d{phi};
    auto value = [d](const Eigen::VectorXd& x) {
      const ElasticTensor<double> C{stiffness_from_factor(x.head(6)), TensorRole::Stiffness};
      return poisson_ratio(invert(C), d);
    };
    // d nu / dC = -D G D, and d(L L^T)/dL_ij contracted with a symmetric M is 2 (M L)_ij.
    auto gradient = [d](const Eigen::VectorXd& x) {
      const Matrix3<double> L = cholesky_factor(x.head(6));
      const Matrix3<double> D = invert(ElasticTensor<double>{L * L.transpose()}).m;
      const Matrix3<double> M = -D * poisson_gradient_compliance(D, d) * D;
      const Matrix3<double> dL = 2.0 * M * L;
      Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
      for (int q = 0; q < 6; ++q) g[q] = dL(kRow[q], kCol[q]);
      return g;
    };
    mp.objectives.emplace_back(value, gradient);
  }

  for (int var : {0, 2, 5}) mp.constraints.push_back(Constraint::box_lower(6, var, options.diagonal_floor));

  const double trace = options.trace;
  mp.constraints.push_back(Constraint::equality(Function(
      [trace](const Eigen::VectorXd& x) { return x.head(6).squaredNorm() - trace; },
      [](const Eigen::VectorXd& x) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
        g.head(6) = 2.0 * x.head(6);
        return g;
      })));
  return mp;
}

Eigen::VectorXd auxetic_start() {
  Eigen::VectorXd x(6);
  x << 1, 0, 1, 0, 0, 1;
  return x;
}

Eigen::VectorXd auxetic_ratios(const Eigen::Ref<const Eigen::VectorXd>& x, int k) {
  const Matrix3<double> D = invert(ElasticTensor<double>{stiffness_from_factor(x.head(6))}).m;
  const auto angles = ring_angles(k);
  Eigen::VectorXd out(k);
  for (int i = 0; i < k; ++i) out[i] = poisson_ratio(D, Direction<double>{angles[i]});
  return out;
}

}  // namespace tango
