#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "tango/minimax.hpp"

// 2D linear elasticity in the orthonormal basis of symmetric 2x2 matrices
//   f1 = [[1,0],[0,0]], f2 = [[0,0],[0,1]], f3 = [[0,1],[1,0]] / sqrt(2),
// so that the Frobenius product of two symmetric matrices is the dot product
// of their coordinate 3-vectors and tensors become symmetric 3x3 matrices.

namespace tango {

class NotPositiveDefiniteError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class TensorRole { Stiffness, Compliance };

template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

template <typename Scalar>
using StressVector = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar = double>
struct ElasticTensor {
  Matrix3<Scalar> m;
  TensorRole role = TensorRole::Stiffness;
};

/// Unit vector v = (cos phi, sin phi), phi in degrees.
template <typename Scalar = double>
struct Direction {
  Scalar degrees{};

  Eigen::Matrix<Scalar, 2, 1> v() const {
    using std::cos;
    using std::sin;
    const Scalar r = degrees * Scalar(std::numbers::pi / 180.0);
    return {cos(r), sin(r)};
  }
};

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> to_matrix(const StressVector<Scalar>& s) {
  const Scalar off = s[2] / Scalar(std::numbers::sqrt2);
  Eigen::Matrix<Scalar, 2, 2> out;
  out << s[0], off, off, s[1];
  return out;
}

template <typename Scalar>
StressVector<Scalar> from_matrix(const Eigen::Matrix<Scalar, 2, 2>& a) {
  return {a(0, 0), a(1, 1), Scalar(std::numbers::sqrt2) * a(0, 1)};
}

/// Throws NotPositiveDefiniteError unless C is symmetric positive definite.
template <typename Scalar>
ElasticTensor<Scalar> invert(const ElasticTensor<Scalar>& c) {
  Eigen::LLT<Matrix3<Scalar>> llt(c.m);
  if (llt.info() != Eigen::Success || !(llt.matrixL().toDenseMatrix().diagonal().minCoeff() > 0))
    throw NotPositiveDefiniteError("elastic tensor is not positive definite");
  Matrix3<Scalar> inv = llt.solve(Matrix3<Scalar>::Identity());
  inv = (Scalar(0.5) * (inv + inv.transpose())).eval();
  return {inv, c.role == TensorRole::Stiffness ? TensorRole::Compliance : TensorRole::Stiffness};
}

/// Uniaxial stress along v and along v-perp.
template <typename Scalar>
std::pair<StressVector<Scalar>, StressVector<Scalar>> stress_of_direction(const Direction<Scalar>& d) {
  const auto v = d.v();
  const Scalar c = v[0], s = v[1];
  const Scalar r2 = Scalar(std::numbers::sqrt2);
  return {StressVector<Scalar>(c * c, s * s, r2 * c * s), StressVector<Scalar>(s * s, c * c, -r2 * c * s)};
}

/// nu_v = -<D sigma, sigma_perp> / <D sigma, sigma>.
template <typename Scalar>
Scalar poisson_ratio(const Matrix3<Scalar>& D, const Direction<Scalar>& d) {
  const auto [sigma, perp] = stress_of_direction(d);
  const StressVector<Scalar> Ds = D * sigma;
  const Scalar den = Ds.dot(sigma);
  if (!(den > Scalar(0))) throw NotPositiveDefiniteError("<D sigma, sigma> is not positive");
  return -Ds.dot(perp) / den;
}

template <typename Scalar>
Scalar poisson_ratio(const ElasticTensor<Scalar>& D, const Direction<Scalar>& d) {
  return poisson_ratio(D.m, d);
}

/// d nu_v / dD as a symmetric matrix.
template <typename Scalar>
Matrix3<Scalar> poisson_gradient_compliance(const Matrix3<Scalar>& D, const Direction<Scalar>& d) {
  const auto [sigma, perp] = stress_of_direction(d);
  const StressVector<Scalar> Ds = D * sigma;
  const Scalar den = Ds.dot(sigma);
  if (!(den > Scalar(0))) throw NotPositiveDefiniteError("<D sigma, sigma> is not positive");
  const Scalar num = Ds.dot(perp);
  const Matrix3<Scalar> cross = sigma * perp.transpose();
  return -Scalar(0.5) * (cross + cross.transpose()) / den + (num / (den * den)) * (sigma * sigma.transpose());
}

/// Directional derivative of nu under C -> C + t dC, using dD = -D dC D.
template <typename Scalar>
Scalar chain_to_stiffness(const Matrix3<Scalar>& D, const Matrix3<Scalar>& grad_wrt_D,
                          const Matrix3<Scalar>& dC) {
  return (grad_wrt_D.cwiseProduct(-D * dC * D)).sum();
}

/// Lower-triangular factor from x = (L11, L21, L22, L31, L32, L33).
Matrix3<double> cholesky_factor(const Eigen::Ref<const Eigen::VectorXd>& x);

/// C = L L^T for the packed factor.
Matrix3<double> stiffness_from_factor(const Eigen::Ref<const Eigen::VectorXd>& x);

/// Equally spaced angles on [0, 180).
std::vector<double> ring_angles(int k);

struct AuxeticOptions {
  double diagonal_floor = 0.05;
  double trace = 3.0;
};

/// min over L of max_i nu(phi_i) for C = L L^T, with k >= 2 ring-ordered
/// directions, L_ii >= diagonal_floor, and trace(C) = trace.
MinimaxProblem build_auxetic_problem(int k, const AuxeticOptions& options = {});

/// The packed identity factor.
Eigen::VectorXd auxetic_start();

/// nu at every ring angle for the packed factor x (extra trailing entries ignored).
Eigen::VectorXd auxetic_ratios(const Eigen::Ref<const Eigen::VectorXd>& x, int k);

}  // namespace tango
