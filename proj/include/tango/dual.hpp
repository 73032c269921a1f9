#pragma once

#include <cmath>

namespace tango {

/// Forward-mode dual number: value plus one directional derivative.
template <typename Scalar>
struct Dual {
  Scalar value{};
  Scalar deriv{};

  constexpr Dual() = default;
  constexpr Dual(Scalar v) : value(v) {}  // NOLINT: implicit lift of constants
  constexpr Dual(Scalar v, Scalar d) : value(v), deriv(d) {}

  friend constexpr Dual operator+(const Dual& a, const Dual& b) {
    return {a.value + b.value, a.deriv + b.deriv};
  }
  friend constexpr Dual operator-(const Dual& a, const Dual& b) {
    return {a.value - b.value, a.deriv - b.deriv};
  }
  friend constexpr Dual operator-(const Dual& a) { return {-a.value, -a.deriv}; }
  friend constexpr Dual operator*(const Dual& a, const Dual& b) {
    return {a.value * b.value, a.deriv * b.value + a.value * b.deriv};
  }
  friend constexpr Dual operator/(const Dual& a, const Dual& b) {
    return {a.value / b.value,
            (a.deriv * b.value - a.value * b.deriv) / (b.value * b.value)};
  }
  Dual& operator+=(const Dual& o) { return *this = *this + o; }
  Dual& operator-=(const Dual& o) { return *this = *this - o; }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }
  Dual& operator/=(const Dual& o) { return *this = *this / o; }
};

template <typename Scalar>
Dual<Scalar> sin(const Dual<Scalar>& a) {
  using std::cos, std::sin;
  return {sin(a.value), cos(a.value) * a.deriv};
}
template <typename Scalar>
Dual<Scalar> cos(const Dual<Scalar>& a) {
  using std::cos, std::sin;
  return {cos(a.value), -sin(a.value) * a.deriv};
}
template <typename Scalar>
Dual<Scalar> exp(const Dual<Scalar>& a) {
  using std::exp;
  const Scalar e = exp(a.value);
  return {e, e * a.deriv};
}
template <typename Scalar>
Dual<Scalar> log(const Dual<Scalar>& a) {
  using std::log;
  return {log(a.value), a.deriv / a.value};
}
template <typename Scalar>
Dual<Scalar> sqrt(const Dual<Scalar>& a) {
  using std::sqrt;
  const Scalar s = sqrt(a.value);
  return {s, a.deriv / (Scalar(2) * s)};
}
// d|a| taken as sign(a) with 0 at the kink.
template <typename Scalar>
Dual<Scalar> abs(const Dual<Scalar>& a) {
  using std::abs;
  const Scalar sign = a.value > 0 ? Scalar(1) : (a.value < 0 ? Scalar(-1) : Scalar(0));
  return {abs(a.value), sign * a.deriv};
}

/// Integer power by repeated squaring; the derivative is n a^(n-1) a'.
template <typename Scalar>
Dual<Scalar> ipow(const Dual<Scalar>& a, int n) {
  using std::pow;
  if (n == 0) return {Scalar(1), Scalar(0)};
  const Scalar base = pow(a.value, n - 1);
  return {base * a.value, Scalar(n) * base * a.deriv};
}

inline double ipow(double a, int n) { return std::pow(a, n); }

inline double value_of(double v) { return v; }
template <typename Scalar>
Scalar value_of(const Dual<Scalar>& d) {
  return d.value;
}

}  // namespace tango
