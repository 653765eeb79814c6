#pragma once

// Differentiation substrate: forward-mode dual numbers (nestable for exact
// second partials) and a central finite-difference oracle.

#include <cmath>
#include <concepts>
#include <span>
#include <string>
#include <vector>

#include "emt/errors.hpp"

namespace emt {

// Elementary functions on plain doubles. They live in namespace emt so that
// generic code can call sin(x), sqrt(x), ... unqualified for any scalar type.
inline double sin(double x) { return std::sin(x); }
inline double cos(double x) { return std::cos(x); }
inline double tan(double x) { return std::tan(x); }
inline double exp(double x) { return std::exp(x); }

inline double log(double x) {
  if (!(x > 0.0)) throw DomainError("log of non-positive argument " + std::to_string(x));
  return std::log(x);
}

inline double sqrt(double x) {
  if (x < 0.0) throw DomainError("sqrt of negative argument " + std::to_string(x));
  return std::sqrt(x);
}

inline double pow(double a, double b) { return std::pow(a, b); }
inline double abs(double x) { return std::abs(x); }

inline double value_of(double x) { return x; }

/// Forward-mode dual number carrying a single directional derivative.
///
/// Arithmetic on the value slot is ordinary real arithmetic; the derivative
/// slot follows the product and chain rules. Nesting (Dual<Dual<double>>)
/// seeds a second direction in the inner level and yields exact mixed
/// second partials in `.d.d`.
template <class T>
struct Dual {
  T v{};
  T d{};

  constexpr Dual() = default;
  constexpr Dual(double value) : v(value), d(0.0) {}  // NOLINT: literals promote
  constexpr Dual(const T& value, const T& deriv) : v(value), d(deriv) {}
  constexpr explicit Dual(const T& value)
    requires(!std::same_as<T, double>)
      : v(value), d(0.0) {}

  Dual& operator+=(const Dual& o) {
    v += o.v;
    d += o.d;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    d -= o.d;
    return *this;
  }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }
  Dual& operator/=(const Dual& o) { return *this = *this / o; }
};

using D1 = Dual<double>;
using D2 = Dual<D1>;
using D3 = Dual<D2>;

template <class T>
double value_of(const Dual<T>& x) {
  return value_of(x.v);
}

template <class T>
constexpr Dual<T> operator-(const Dual<T>& a) {
  return {-a.v, -a.d};
}
template <class T>
constexpr Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
  return {a.v + b.v, a.d + b.d};
}
template <class T>
constexpr Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
  return {a.v - b.v, a.d - b.d};
}
template <class T>
constexpr Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  return {a.v * b.v, a.d * b.v + a.v * b.d};
}
template <class T>
constexpr Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  T q = a.v / b.v;
  return {q, (a.d - q * b.d) / b.v};
}

template <class T>
constexpr Dual<T> operator+(const Dual<T>& a, double b) {
  return {a.v + b, a.d};
}
template <class T>
constexpr Dual<T> operator+(double a, const Dual<T>& b) {
  return {a + b.v, b.d};
}
template <class T>
constexpr Dual<T> operator-(const Dual<T>& a, double b) {
  return {a.v - b, a.d};
}
template <class T>
constexpr Dual<T> operator-(double a, const Dual<T>& b) {
  return {a - b.v, -b.d};
}
template <class T>
constexpr Dual<T> operator*(const Dual<T>& a, double b) {
  return {a.v * b, a.d * b};
}
template <class T>
constexpr Dual<T> operator*(double a, const Dual<T>& b) {
  return {a * b.v, a * b.d};
}
template <class T>
constexpr Dual<T> operator/(const Dual<T>& a, double b) {
  return {a.v / b, a.d / b};
}
template <class T>
constexpr Dual<T> operator/(double a, const Dual<T>& b) {
  T q = a / b.v;
  return {q, -q * b.d / b.v};
}

template <class T>
Dual<T> sin(const Dual<T>& a) {
  return {sin(a.v), cos(a.v) * a.d};
}
template <class T>
Dual<T> cos(const Dual<T>& a) {
  return {cos(a.v), -sin(a.v) * a.d};
}
template <class T>
Dual<T> tan(const Dual<T>& a) {
  T t = tan(a.v);
  return {t, (1.0 + t * t) * a.d};
}
template <class T>
Dual<T> exp(const Dual<T>& a) {
  T e = exp(a.v);
  return {e, e * a.d};
}
template <class T>
Dual<T> log(const Dual<T>& a) {
  return {log(a.v), a.d / a.v};
}
template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  if (!(value_of(a) > 0.0)) {
    throw DomainError("sqrt argument " + std::to_string(value_of(a)) +
                      " is not differentiable (must be > 0)");
  }
  T s = sqrt(a.v);
  return {s, a.d / (2.0 * s)};
}

/// |a|, differentiable away from zero.
template <class T>
Dual<T> abs(const Dual<T>& a) {
  return value_of(a) < 0.0 ? -a : a;
}

// Constant exponent: valid for negative bases when c is integral.
template <class T>
Dual<T> pow(const Dual<T>& a, double c) {
  if (c == 0.0) return Dual<T>(1.0);
  if (c == 1.0) return a;
  return {pow(a.v, c), c * pow(a.v, c - 1.0) * a.d};
}
template <class T>
Dual<T> pow(const Dual<T>& a, const Dual<T>& b) {
  return exp(b * log(a));
}
template <class T>
Dual<T> pow(double a, const Dual<T>& b) {
  return exp(b * log(a));
}

/// Copy of `x` lifted one dual level with direction `dir` seeded.
template <class S>
std::vector<Dual<S>> seeded(std::span<const S> x, int dir) {
  std::vector<Dual<S>> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.emplace_back(x[i], static_cast<int>(i) == dir ? S(1.0) : S(0.0));
  }
  return out;
}

/// Strip the outermost derivative slot.
template <class S>
std::vector<S> values(std::span<const Dual<S>> x) {
  std::vector<S> out;
  out.reserve(x.size());
  for (const auto& xi : x) out.push_back(xi.v);
  return out;
}

inline void require_direction(std::size_t n, int direction) {
  if (direction < 0 || static_cast<std::size_t>(direction) >= n) {
    throw ConfigError("derivative direction " + std::to_string(direction) +
                      " outside [0, " + std::to_string(n) + ")");
  }
}

/// Exact partial derivative of `f` along `direction` at `x`.
/// `f` must accept std::span<const D1>.
template <class F>
double seed_partial(const F& f, std::span<const double> x, int direction) {
  require_direction(x.size(), direction);
  auto xs = seeded<double>(x, direction);
  return f(std::span<const D1>(xs)).d;
}

/// Exact mixed second partial. Always seeds the smaller index in the outer
/// level, so the result is bitwise symmetric in (d1, d2).
template <class F>
double seed_second(const F& f, std::span<const double> x, int d1, int d2) {
  require_direction(x.size(), d1);
  require_direction(x.size(), d2);
  const int outer = d1 < d2 ? d1 : d2;
  const int inner = d1 < d2 ? d2 : d1;
  auto xi = seeded<double>(x, inner);
  auto xo = seeded<D1>(std::span<const D1>(xi), outer);
  return f(std::span<const D2>(xo)).d.d;
}

/// Central finite-difference scheme (second order).
struct FdScheme {
  double h = 1e-4;
  int order = 2;

  void validate() const {
    if (!(h > 0.0)) throw ConfigError("finite-difference step must be positive");
    if (order != 2) throw ConfigError("only second-order central differences are supported");
  }
};

/// (f(x + h e) - f(x - h e)) / 2h. `f` must accept std::span<const double>.
template <class F>
double fd_partial(const F& f, std::span<const double> x, int direction, const FdScheme& scheme) {
  scheme.validate();
  require_direction(x.size(), direction);
  std::vector<double> xp(x.begin(), x.end());
  std::vector<double> xm(x.begin(), x.end());
  xp[direction] += scheme.h;
  xm[direction] -= scheme.h;
  const double fp = f(std::span<const double>(xp));
  const double fm = f(std::span<const double>(xm));
  return (fp - fm) / (2.0 * scheme.h);
}

/// How the outermost coordinate derivative of a check is taken. Inner
/// derivatives (field strength, connection, Lagrangian partials) are always
/// exact.
struct DerivativeMode {
  enum class Kind { dual, fd };
  Kind kind = Kind::dual;
  double h = 1e-4;

  static DerivativeMode dual() { return {}; }
  static DerivativeMode fd(double step) { return {Kind::fd, step}; }
  bool is_fd() const { return kind == Kind::fd; }
};

}  // namespace emt
