#pragma once

// Lagrangians L(F_ab, g_ab) and L(d_a phi, g_ab) with exact partials.
//
// Pair-counting convention: derivatives with respect to the antisymmetric
// F_ab and the symmetric g_ab are defined by
//     dL = (dL/dF_ab) dF_ab + (dL/dg_ab) dg_ab
// summed over ALL ordered index pairs, so each independent component is
// counted twice off the diagonal. dL/dF_ab is the antisymmetric (2,0)
// tensor and dL/dg_ab the symmetric one. F is held fixed with LOWER indices
// when differentiating with respect to g_ab.

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "emt/dual.hpp"
#include "emt/errors.hpp"
#include "emt/tensor.hpp"

namespace emt {

inline constexpr std::string_view kPairCountingConvention =
    "dL/dF_ab antisymmetric and dL/dg_ab symmetric, defined by dL = (dL/dF_ab) dF_ab + "
    "(dL/dg_ab) dg_ab summed over all ordered index pairs; F_ab (lower) held fixed under "
    "metric variation";

/// F^ab = g^ac g^bd F_cd.
template <class S>
Tensor<S> raise_both(const Tensor<S>& f, const Tensor<S>& ginv) {
  const int n = f.dim();
  Tensor<S> tmp(n, Valence{1, 1});  // tmp(a, d) = g^ac F_cd
  for (int a = 0; a < n; ++a)
    for (int d = 0; d < n; ++d) {
      S s(0.0);
      for (int c = 0; c < n; ++c) s += ginv(a, c) * f(c, d);
      tmp(a, d) = s;
    }
  Tensor<S> up(n, Valence{2, 0});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      S s(0.0);
      for (int d = 0; d < n; ++d) s += tmp(a, d) * ginv(d, b);
      up(a, b) = s;
    }
  return up;
}

/// F_ab F^ab.
template <class S>
S field_invariant(const Tensor<S>& f, const Tensor<S>& ginv) {
  auto up = raise_both(f, ginv);
  S s(0.0);
  for (std::size_t i = 0; i < f.size(); ++i) s += f.flat(i) * up.flat(i);
  return s;
}

class LagrangianModel {
 public:
  struct Maxwell {};
  struct BornInfeld {
    double beta;
  };
  /// L = sum_k coeffs[k] (F_ab F^ab)^(k+1).
  struct InvariantSeries {
    std::vector<double> coeffs;
  };

  /// Maxwell.
  LagrangianModel() : LagrangianModel("maxwell", Maxwell{}) {}

  /// L = -1/4 F_ab F^ab.
  static LagrangianModel maxwell();
  /// L = beta^2 (1 - sqrt(det(g + F/beta) / det g)).
  static LagrangianModel born_infeld(double beta);
  /// L = -1/4 F_ab F^ab + lambda (F_ab F^ab)^2.
  static LagrangianModel quartic(double lambda);
  static LagrangianModel power_series(std::vector<double> coeffs);

  const std::string& kind() const { return kind_; }
  std::map<std::string, double> params() const;

  template <class S>
  S evaluate(const Tensor<S>& f, const Tensor<S>& g) const {
    return evaluate(f, g, inverse(g));
  }

  template <class S>
  S evaluate(const Tensor<S>& f, const Tensor<S>& g, const Tensor<S>& ginv) const {
    (void)g;
    if (std::holds_alternative<Maxwell>(impl_)) return -0.25 * field_invariant(f, ginv);
    if (const auto* s = std::get_if<InvariantSeries>(&impl_)) {
      const S inv = field_invariant(f, ginv);
      S power = inv;
      S total(0.0);
      for (double c : s->coeffs) {
        total += c * power;
        power = power * inv;
      }
      return total;
    }
    const double beta = std::get<BornInfeld>(impl_).beta;
    const int n = f.dim();
    Tensor<S> m(n, Valence{1, 1});
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        S s(a == b ? 1.0 : 0.0);
        for (int c = 0; c < n; ++c) s += ginv(a, c) * f(c, b) / beta;
        m(a, b) = s;
      }
    const S ratio = determinant(m);
    if (!(value_of(ratio) > 0.0)) {
      throw DomainError("born-infeld: det(g + F/beta)/det(g) = " +
                        std::to_string(value_of(ratio)) + " must be > 0");
    }
    return beta * beta * (1.0 - sqrt(ratio));
  }

 private:
  using Impl = std::variant<Maxwell, BornInfeld, InvariantSeries>;
  LagrangianModel(std::string kind, Impl impl) : kind_(std::move(kind)), impl_(std::move(impl)) {}

  std::string kind_;
  Impl impl_;
};

/// Antisymmetric dL/dF_ab at (F, g); F must be antisymmetric.
template <class S>
Tensor<S> dL_dF(const LagrangianModel& model, const Tensor<S>& f, const Tensor<S>& g) {
  const int n = f.dim();
  auto ginv = inverse(g);
  auto gl = lift(g);
  auto ginvl = lift(ginv);
  auto fl = lift(f);
  Tensor<S> out(n, Valence{2, 0});
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      fl(a, b).d = S(1.0);
      fl(b, a).d = S(-1.0);
      const S d = model.evaluate(fl, gl, ginvl).d;
      fl(a, b).d = S(0.0);
      fl(b, a).d = S(0.0);
      out(a, b) = 0.5 * d;
      out(b, a) = -0.5 * d;
    }
  return out;
}

/// Symmetric dL/dg_ab at (F, g) with F_ab held fixed.
template <class S>
Tensor<S> dL_dg(const LagrangianModel& model, const Tensor<S>& f, const Tensor<S>& g) {
  const int n = f.dim();
  auto gl = lift(g);
  auto fl = lift(f);
  Tensor<S> out(n, Valence{2, 0});
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      gl(a, b).d = S(1.0);
      gl(b, a).d = S(1.0);
      const S d = model.evaluate(fl, gl).d;
      gl(a, b).d = S(0.0);
      gl(b, a).d = S(0.0);
      const S v = a == b ? d : 0.5 * d;
      out(a, b) = v;
      out(b, a) = v;
    }
  return out;
}

/// Hand-coded Maxwell partials, kept as an independent cross-check:
/// dL/dF_ab = -1/2 F^ab.
Tensor<double> maxwell_dL_dF_analytic(const Tensor<double>& f, const Tensor<double>& g);
/// dL/dg_ab = 1/2 F^ac F^b_c.
Tensor<double> maxwell_dL_dg_analytic(const Tensor<double>& f, const Tensor<double>& g);

/// First-order scalar Lagrangian L = sum_k coeffs[k] X^(k+1) with
/// X = -1/2 g^ab d_a phi d_b phi.
class ScalarFieldModel {
 public:
  /// Massless.
  ScalarFieldModel() : ScalarFieldModel("scalar-massless", {1.0}) {}

  static ScalarFieldModel massless();
  /// L = X + lambda X^2.
  static ScalarFieldModel kinetic(double lambda);

  const std::string& kind() const { return kind_; }
  std::map<std::string, double> params() const;

  template <class S>
  S evaluate(const Tensor<S>& dphi, const Tensor<S>& g) const {
    return evaluate(dphi, g, inverse(g));
  }

  template <class S>
  S evaluate(const Tensor<S>& dphi, const Tensor<S>& g, const Tensor<S>& ginv) const {
    (void)g;
    const int n = dphi.dim();
    S x(0.0);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) x += ginv(a, b) * dphi(a) * dphi(b);
    x = -0.5 * x;
    S power = x;
    S total(0.0);
    for (double c : coeffs_) {
      total += c * power;
      power = power * x;
    }
    return total;
  }

 private:
  ScalarFieldModel(std::string kind, std::vector<double> coeffs)
      : kind_(std::move(kind)), coeffs_(std::move(coeffs)) {}

  std::string kind_;
  std::vector<double> coeffs_;
};

/// dL/d(d_a phi), a (1,0) tensor.
template <class S>
Tensor<S> scalar_dL(const ScalarFieldModel& model, const Tensor<S>& dphi, const Tensor<S>& g) {
  const int n = dphi.dim();
  auto ginv = inverse(g);
  auto gl = lift(g);
  auto ginvl = lift(ginv);
  auto pl = lift(dphi);
  Tensor<S> out(n, Valence{1, 0});
  for (int a = 0; a < n; ++a) {
    pl(a).d = S(1.0);
    out(a) = model.evaluate(pl, gl, ginvl).d;
    pl(a).d = S(0.0);
  }
  return out;
}

/// Symmetric dL/dg_ab with d_a phi held fixed.
template <class S>
Tensor<S> scalar_dL_dg(const ScalarFieldModel& model, const Tensor<S>& dphi, const Tensor<S>& g) {
  const int n = dphi.dim();
  auto gl = lift(g);
  auto pl = lift(dphi);
  Tensor<S> out(n, Valence{2, 0});
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      gl(a, b).d = S(1.0);
      gl(b, a).d = S(1.0);
      const S d = model.evaluate(pl, gl).d;
      gl(a, b).d = S(0.0);
      gl(b, a).d = S(0.0);
      const S v = a == b ? d : 0.5 * d;
      out(a, b) = v;
      out(b, a) = v;
    }
  return out;
}

}  // namespace emt
