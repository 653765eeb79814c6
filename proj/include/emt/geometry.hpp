#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emt/dual.hpp"
#include "emt/expr.hpp"
#include "emt/tensor.hpp"

namespace emt {

using Point = std::vector<double>;

/// Open interval; a missing bound is unbounded.
struct Interval {
  std::optional<double> lower;
  std::optional<double> upper;

  bool contains(double v) const {
    return (!lower || v > *lower) && (!upper || v < *upper);
  }
};

/// A single coordinate patch: dimension, coordinate names, an open box
/// domain and a (closed, interior) box that sample points are drawn from.
class Chart {
 public:
  Chart() = default;
  Chart(std::vector<std::string> coordinates, std::vector<Interval> domain,
        std::vector<Interval> sample_ranges);

  int dim() const { return static_cast<int>(coordinates_.size()); }
  const std::vector<std::string>& coordinates() const { return coordinates_; }
  const std::vector<Interval>& domain() const { return domain_; }
  const std::vector<Interval>& sample_ranges() const { return sample_ranges_; }

  bool contains(std::span<const double> x) const;

  /// Throws DomainError naming the first coordinate outside the domain.
  void require_inside(std::span<const double> x) const;

  /// Deterministic quasi-random points (Halton sequence with a seeded
  /// Cranley-Patterson shift) inside the sample box.
  std::vector<Point> sample_points(int count, std::uint64_t seed) const;

 private:
  std::vector<std::string> coordinates_;
  std::vector<Interval> domain_;
  std::vector<Interval> sample_ranges_;
};

/// Metric g_ab from symmetric storage: only a <= b components are held.
class MetricField {
 public:
  MetricField() = default;
  MetricField(int dim, std::vector<SmoothMap> upper_triangle, std::vector<int> signature);

  static MetricField diagonal(std::vector<SmoothMap> diag, std::vector<int> signature);

  int dim() const { return dim_; }
  const std::vector<int>& signature() const { return signature_; }
  std::string signature_string() const;

  const SmoothMap& component(int a, int b) const {
    if (a > b) std::swap(a, b);
    return upper_[static_cast<std::size_t>(index(a, b))];
  }

  template <class S>
  Tensor<S> at(std::span<const S> x) const {
    Tensor<S> g(dim_, Valence{0, 2});
    for (int a = 0; a < dim_; ++a) {
      for (int b = a; b < dim_; ++b) {
        const auto& f = upper_[static_cast<std::size_t>(index(a, b))];
        const auto cv = f.constant_value();
        S v = cv ? S(*cv) : f(x);
        g(a, b) = v;
        g(b, a) = v;
      }
    }
    return g;
  }

 private:
  int index(int a, int b) const { return a * dim_ - a * (a - 1) / 2 + (b - a); }

  int dim_ = 0;
  std::vector<SmoothMap> upper_;
  std::vector<int> signature_;
};

enum class VectorKind { arbitrary, killing_candidate, constant };

std::string_view to_string(VectorKind kind);
VectorKind vector_kind_from_string(std::string_view s);

/// Contravariant vector field xi^a.
struct VectorFieldSpec {
  std::vector<SmoothMap> components;
  VectorKind kind = VectorKind::arbitrary;
  std::string label;

  int dim() const { return static_cast<int>(components.size()); }

  template <class S>
  Tensor<S> at(std::span<const S> x) const {
    Tensor<S> v(dim(), Valence{1, 0});
    for (int a = 0; a < dim(); ++a) {
      const auto& f = components[static_cast<std::size_t>(a)];
      const auto cv = f.constant_value();
      v(a) = cv ? S(*cv) : f(x);
    }
    return v;
  }
};

/// Closed-form tensor field: one SmoothMap per component in flat order.
struct TensorFieldSpec {
  int dim = 0;
  Valence valence;
  std::vector<SmoothMap> components;

  template <class S>
  Tensor<S> at(std::span<const S> x) const {
    Tensor<S> t(dim, valence);
    for (std::size_t i = 0; i < components.size(); ++i) t.flat(i) = components[i](x);
    return t;
  }
};

// ---------------------------------------------------------------------------
// Pointwise jets of generic field functions.

/// Value and first partials of a field; `partial` appends the derivative
/// index as the last slot.
template <class S>
struct Jet {
  Tensor<S> value;
  Tensor<S> partial;
};

template <class S>
Tensor<S> append_lower(const Tensor<S>& t) {
  return Tensor<S>(t.dim(), Valence{t.valence().upper, t.valence().lower + 1});
}

/// Exact jet of `f` (a callable taking std::span<const Dual<S>>) at x.
template <class S, class F>
Jet<S> exact_jet(const F& f, std::span<const S> x) {
  const int n = static_cast<int>(x.size());
  Jet<S> out;
  for (int c = 0; c < n; ++c) {
    auto xs = seeded<S>(x, c);
    auto t = f(std::span<const Dual<S>>(xs));
    if (c == 0) {
      out.value = value_part(t);
      out.partial = append_lower(out.value);
    }
    const std::size_t m = t.size();
    for (std::size_t i = 0; i < m; ++i) {
      out.partial.flat(i * static_cast<std::size_t>(n) + static_cast<std::size_t>(c)) = t.flat(i).d;
    }
  }
  return out;
}

/// Jet at a double point with the outer derivative taken per `mode`:
/// exact dual seeding, or central differences with step mode.h. `f` must be
/// generic (callable with spans of double and of D1). If `chart` is given,
/// every stencil point is checked against its domain.
template <class F>
Jet<double> outer_jet(const F& f, std::span<const double> x, const DerivativeMode& mode,
                      const Chart* chart = nullptr) {
  if (!mode.is_fd()) return exact_jet<double>(f, x);
  FdScheme{mode.h, 2}.validate();
  const int n = static_cast<int>(x.size());
  Jet<double> out;
  out.value = f(x);
  out.partial = append_lower(out.value);
  std::vector<double> xp(x.begin(), x.end());
  for (int c = 0; c < n; ++c) {
    const double x0 = xp[static_cast<std::size_t>(c)];
    xp[static_cast<std::size_t>(c)] = x0 + mode.h;
    if (chart) chart->require_inside(xp);
    auto fp = f(std::span<const double>(xp));
    xp[static_cast<std::size_t>(c)] = x0 - mode.h;
    if (chart) chart->require_inside(xp);
    auto fm = f(std::span<const double>(xp));
    xp[static_cast<std::size_t>(c)] = x0;
    for (std::size_t i = 0; i < fp.size(); ++i) {
      out.partial.flat(i * static_cast<std::size_t>(n) + static_cast<std::size_t>(c)) =
          (fp.flat(i) - fm.flat(i)) / (2.0 * mode.h);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Levi-Civita connection.

/// Metric, inverse metric, metric partials and connection at a point.
template <class S>
struct MetricLocal {
  Tensor<S> g;      // g_ab
  Tensor<S> ginv;   // g^ab
  Tensor<S> dg;     // dg(a,b,c) = d_c g_ab
  Tensor<S> gamma;  // Gamma^a_bc
};

/// Gamma^a_bc = 1/2 g^ad (d_b g_dc + d_c g_db - d_d g_bc).
template <class S>
Tensor<S> connection_from(const Tensor<S>& ginv, const Tensor<S>& dg) {
  const int n = ginv.dim();
  Tensor<S> gamma(n, Valence{1, 2});
  Tensor<S> lowered(n, Valence{0, 3});  // Gamma_dbc
  for (int d = 0; d < n; ++d)
    for (int b = 0; b < n; ++b)
      for (int c = b; c < n; ++c) {
        S v = 0.5 * (dg(d, c, b) + dg(d, b, c) - dg(b, c, d));
        lowered(d, b, c) = v;
        lowered(d, c, b) = v;
      }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = b; c < n; ++c) {
        S s(0.0);
        for (int d = 0; d < n; ++d) s += ginv(a, d) * lowered(d, b, c);
        gamma(a, b, c) = s;
        gamma(a, c, b) = s;
      }
  return gamma;
}

template <class S>
MetricLocal<S> metric_local(const MetricField& metric, std::span<const S> x) {
  auto jet = exact_jet<S>([&](auto xs) { return metric.at(xs); }, x);
  MetricLocal<S> m;
  m.g = std::move(jet.value);
  m.dg = std::move(jet.partial);
  m.ginv = inverse(m.g);
  m.gamma = connection_from(m.ginv, m.dg);
  return m;
}

/// Riemann tensor R^a_bcd at a point, with
///   R^a_bcd = d_c Gamma^a_db - d_d Gamma^a_cb + Gamma^a_ce Gamma^e_db - Gamma^a_de Gamma^e_cb
/// so that (nabla_c nabla_d - nabla_d nabla_c) V^a = R^a_bcd V^b.
struct RiemannValue {
  Tensor<double> components;  // (a, b, c, d)

  static constexpr std::string_view convention =
      "R^a_bcd = d_c Gamma^a_db - d_d Gamma^a_cb + Gamma^a_ce Gamma^e_db - Gamma^a_de Gamma^e_cb; "
      "[nabla_c, nabla_d] V^a = R^a_bcd V^b";

  double operator()(int a, int b, int c, int d) const { return components(a, b, c, d); }
};

/// A residual paired with the magnitude of the largest term entering it.
struct Residual {
  double value = 0.0;
  double scale = 0.0;
};

/// Divergence on the first slot of a (2,0) tensor.
struct Divergence {
  Tensor<double> value;  // (1,0)
  double scale = 0.0;    // largest individual term
};

/// nabla_a T^ab from a jet of T^ab and the connection.
inline Divergence divergence_20(const Jet<double>& t, const Tensor<double>& gamma) {
  const int n = t.value.dim();
  Divergence out{Tensor<double>(n, Valence{1, 0}), 0.0};
  for (int b = 0; b < n; ++b) {
    double s = 0.0;
    for (int a = 0; a < n; ++a) {
      const double term = t.partial(a, b, a);
      s += term;
      out.scale = std::max(out.scale, std::abs(term));
    }
    double c1 = 0.0;
    double c2 = 0.0;
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c) {
        c1 += gamma(a, a, c) * t.value(c, b);
        c2 += gamma(b, a, c) * t.value(a, c);
      }
    out.scale = std::max({out.scale, std::abs(c1), std::abs(c2)});
    out.value(b) = s + c1 + c2;
  }
  return out;
}

/// nabla_a j^a from a jet of j^a and the connection.
inline Residual divergence_10(const Jet<double>& j, const Tensor<double>& gamma) {
  const int n = j.value.dim();
  Residual out;
  double s = 0.0;
  for (int a = 0; a < n; ++a) {
    s += j.partial(a, a);
    out.scale = std::max(out.scale, std::abs(j.partial(a, a)));
  }
  double c = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) c += gamma(a, a, b) * j.value(b);
  out.scale = std::max(out.scale, std::abs(c));
  out.value = s + c;
  return out;
}

/// Connection at x (exact).
Tensor<double> christoffel(const MetricField& metric, std::span<const double> x);

RiemannValue riemann(const MetricField& metric, std::span<const double> x);

/// R_bd = R^a_bad.
Tensor<double> ricci(const RiemannValue& r);

double ricci_scalar(const RiemannValue& r, const Tensor<double>& ginv);

/// Covariant derivative from a value, its partials (derivative slot last)
/// and the connection. Upper slots come first in `value`.
template <class S>
Tensor<S> covariant_from(const Tensor<S>& value, const Tensor<S>& partial, const Tensor<S>& gamma) {
  const int n = value.dim();
  const int r = value.valence().upper;
  const int rank = value.rank();
  Tensor<S> out = partial;
  std::vector<int> idx(static_cast<std::size_t>(rank + 1));
  std::vector<int> sub(static_cast<std::size_t>(rank));
  for (std::size_t f = 0; f < out.size(); ++f) {
    unflatten(f, n, idx);
    const int c = idx[static_cast<std::size_t>(rank)];
    S acc = out.flat(f);
    for (int k = 0; k < rank; ++k) {
      std::copy(idx.begin(), idx.begin() + rank, sub.begin());
      const int orig = idx[static_cast<std::size_t>(k)];
      for (int e = 0; e < n; ++e) {
        sub[static_cast<std::size_t>(k)] = e;
        if (k < r) {
          acc += gamma(orig, c, e) * value.at(sub);
        } else {
          acc -= gamma(e, c, orig) * value.at(sub);
        }
      }
    }
    out.flat(f) = acc;
  }
  return out;
}

/// nabla_c T for a closed-form field; result slot order (T indices..., c).
TensorValue covariant_derivative(const TensorFieldSpec& field, const MetricField& metric,
                                 std::span<const double> x,
                                 const DerivativeMode& mode = DerivativeMode::dual());

/// Max over (a, b, c) of |(nabla_a nabla_c - nabla_c nabla_a) A^b - R^b_dac A^d|
/// for the vector A^b = g^bd A_d raised from the one-form `one_form`.
Residual commutator_check(const MetricField& metric, const std::vector<SmoothMap>& one_form,
                          std::span<const double> x,
                          const DerivativeMode& mode = DerivativeMode::dual());

/// Lie derivative of a (0,2) tensor along xi using plain partials:
///   xi^c d_c F_ab + F_cb d_a xi^c + F_ac d_b xi^c.
template <class S>
Tensor<S> lie_02_partial(const Jet<S>& field, const Jet<S>& xi) {
  const int n = field.value.dim();
  Tensor<S> out(n, Valence{0, 2});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      S s(0.0);
      for (int c = 0; c < n; ++c) {
        s += xi.value(c) * field.partial(a, b, c);
        s += field.value(c, b) * xi.partial(c, a);
        s += field.value(a, c) * xi.partial(c, b);
      }
      out(a, b) = s;
    }
  return out;
}

/// Same with covariant derivatives; equal to the partial form for a
/// torsion-free connection.
template <class S>
Tensor<S> lie_02_covariant(const Jet<S>& field, const Jet<S>& xi, const Tensor<S>& gamma) {
  const int n = field.value.dim();
  auto dfield = covariant_from(field.value, field.partial, gamma);
  auto dxi = covariant_from(xi.value, xi.partial, gamma);  // dxi(c, a) = nabla_a xi^c
  Tensor<S> out(n, Valence{0, 2});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      S s(0.0);
      for (int c = 0; c < n; ++c) {
        s += xi.value(c) * dfield(a, b, c);
        s += field.value(c, b) * dxi(c, a);
        s += field.value(a, c) * dxi(c, b);
      }
      out(a, b) = s;
    }
  return out;
}

enum class LieForm { partial, covariant };

TensorValue lie_derivative_02(const TensorFieldSpec& field, const VectorFieldSpec& xi,
                              const MetricField& metric, std::span<const double> x,
                              LieForm form = LieForm::covariant,
                              const DerivativeMode& mode = DerivativeMode::dual());

/// nabla_a xi_b + nabla_b xi_a (equal to the Lie derivative of g along xi).
TensorValue killing_residual(const MetricField& metric, const VectorFieldSpec& xi,
                             std::span<const double> x,
                             const DerivativeMode& mode = DerivativeMode::dual());

/// nabla_a xi^b at x, slot order (b, a).
TensorValue vector_gradient(const MetricField& metric, const VectorFieldSpec& xi,
                            std::span<const double> x);

}  // namespace emt
