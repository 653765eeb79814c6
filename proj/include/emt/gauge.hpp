#pragma once

// Gauge potential A_a, field strength F_ab = d_a A_b - d_b A_a and the
// pointwise checks that only involve F.

#include <span>
#include <vector>

#include "emt/geometry.hpp"
#include "emt/lagrangian.hpp"

namespace emt {

/// A scalar gauge function chi; A -> A + d chi.
struct GaugeFunction {
  SmoothMap chi;
  std::string label;
};

/// Covector potential A_a given by closed-form components plus the
/// gradients of any gauge functions applied to it.
class GaugePotential {
 public:
  GaugePotential() = default;
  explicit GaugePotential(std::vector<SmoothMap> components);

  int dim() const { return static_cast<int>(components_.size()); }
  const std::vector<SmoothMap>& components() const { return components_; }
  const std::vector<GaugeFunction>& shifts() const { return shifts_; }

  /// A + d chi.
  GaugePotential shifted(const GaugeFunction& g) const;

  template <class S>
  Tensor<S> at(std::span<const S> x) const {
    const int n = dim();
    Tensor<S> a(n, Valence{0, 1});
    for (int b = 0; b < n; ++b) {
      const auto& f = components_[static_cast<std::size_t>(b)];
      const auto cv = f.constant_value();
      a(b) = cv ? S(*cv) : f(x);
    }
    for (const auto& g : shifts_) {
      if (g.chi.is_constant()) continue;
      for (int b = 0; b < n; ++b) {
        auto xs = seeded<S>(x, b);
        a(b) += g.chi(std::span<const Dual<S>>(xs)).d;
      }
    }
    return a;
  }

 private:
  std::vector<SmoothMap> components_;
  std::vector<GaugeFunction> shifts_;
};

GaugePotential gauge_shift(const GaugePotential& a, const GaugeFunction& g);

/// F_ab = d_a A_b - d_b A_a, exact at any scalar type.
template <class S>
Tensor<S> field_strength_at(const GaugePotential& a, std::span<const S> x) {
  const auto jet = exact_jet<S>([&](auto xs) { return a.at(xs); }, x);  // partial(b, a) = d_a A_b
  const int n = a.dim();
  Tensor<S> f(n, Valence{0, 2});
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) {
      const S v = jet.partial(q, p) - jet.partial(p, q);
      f(p, q) = v;
      f(q, p) = -v;
    }
  return f;
}

/// Field strength at a point; antisymmetric by construction.
TensorValue field_strength(const GaugePotential& a, std::span<const double> x);

/// Max over a < b < c of |nabla_a F_bc + nabla_b F_ca + nabla_c F_ab|.
Residual bianchi_residual(const GaugePotential& a, const MetricField& metric,
                          std::span<const double> x,
                          const DerivativeMode& mode = DerivativeMode::dual());

/// Same cyclic sum with plain partials (no connection terms).
Residual bianchi_partial_residual(const GaugePotential& a, std::span<const double> x);

/// nabla_a (dL/dF_ab) at x; zero on-shell.
Divergence field_equation_residual(const LagrangianModel& model, const GaugePotential& a,
                                   const MetricField& metric, std::span<const double> x,
                                   const DerivativeMode& mode = DerivativeMode::dual(),
                                   const Chart* chart = nullptr);

}  // namespace emt
