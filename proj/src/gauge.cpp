#include "emt/gauge.hpp"

#include <algorithm>
#include <cmath>

namespace emt {

GaugePotential::GaugePotential(std::vector<SmoothMap> components)
    : components_(std::move(components)) {
  if (components_.size() < 2) throw ConfigError("gauge potential needs at least 2 components");
}

GaugePotential GaugePotential::shifted(const GaugeFunction& g) const {
  GaugePotential out = *this;
  out.shifts_.push_back(g);
  return out;
}

GaugePotential gauge_shift(const GaugePotential& a, const GaugeFunction& g) { return a.shifted(g); }

TensorValue field_strength(const GaugePotential& a, std::span<const double> x) {
  return field_strength_at<double>(a, x);
}

namespace {

Residual cyclic_max(const Tensor<double>& d) {
  // d(b, c, a) = D_a F_bc
  const int n = d.dim();
  Residual r;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c) {
        const double t1 = d(b, c, a);
        const double t2 = d(c, a, b);
        const double t3 = d(a, b, c);
        r.value = std::max(r.value, std::abs(t1 + t2 + t3));
        r.scale = std::max({r.scale, std::abs(t1), std::abs(t2), std::abs(t3)});
      }
  return r;
}

}  // namespace

Residual bianchi_residual(const GaugePotential& a, const MetricField& metric,
                          std::span<const double> x, const DerivativeMode& mode) {
  const auto jet = outer_jet([&](auto xs) { return field_strength_at(a, xs); }, x, mode);
  const auto gamma = christoffel(metric, x);
  return cyclic_max(covariant_from(jet.value, jet.partial, gamma));
}

Residual bianchi_partial_residual(const GaugePotential& a, std::span<const double> x) {
  const auto jet = exact_jet<double>([&](auto xs) { return field_strength_at(a, xs); }, x);
  return cyclic_max(jet.partial);
}

Divergence field_equation_residual(const LagrangianModel& model, const GaugePotential& a,
                                   const MetricField& metric, std::span<const double> x,
                                   const DerivativeMode& mode, const Chart* chart) {
  auto p = [&](auto xs) {
    const auto f = field_strength_at(a, xs);
    const auto g = metric.at(xs);
    return dL_dF(model, f, g);
  };
  const auto jet = outer_jet(p, x, mode, chart);
  return divergence_20(jet, christoffel(metric, x));
}

}  // namespace emt
