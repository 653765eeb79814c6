#pragma once

// Energy-momentum tensors built from a matter Lagrangian, their divergences
// and the Noether currents j^a = T^ab xi_b.
//
//   canonical    T^ab = -2 (dL/dF_ac) F^b_c + g^ab L
//   metric       T^ab =  2 dL/dg_ab         + g^ab L
//   traditional  T^ab = -2 (dL/dF_ac) nabla^b A_c + g^ab L
//
// For a scalar field phi with L(d_a phi, g):
//   canonical    T^ab = -(dL/d(d_a phi)) d^b phi + g^ab L
//   metric       T^ab =  2 dL/dg_ab + g^ab L

#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "emt/gauge.hpp"
#include "emt/geometry.hpp"
#include "emt/lagrangian.hpp"

namespace emt {

enum class StressVariant { canonical, metric, traditional };

std::string_view to_string(StressVariant v);

inline constexpr std::string_view kTraditionalDerivativeConvention =
    "dL/d(nabla_a A_c) = 2 dL/dF_ac; nabla^b A_c is the full covariant derivative raised with "
    "the local metric";

struct GaugeMatter {
  LagrangianModel model;
  GaugePotential potential;
};

struct ScalarMatter {
  ScalarFieldModel model;
  SmoothMap phi;
};

using Matter = std::variant<GaugeMatter, ScalarMatter>;

bool is_scalar(const Matter& m);
std::string matter_model_kind(const Matter& m);

/// d_a phi at any scalar type.
template <class S>
Tensor<S> scalar_gradient(const SmoothMap& phi, std::span<const S> x) {
  const int n = static_cast<int>(x.size());
  Tensor<S> d(n, Valence{0, 1});
  if (phi.is_constant()) return d;
  for (int b = 0; b < n; ++b) {
    auto xs = seeded<S>(x, b);
    d(b) = phi(std::span<const Dual<S>>(xs)).d;
  }
  return d;
}

namespace detail {

/// -2 P^ac G^b_c + g^ab L with G^b_c passed as grad_up(b, c).
template <class S>
Tensor<S> contract_pg(const Tensor<S>& p, const Tensor<S>& grad_up, const Tensor<S>& ginv,
                      const S& lag) {
  const int n = p.dim();
  Tensor<S> t(n, Valence{2, 0});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      S s(0.0);
      for (int c = 0; c < n; ++c) s += p(a, c) * grad_up(b, c);
      t(a, b) = -2.0 * s + ginv(a, b) * lag;
    }
  return t;
}

/// X^b_c = g^bd X_dc.
template <class S>
Tensor<S> raise_first(const Tensor<S>& x, const Tensor<S>& ginv) {
  const int n = x.dim();
  Tensor<S> out(n, Valence{1, 1});
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < n; ++c) {
      S s(0.0);
      for (int d = 0; d < n; ++d) s += ginv(b, d) * x(d, c);
      out(b, c) = s;
    }
  return out;
}

template <class S>
Tensor<S> metric_formula(const Tensor<S>& dldg, const Tensor<S>& ginv, const S& lag) {
  const int n = dldg.dim();
  Tensor<S> t(n, Valence{2, 0});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) t(a, b) = 2.0 * dldg(a, b) + ginv(a, b) * lag;
  return t;
}

template <class S>
Tensor<S> gauge_stress_at(StressVariant v, const GaugeMatter& m, const MetricField& metric,
                          std::span<const S> x) {
  const auto g = metric.at(x);
  const auto ginv = inverse(g);
  if (v == StressVariant::traditional) {
    const auto jet = exact_jet<S>([&](auto xs) { return m.potential.at(xs); }, x);
    const auto loc = metric_local<S>(metric, x);
    const auto da = covariant_from(jet.value, jet.partial, loc.gamma);  // da(c, d) = nabla_d A_c
    const int n = metric.dim();
    Tensor<S> f(n, Valence{0, 2});
    Tensor<S> grad(n, Valence{0, 2});  // grad(d, c) = nabla_d A_c
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        f(p, q) = jet.partial(q, p) - jet.partial(p, q);
        grad(p, q) = da(q, p);
      }
    const auto p = dL_dF(m.model, f, g);
    const S lag = m.model.evaluate(f, g, ginv);
    return contract_pg(p, raise_first(grad, ginv), ginv, lag);
  }
  const auto f = field_strength_at(m.potential, x);
  const S lag = m.model.evaluate(f, g, ginv);
  if (v == StressVariant::metric) return metric_formula(dL_dg(m.model, f, g), ginv, lag);
  const auto p = dL_dF(m.model, f, g);
  return contract_pg(p, raise_first(f, ginv), ginv, lag);
}

template <class S>
Tensor<S> scalar_stress_at(StressVariant v, const ScalarMatter& m, const MetricField& metric,
                           std::span<const S> x) {
  const auto g = metric.at(x);
  const auto ginv = inverse(g);
  const auto dphi = scalar_gradient(m.phi, x);
  const S lag = m.model.evaluate(dphi, g, ginv);
  if (v == StressVariant::metric) return metric_formula(scalar_dL_dg(m.model, dphi, g), ginv, lag);
  // canonical and traditional coincide for a scalar: nabla_a phi = d_a phi.
  const auto p = scalar_dL(m.model, dphi, g);
  const int n = metric.dim();
  Tensor<S> t(n, Valence{2, 0});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      S up(0.0);
      for (int d = 0; d < n; ++d) up += ginv(b, d) * dphi(d);
      t(a, b) = -(p(a) * up) + ginv(a, b) * lag;
    }
  return t;
}

}  // namespace detail

/// T^ab of the given variant at any scalar type.
template <class S>
Tensor<S> stress_at(StressVariant v, const Matter& matter, const MetricField& metric,
                    std::span<const S> x) {
  if (const auto* gm = std::get_if<GaugeMatter>(&matter))
    return detail::gauge_stress_at(v, *gm, metric, x);
  return detail::scalar_stress_at(v, std::get<ScalarMatter>(matter), metric, x);
}

struct StressResult {
  TensorValue tensor;
  StressVariant variant = StressVariant::canonical;
  Point point;
};

StressResult stress_tensor(StressVariant v, const Matter& matter, const MetricField& metric,
                           std::span<const double> x);

StressResult canonical_tensor(const LagrangianModel& model, const GaugePotential& a,
                              const MetricField& metric, std::span<const double> x);
StressResult metric_tensor(const LagrangianModel& model, const GaugePotential& a,
                           const MetricField& metric, std::span<const double> x);
StressResult traditional_tensor(const LagrangianModel& model, const GaugePotential& a,
                                const MetricField& metric, std::span<const double> x);
StressResult scalar_canonical_tensor(const ScalarFieldModel& model, const SmoothMap& phi,
                                     const MetricField& metric, std::span<const double> x);
StressResult scalar_metric_tensor(const ScalarFieldModel& model, const SmoothMap& phi,
                                  const MetricField& metric, std::span<const double> x);

/// Matter Lagrangian L at x.
double lagrangian_at(const Matter& matter, const MetricField& metric, std::span<const double> x);

/// nabla_a T^ab.
Divergence stress_divergence(StressVariant v, const Matter& matter, const MetricField& metric,
                             std::span<const double> x,
                             const DerivativeMode& mode = DerivativeMode::dual(),
                             const Chart* chart = nullptr);

/// d_a(sqrt|g| T^ab) / sqrt|g| + T^ac Gamma^b_ca, the density form of the
/// same divergence.
Divergence stress_divergence_density(StressVariant v, const Matter& matter,
                                     const MetricField& metric, std::span<const double> x,
                                     const DerivativeMode& mode = DerivativeMode::dual(),
                                     const Chart* chart = nullptr);

/// The two sides of nabla_a T_trad^ab + (dL/dF_ac) R^b_dac A^d = 0.
struct CurvatureBalance {
  TensorValue divergence;  // nabla_a T_trad^ab
  TensorValue curvature;   // (dL/dF_ac) R^b_dac A^d
  double scale = 0.0;      // largest term in either side
};

CurvatureBalance traditional_balance(const GaugeMatter& matter, const MetricField& metric,
                                     std::span<const double> x,
                                     const DerivativeMode& mode = DerivativeMode::dual(),
                                     const Chart* chart = nullptr);

/// Field equation residual: nabla_a (dL/dF_ab) for gauge matter (n
/// components) or nabla_a (dL/d(d_a phi)) for a scalar (one component).
Divergence matter_field_equation(const Matter& matter, const MetricField& metric,
                                 std::span<const double> x,
                                 const DerivativeMode& mode = DerivativeMode::dual(),
                                 const Chart* chart = nullptr);

struct NoetherCurrent {
  TensorValue j;  // (1,0)
  std::string generator;
};

/// j^a = T^ab g_bc xi^c at the point the stress tensor was evaluated.
NoetherCurrent noether_current(const StressResult& t, const VectorFieldSpec& xi,
                               const MetricField& metric);

/// nabla_a (T^ab xi_b).
Residual current_divergence(StressVariant v, const Matter& matter, const MetricField& metric,
                            const VectorFieldSpec& xi, std::span<const double> x,
                            const DerivativeMode& mode = DerivativeMode::dual(),
                            const Chart* chart = nullptr);

}  // namespace emt
