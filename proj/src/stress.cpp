#include "emt/stress.hpp"

#include <algorithm>
#include <cmath>

namespace emt {

std::string_view to_string(StressVariant v) {
  switch (v) {
    case StressVariant::canonical: return "canonical";
    case StressVariant::metric: return "metric";
    case StressVariant::traditional: return "traditional";
  }
  return "unknown";
}

bool is_scalar(const Matter& m) { return std::holds_alternative<ScalarMatter>(m); }

std::string matter_model_kind(const Matter& m) {
  if (const auto* gm = std::get_if<GaugeMatter>(&m)) return gm->model.kind();
  return std::get<ScalarMatter>(m).model.kind();
}

StressResult stress_tensor(StressVariant v, const Matter& matter, const MetricField& metric,
                           std::span<const double> x) {
  if (v == StressVariant::traditional && is_scalar(matter)) {
    throw ConfigError("the traditional tensor is defined for gauge matter only");
  }
  return StressResult{stress_at(v, matter, metric, x), v, Point(x.begin(), x.end())};
}

StressResult canonical_tensor(const LagrangianModel& model, const GaugePotential& a,
                              const MetricField& metric, std::span<const double> x) {
  return stress_tensor(StressVariant::canonical, GaugeMatter{model, a}, metric, x);
}

StressResult metric_tensor(const LagrangianModel& model, const GaugePotential& a,
                           const MetricField& metric, std::span<const double> x) {
  return stress_tensor(StressVariant::metric, GaugeMatter{model, a}, metric, x);
}

StressResult traditional_tensor(const LagrangianModel& model, const GaugePotential& a,
                                const MetricField& metric, std::span<const double> x) {
  return stress_tensor(StressVariant::traditional, GaugeMatter{model, a}, metric, x);
}

StressResult scalar_canonical_tensor(const ScalarFieldModel& model, const SmoothMap& phi,
                                     const MetricField& metric, std::span<const double> x) {
  return stress_tensor(StressVariant::canonical, ScalarMatter{model, phi}, metric, x);
}

StressResult scalar_metric_tensor(const ScalarFieldModel& model, const SmoothMap& phi,
                                  const MetricField& metric, std::span<const double> x) {
  return stress_tensor(StressVariant::metric, ScalarMatter{model, phi}, metric, x);
}

namespace {

template <class S>
S lagrangian_generic(const Matter& matter, const MetricField& metric, std::span<const S> x) {
  const auto g = metric.at(x);
  if (const auto* gm = std::get_if<GaugeMatter>(&matter)) {
    return gm->model.evaluate(field_strength_at(gm->potential, x), g);
  }
  const auto& sm = std::get<ScalarMatter>(matter);
  return sm.model.evaluate(scalar_gradient(sm.phi, x), g);
}

void require_variant(StressVariant v, const Matter& matter) {
  if (v == StressVariant::traditional && is_scalar(matter)) {
    throw ConfigError("the traditional tensor is defined for gauge matter only");
  }
}

}  // namespace

double lagrangian_at(const Matter& matter, const MetricField& metric, std::span<const double> x) {
  return lagrangian_generic(matter, metric, x);
}

Divergence stress_divergence(StressVariant v, const Matter& matter, const MetricField& metric,
                             std::span<const double> x, const DerivativeMode& mode,
                             const Chart* chart) {
  require_variant(v, matter);
  const auto jet =
      outer_jet([&](auto xs) { return stress_at(v, matter, metric, xs); }, x, mode, chart);
  return divergence_20(jet, christoffel(metric, x));
}

Divergence stress_divergence_density(StressVariant v, const Matter& matter,
                                     const MetricField& metric, std::span<const double> x,
                                     const DerivativeMode& mode, const Chart* chart) {
  require_variant(v, matter);
  auto density = [&](auto xs) {
    auto t = stress_at(v, matter, metric, xs);
    const auto vol = sqrt(abs(determinant(metric.at(xs))));
    for (std::size_t i = 0; i < t.size(); ++i) t.flat(i) = t.flat(i) * vol;
    return t;
  };
  const auto jet = outer_jet(density, x, mode, chart);
  const auto gamma = christoffel(metric, x);
  const auto t = stress_at(v, matter, metric, x);
  const double vol = std::sqrt(std::abs(determinant(metric.at(x))));
  const int n = metric.dim();
  Divergence out{Tensor<double>(n, Valence{1, 0}), 0.0};
  for (int b = 0; b < n; ++b) {
    double s = 0.0;
    for (int a = 0; a < n; ++a) {
      const double term = jet.partial(a, b, a) / vol;
      s += term;
      out.scale = std::max(out.scale, std::abs(term));
    }
    double c = 0.0;
    for (int a = 0; a < n; ++a)
      for (int e = 0; e < n; ++e) c += t(a, e) * gamma(b, e, a);
    out.scale = std::max(out.scale, std::abs(c));
    out.value(b) = s + c;
  }
  return out;
}

CurvatureBalance traditional_balance(const GaugeMatter& matter, const MetricField& metric,
                                     std::span<const double> x, const DerivativeMode& mode,
                                     const Chart* chart) {
  const Matter m = matter;
  const auto div = stress_divergence(StressVariant::traditional, m, metric, x, mode, chart);
  const auto g = metric.at(x);
  const auto ginv = inverse(g);
  const auto f = field_strength(matter.potential, x);
  const auto p = dL_dF(matter.model, f, g);
  const auto a_low = matter.potential.at(x);
  const auto rie = riemann(metric, x);
  const int n = metric.dim();
  std::vector<double> a_up(static_cast<std::size_t>(n), 0.0);
  for (int d = 0; d < n; ++d)
    for (int e = 0; e < n; ++e) a_up[static_cast<std::size_t>(d)] += ginv(d, e) * a_low(e);
  CurvatureBalance out{div.value, Tensor<double>(n, Valence{1, 0}), div.scale};
  for (int b = 0; b < n; ++b) {
    double s = 0.0;
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) s += p(a, c) * rie(b, d, a, c) * a_up[static_cast<std::size_t>(d)];
    out.curvature(b) = s;
    out.scale = std::max(out.scale, std::abs(s));
  }
  return out;
}

Divergence matter_field_equation(const Matter& matter, const MetricField& metric,
                                 std::span<const double> x, const DerivativeMode& mode,
                                 const Chart* chart) {
  if (const auto* gm = std::get_if<GaugeMatter>(&matter)) {
    return field_equation_residual(gm->model, gm->potential, metric, x, mode, chart);
  }
  const auto& sm = std::get<ScalarMatter>(matter);
  auto p = [&](auto xs) {
    return scalar_dL(sm.model, scalar_gradient(sm.phi, xs), metric.at(xs));
  };
  const auto jet = outer_jet(p, x, mode, chart);
  const auto r = divergence_10(jet, christoffel(metric, x));
  Divergence out{Tensor<double>(metric.dim(), Valence{0, 0}), r.scale};
  out.value.flat(0) = r.value;
  return out;
}

NoetherCurrent noether_current(const StressResult& t, const VectorFieldSpec& xi,
                               const MetricField& metric) {
  const std::span<const double> x(t.point);
  const auto g = metric.at(x);
  const auto v = xi.at(x);
  const int n = metric.dim();
  NoetherCurrent out{Tensor<double>(n, Valence{1, 0}), xi.label};
  for (int a = 0; a < n; ++a) {
    double s = 0.0;
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) s += t.tensor(a, b) * g(b, c) * v(c);
    out.j(a) = s;
  }
  return out;
}

Residual current_divergence(StressVariant v, const Matter& matter, const MetricField& metric,
                            const VectorFieldSpec& xi, std::span<const double> x,
                            const DerivativeMode& mode, const Chart* chart) {
  require_variant(v, matter);
  auto current = [&](auto xs) {
    const auto t = stress_at(v, matter, metric, xs);
    const auto g = metric.at(xs);
    const auto w = xi.at(xs);
    using S = std::decay_t<decltype(g.flat(0))>;
    const int n = metric.dim();
    Tensor<S> j(n, Valence{1, 0});
    for (int a = 0; a < n; ++a) {
      S s(0.0);
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) s += t(a, b) * g(b, c) * w(c);
      j(a) = s;
    }
    return j;
  };
  const auto jet = outer_jet(current, x, mode, chart);
  return divergence_10(jet, christoffel(metric, x));
}

}  // namespace emt
