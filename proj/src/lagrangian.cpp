#include "emt/lagrangian.hpp"

namespace emt {

LagrangianModel LagrangianModel::maxwell() { return LagrangianModel("maxwell", Maxwell{}); }

LagrangianModel LagrangianModel::born_infeld(double beta) {
  if (!(beta > 0.0)) throw ConfigError("born-infeld beta must be positive");
  return LagrangianModel("born-infeld", BornInfeld{beta});
}

LagrangianModel LagrangianModel::quartic(double lambda) {
  return LagrangianModel("quartic", InvariantSeries{{-0.25, lambda}});
}

LagrangianModel LagrangianModel::power_series(std::vector<double> coeffs) {
  if (coeffs.empty()) throw ConfigError("power-series model needs at least one coefficient");
  return LagrangianModel("power-series", InvariantSeries{std::move(coeffs)});
}

std::map<std::string, double> LagrangianModel::params() const {
  std::map<std::string, double> p;
  if (const auto* bi = std::get_if<BornInfeld>(&impl_)) p["beta"] = bi->beta;
  if (const auto* s = std::get_if<InvariantSeries>(&impl_)) {
    if (kind_ == "quartic") {
      p["lambda"] = s->coeffs.at(1);
    } else {
      for (std::size_t k = 0; k < s->coeffs.size(); ++k) p["c" + std::to_string(k + 1)] = s->coeffs[k];
    }
  }
  return p;
}

Tensor<double> maxwell_dL_dF_analytic(const Tensor<double>& f, const Tensor<double>& g) {
  auto up = raise_both(f, inverse(g));
  for (auto& v : up.data()) v *= -0.5;
  return up;
}

Tensor<double> maxwell_dL_dg_analytic(const Tensor<double>& f, const Tensor<double>& g) {
  const int n = f.dim();
  auto ginv = inverse(g);
  auto up = raise_both(f, ginv);
  Tensor<double> mixed(n, Valence{1, 1});  // F^b_c = g^bd F_dc
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < n; ++c) {
      double s = 0.0;
      for (int d = 0; d < n; ++d) s += ginv(b, d) * f(d, c);
      mixed(b, c) = s;
    }
  Tensor<double> out(n, Valence{2, 0});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double s = 0.0;
      for (int c = 0; c < n; ++c) s += up(a, c) * mixed(b, c);
      out(a, b) = 0.5 * s;
    }
  return out;
}

ScalarFieldModel ScalarFieldModel::massless() { return ScalarFieldModel("scalar-massless", {1.0}); }

ScalarFieldModel ScalarFieldModel::kinetic(double lambda) {
  return ScalarFieldModel("scalar-kinetic", {1.0, lambda});
}

std::map<std::string, double> ScalarFieldModel::params() const {
  std::map<std::string, double> p;
  if (kind_ == "scalar-kinetic") p["lambda"] = coeffs_.at(1);
  return p;
}

}  // namespace emt
