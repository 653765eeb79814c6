#include "emt/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

namespace emt {

namespace {

const std::vector<CheckInfo> kChecks = {
    {"bianchi", 1e-10, true, false, "cyclic sum of nabla F vanishes"},
    {"bianchi-random", 1e-10, true, false, "Bianchi identity for 50 seeded random potentials"},
    {"coincidence", 1e-12, false, false, "canonical and metric tensors agree"},
    {"commutator", 1e-10, true, false, "[nabla_a, nabla_c] A^b = R^b_dac A^d"},
    {"divergence-canonical", 1e-9, true, false, "nabla_a T_c^ab = 0 on-shell"},
    {"divergence-footnote", 1e-10, true, false, "density form of nabla_a T_c^ab agrees with the direct form"},
    {"divergence-metric", 1e-9, true, false, "nabla_a T_m^ab = 0 on-shell"},
    {"divergence-traditional", 1e-8, true, false,
     "nabla_a T_trad^ab + (dL/dF_ac) R^b_dac A^d = 0 on-shell"},
    {"field-equation", 1e-8, true, false, "declared on-shell fields satisfy the field equations"},
    {"gauge-invariance", 1e-12, false, false, "F, T_c and T_m unchanged under A -> A + d chi"},
    {"killing", 1e-10, true, false, "declared Killing fields satisfy nabla_(a xi_b) = 0"},
    {"master-identity", 1e-8, true, false,
     "nabla_a (T_c^ab xi_b) = 1/2 T_m^ab (Lie_xi g)_ab for arbitrary xi"},
    {"metric-compatibility", 1e-12, true, false, "nabla_c g_ab = 0"},
    {"noether-canonical", 1e-9, true, false, "nabla_a (T_c^ab xi_b) = 0 for Killing xi"},
    {"noether-traditional", 1e-9, true, false,
     "nabla_a (T_trad^ab xi_b) = 0 for covariantly constant Killing xi"},
    {"off-shell-identity", 1e-10, false, false,
     "(dL/dF_ac) F^b_c + dL/dg_ab = 0 at random (F, g)"},
    {"off-shell-identity-edge", 1e-8, false, false,
     "off-shell identity near the Born-Infeld domain edge"},
    {"riemann-symmetries", 1e-10, false, false, "index symmetries and first Bianchi identity of R_abcd"},
    {"scalar-lie", 1e-9, true, false, "Lie_xi L by the chain rule equals xi^a d_a L"},
    {"symmetry", 1e-10, false, false, "canonical tensor is symmetric"},
    {"witness-curvature-obstruction", 1e-3, false, true,
     "both sides of the traditional divergence identity are nonzero"},
    {"witness-trad-asymmetry", 0.1, false, true, "traditional tensor has an antisymmetric part"},
    {"witness-trad-gauge", 0.1, false, true, "traditional tensor changes under a gauge shift"},
    {"witness-trad-rotation", 1e-3, false, true,
     "traditional current of a non-constant Killing field is not conserved"},
};

constexpr double kRoundingFloor = 1e3 * std::numeric_limits<double>::epsilon();

// Tracks the point with the largest residual / (1 + scale).
struct Worst {
  double residual = 0.0;
  double scale = 0.0;
  double key = -1.0;
  double raw_max = 0.0;
  double raw_scale = 0.0;

  void add(double r, double s) {
    const double k = std::isfinite(r) ? r / (1.0 + s) : std::numeric_limits<double>::infinity();
    if (k > key) {
      key = k;
      residual = r;
      scale = s;
    }
    if (!(r <= raw_max)) raw_max = r;
    raw_scale = std::max(raw_scale, s);
  }
  void add(const Residual& r) { add(r.value, r.scale); }
};

// Tracks the point with the smallest value / scale for lower-bound checks.
struct Lowest {
  double value = 0.0;
  double scale = 0.0;
  double ratio = std::numeric_limits<double>::infinity();
  bool any = false;

  void add(double v, double s) {
    const double r = s > 0.0 ? v / s : (v > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    if (!any || r < ratio) {
      ratio = r;
      value = v;
      scale = s;
      any = true;
    }
  }
};

struct Ctx {
  const Scenario& s;
  const VerifyConfig& cfg;
  std::vector<Point> pts;
  DerivativeMode mode;
  const Chart* chart;
  bool flat;
};

CheckReport base_report(const Ctx& c, std::string_view name) {
  CheckReport r;
  r.name = std::string(name);
  r.scenario = c.s.name;
  r.tolerance = resolve_tolerance(name, c.cfg);
  r.points = static_cast<int>(c.pts.size());
  r.witness = check_info(name).witness;
  return r;
}

CheckReport finish(CheckReport r, const Worst& w) {
  r.max_residual = w.residual;
  r.scale = w.scale;
  r.pass = std::isfinite(w.residual) && w.residual <= r.tolerance * (1.0 + w.scale);
  r.detail["raw_max_residual"] = w.raw_max;
  r.detail["raw_scale"] = w.raw_scale;
  return r;
}

CheckReport finish(CheckReport r, const Lowest& w) {
  r.max_residual = w.value;
  r.scale = w.scale;
  r.pass = w.any && w.value >= r.tolerance * w.scale && w.value > 0.0;
  r.detail["min_ratio"] = std::isfinite(w.ratio) ? w.ratio : 0.0;
  return r;
}

// Killing fields that are covariantly constant at every sample point.
bool covariantly_constant(const Ctx& c, const VectorFieldSpec& xi) {
  for (const auto& x : c.pts) {
    const auto d = vector_gradient(c.s.metric, xi, x);
    if (max_abs(d) > 1e-12 * (1.0 + max_abs(xi.at<double>(x)))) return false;
  }
  return true;
}

std::vector<const VectorFieldSpec*> constant_killing(const Ctx& c) {
  std::vector<const VectorFieldSpec*> out;
  for (const auto& k : c.s.killing)
    if (covariantly_constant(c, k)) out.push_back(&k);
  return out;
}

std::vector<const VectorFieldSpec*> rotating_killing(const Ctx& c) {
  std::vector<const VectorFieldSpec*> out;
  for (const auto& k : c.s.killing)
    if (!covariantly_constant(c, k)) out.push_back(&k);
  return out;
}

// ---------------------------------------------------------------------------
// Geometry.

CheckReport metric_compatibility(const Ctx& c) {
  auto r = base_report(c, "metric-compatibility");
  Worst w;
  for (const auto& x : c.pts) {
    const auto jet = outer_jet([&](auto xs) { return c.s.metric.at(xs); }, x, c.mode, c.chart);
    const auto d = covariant_from(jet.value, jet.partial, christoffel(c.s.metric, x));
    w.add(max_abs(d), max_abs(jet.partial));
  }
  return finish(r, w);
}

CheckReport riemann_symmetries(const Ctx& c) {
  auto r = base_report(c, "riemann-symmetries");
  Worst w;
  const int n = c.s.dim();
  for (const auto& x : c.pts) {
    const auto up = riemann(c.s.metric, x);
    const auto g = c.s.metric.at<double>(x);
    Tensor<double> low(n, Valence{0, 4});
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int cc = 0; cc < n; ++cc)
          for (int d = 0; d < n; ++d) {
            double s = 0.0;
            for (int e = 0; e < n; ++e) s += g(a, e) * up(e, b, cc, d);
            low(a, b, cc, d) = s;
          }
    double res = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int cc = 0; cc < n; ++cc)
          for (int d = 0; d < n; ++d) {
            const double v = low(a, b, cc, d);
            res = std::max({res, std::abs(v + low(a, b, d, cc)), std::abs(v + low(b, a, cc, d)),
                            std::abs(v - low(cc, d, a, b)),
                            std::abs(v + low(a, cc, d, b) + low(a, d, b, cc))});
          }
    w.add(res, max_abs(low));
  }
  return finish(r, w);
}

// The potential, or for scalar matter the first test vector read as a one-form.
std::vector<SmoothMap> probe_one_form(const Scenario& s) {
  if (const auto* gm = std::get_if<GaugeMatter>(&s.matter)) return gm->potential.components();
  if (s.test_vectors.empty()) throw ConfigError("no one-form to probe the commutator with");
  return s.test_vectors.front().components;
}

CheckReport commutator(const Ctx& c) {
  auto r = base_report(c, "commutator");
  Worst w;
  const auto form = probe_one_form(c.s);
  for (const auto& x : c.pts) w.add(commutator_check(c.s.metric, form, x, c.mode));
  return finish(r, w);
}

double lowered_norm(const MetricField& metric, const VectorFieldSpec& xi, std::span<const double> x) {
  const auto g = metric.at<double>(x);
  const auto v = xi.at<double>(x);
  double m = 0.0;
  for (int a = 0; a < metric.dim(); ++a) {
    double s = 0.0;
    for (int b = 0; b < metric.dim(); ++b) s += g(a, b) * v(b);
    m = std::max(m, std::abs(s));
  }
  return m;
}

CheckReport killing(const Ctx& c) {
  auto r = base_report(c, "killing");
  Worst w;
  for (const auto& k : c.s.killing)
    for (const auto& x : c.pts)
      w.add(max_abs(killing_residual(c.s.metric, k, x, c.mode)), lowered_norm(c.s.metric, k, x));
  r.detail["vectors"] = static_cast<double>(c.s.killing.size());
  return finish(r, w);
}

// ---------------------------------------------------------------------------
// Gauge field.

CheckReport bianchi(const Ctx& c) {
  auto r = base_report(c, "bianchi");
  Worst w;
  const auto& a = c.s.gauge().potential;
  for (const auto& x : c.pts) w.add(bianchi_residual(a, c.s.metric, x, c.mode));
  return finish(r, w);
}

std::string random_component(std::mt19937_64& rng, const std::vector<std::string>& coords) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, coords.size() - 1);
  std::ostringstream os;
  os.precision(6);
  os << std::fixed;
  os << coef(rng) << "*" << coords[pick(rng)] << "*" << coords[pick(rng)];
  os << " + " << coef(rng) << "*sin(" << coef(rng) << "*" << coords[pick(rng)] << " + " << coef(rng) << ")";
  os << " + " << coef(rng) << "*cos(" << coef(rng) << "*" << coords[pick(rng)] << ")*" << coords[pick(rng)];
  os << " + " << coef(rng) << "*" << coords[pick(rng)] << "^3";
  return os.str();
}

}  // namespace

std::vector<GaugePotential> random_potentials(const Scenario& s, int count) {
  std::mt19937_64 rng(s.seed * 0x9E3779B97F4A7C15ull + 7);
  std::vector<GaugePotential> out;
  const auto& coords = s.chart.coordinates();
  for (int k = 0; k < count; ++k) {
    std::vector<SmoothMap> comps;
    for (int b = 0; b < s.dim(); ++b)
      comps.push_back(SmoothMap::parse(random_component(rng, coords), coords));
    out.emplace_back(std::move(comps));
  }
  return out;
}

namespace {

CheckReport bianchi_random(const Ctx& c) {
  auto r = base_report(c, "bianchi-random");
  Worst w;
  const auto pots = random_potentials(c.s, 50);
  for (const auto& a : pots)
    for (const auto& x : c.pts) w.add(bianchi_residual(a, c.s.metric, x, c.mode));
  r.detail["potentials"] = static_cast<double>(pots.size());
  return finish(r, w);
}

CheckReport field_equation(const Ctx& c) {
  auto r = base_report(c, "field-equation");
  Worst w;
  for (const auto& x : c.pts) {
    const auto fe = matter_field_equation(c.s.matter, c.s.metric, x, c.mode, c.chart);
    w.add(max_abs(fe.value), fe.scale);
  }
  return finish(r, w);
}

CheckReport gauge_invariance(const Ctx& c) {
  auto r = base_report(c, "gauge-invariance");
  Worst w;
  const auto& gm = c.s.gauge();
  for (const auto& chi : c.s.gauge_functions) {
    const Matter shifted = GaugeMatter{gm.model, gm.potential.shifted(chi)};
    for (const auto& x : c.pts) {
      const auto f0 = field_strength(gm.potential, x);
      const auto f1 = field_strength(std::get<GaugeMatter>(shifted).potential, x);
      double res = max_abs_diff(f0, f1);
      double scale = max_abs(f0);
      for (auto v : {StressVariant::canonical, StressVariant::metric}) {
        const auto t0 = stress_tensor(v, c.s.matter, c.s.metric, x).tensor;
        const auto t1 = stress_tensor(v, shifted, c.s.metric, x).tensor;
        res = std::max(res, max_abs_diff(t0, t1));
        scale = std::max(scale, max_abs(t0));
      }
      w.add(res, scale);
    }
  }
  r.detail["gauge_functions"] = static_cast<double>(c.s.gauge_functions.size());
  return finish(r, w);
}

// ---------------------------------------------------------------------------
// Stress tensors.

std::string model_label(const Matter& m) { return matter_model_kind(m); }

CheckReport coincidence(const Ctx& c, const Matter& m) {
  auto r = base_report(c, "coincidence[" + model_label(m) + "]");
  Worst w;
  for (const auto& x : c.pts) {
    const auto tc = stress_tensor(StressVariant::canonical, m, c.s.metric, x).tensor;
    const auto tm = stress_tensor(StressVariant::metric, m, c.s.metric, x).tensor;
    w.add(max_abs_diff(tc, tm), std::max(max_abs(tc), max_abs(tm)));
  }
  return finish(r, w);
}

CheckReport symmetry(const Ctx& c) {
  auto r = base_report(c, "symmetry");
  Worst w;
  for (const auto& x : c.pts) {
    const auto t = stress_tensor(StressVariant::canonical, c.s.matter, c.s.metric, x).tensor;
    w.add(antisymmetric_part(t), max_abs(t));
  }
  return finish(r, w);
}

// g = P^T diag(sig) P with P = I + 0.25 U, U uniform in [-1, 1].
Tensor<double> random_metric(std::mt19937_64& rng, const std::vector<int>& sig, Tensor<double>* p_out) {
  const int n = static_cast<int>(sig.size());
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Tensor<double> p(n, Valence{1, 1});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) p(i, j) = (i == j ? 1.0 : 0.0) + 0.25 * u(rng);
  Tensor<double> g(n, Valence{0, 2});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += p(k, a) * static_cast<double>(sig[static_cast<std::size_t>(k)]) * p(k, b);
      g(a, b) = s;
    }
  if (p_out) *p_out = p;
  return g;
}

Residual off_shell_residual(const LagrangianModel& model, const Tensor<double>& f, const Tensor<double>& g) {
  const int n = f.dim();
  const auto ginv = inverse(g);
  const auto p = dL_dF(model, f, g);
  const auto dg = dL_dg(model, f, g);
  Residual out;
  Tensor<double> pf(n, Valence{2, 0});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double s = 0.0;
      for (int cc = 0; cc < n; ++cc)
        for (int d = 0; d < n; ++d) s += p(a, cc) * ginv(b, d) * f(d, cc);
      pf(a, b) = s;
    }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      out.value = std::max(out.value, std::abs(pf(a, b) + dg(a, b)));
      out.scale = std::max({out.scale, std::abs(pf(a, b)), std::abs(dg(a, b))});
    }
  out.value = std::max(out.value, antisymmetric_part(pf));
  return out;
}

CheckReport off_shell_identity(const Ctx& c, const LagrangianModel& model) {
  auto r = base_report(c, "off-shell-identity[" + model.kind() + "]");
  const int n = c.s.dim();
  std::mt19937_64 rng(c.s.seed * 0xD1B54A32D192ED03ull + model.kind().size());
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  Worst w;
  int rejected = 0;
  for (int k = 0; k < 200; ++k) {
    const auto g = random_metric(rng, c.s.metric.signature(), nullptr);
    Tensor<double> f(n, Valence{0, 2});
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        f(a, b) = u(rng);
        f(b, a) = -f(a, b);
      }
    try {
      w.add(off_shell_residual(model, f, g));
    } catch (const DomainError&) {
      ++rejected;
    }
  }
  r.points = 200 - rejected;
  r.detail["rejected"] = rejected;
  return finish(r, w);
}

// Pure electric field E = beta sqrt(0.9) in a randomly transformed frame,
// so det(1 + g^-1 F / beta) = 0.1 exactly.
CheckReport off_shell_edge(const Ctx& c, const LagrangianModel& model, double beta) {
  auto r = base_report(c, "off-shell-identity-edge[" + model.kind() + "]");
  const int n = c.s.dim();
  const auto& sig = c.s.metric.signature();
  std::mt19937_64 rng(c.s.seed * 0x94D049BB133111EBull + 11);
  const int time = static_cast<int>(std::find(sig.begin(), sig.end(), -1) - sig.begin());
  const int space = static_cast<int>(std::find(sig.begin(), sig.end(), 1) - sig.begin());
  const double e = beta * std::sqrt(0.9);
  Worst w;
  double min_ratio = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 50; ++k) {
    Tensor<double> p;
    const auto g = random_metric(rng, sig, &p);
    Tensor<double> f(n, Valence{0, 2});
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) f(a, b) = e * (p(time, a) * p(space, b) - p(space, a) * p(time, b));
    const auto ginv = inverse(g);
    Tensor<double> m(n, Valence{1, 1});
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double s = a == b ? 1.0 : 0.0;
        for (int cc = 0; cc < n; ++cc) s += ginv(a, cc) * f(cc, b) / beta;
        m(a, b) = s;
      }
    min_ratio = std::min(min_ratio, determinant(m));
    w.add(off_shell_residual(model, f, g));
  }
  r.points = 50;
  r.detail["domain_ratio"] = min_ratio;
  return finish(r, w);
}

CheckReport divergence(const Ctx& c, StressVariant v, std::string_view name) {
  auto r = base_report(c, name);
  Worst w;
  for (const auto& x : c.pts) {
    const auto d = stress_divergence(v, c.s.matter, c.s.metric, x, c.mode, c.chart);
    w.add(max_abs(d.value), d.scale);
  }
  return finish(r, w);
}

CheckReport divergence_footnote(const Ctx& c) {
  auto r = base_report(c, "divergence-footnote");
  Worst w;
  for (const auto& x : c.pts) {
    const auto direct = stress_divergence(StressVariant::canonical, c.s.matter, c.s.metric, x, c.mode, c.chart);
    const auto dens =
        stress_divergence_density(StressVariant::canonical, c.s.matter, c.s.metric, x, c.mode, c.chart);
    w.add(max_abs_diff(direct.value, dens.value), std::max(direct.scale, dens.scale));
  }
  return finish(r, w);
}

CheckReport divergence_traditional(const Ctx& c) {
  auto r = base_report(c, "divergence-traditional");
  if (c.flat && !c.cfg.tolerance && !c.cfg.tolerance_overrides.count("divergence-traditional")) {
    r.tolerance = c.mode.is_fd() ? fd_tolerance(c.mode.h) : kFlatTraditionalTolerance;
  }
  Worst w;
  double div_max = 0.0;
  double curv_max = 0.0;
  for (const auto& x : c.pts) {
    const auto b = traditional_balance(c.s.gauge(), c.s.metric, x, c.mode, c.chart);
    double sum = 0.0;
    for (int i = 0; i < c.s.dim(); ++i) sum = std::max(sum, std::abs(b.divergence(i) + b.curvature(i)));
    const double dv = max_abs(b.divergence);
    const double cv = max_abs(b.curvature);
    div_max = std::max(div_max, dv);
    curv_max = std::max(curv_max, cv);
    // On a flat background both sides must vanish on their own.
    w.add(c.flat ? std::max({sum, dv, cv}) : sum, b.scale);
  }
  r.detail["flat"] = c.flat ? 1.0 : 0.0;
  r.detail["max_divergence_term"] = div_max;
  r.detail["max_curvature_term"] = curv_max;
  return finish(r, w);
}

CheckReport witness_curvature(const Ctx& c) {
  auto r = base_report(c, "witness-curvature-obstruction");
  Lowest w;
  for (const auto& x : c.pts) {
    const auto b = traditional_balance(c.s.gauge(), c.s.metric, x, c.mode, c.chart);
    w.add(std::min(max_abs(b.divergence), max_abs(b.curvature)), b.scale);
  }
  return finish(r, w);
}

CheckReport witness_asymmetry(const Ctx& c) {
  auto r = base_report(c, "witness-trad-asymmetry");
  Lowest w;
  for (const auto& x : c.pts) {
    const auto tt = stress_tensor(StressVariant::traditional, c.s.matter, c.s.metric, x).tensor;
    const auto tc = stress_tensor(StressVariant::canonical, c.s.matter, c.s.metric, x).tensor;
    w.add(antisymmetric_part(tt), max_abs(tc));
  }
  return finish(r, w);
}

CheckReport witness_gauge(const Ctx& c) {
  auto r = base_report(c, "witness-trad-gauge");
  const auto& gm = c.s.gauge();
  double change = 0.0;
  double scale = 0.0;
  for (const auto& chi : c.s.gauge_functions) {
    const Matter shifted = GaugeMatter{gm.model, gm.potential.shifted(chi)};
    for (const auto& x : c.pts) {
      const auto t0 = stress_tensor(StressVariant::traditional, c.s.matter, c.s.metric, x).tensor;
      const auto t1 = stress_tensor(StressVariant::traditional, shifted, c.s.metric, x).tensor;
      change = std::max(change, max_abs_diff(t0, t1));
      scale = std::max(scale, max_abs(t0));
    }
  }
  Lowest w;
  w.add(change, scale);
  return finish(r, w);
}

CheckReport noether(const Ctx& c, StressVariant v, std::string_view name,
                    const std::vector<const VectorFieldSpec*>& vectors) {
  auto r = base_report(c, name);
  Worst w;
  for (const auto* k : vectors)
    for (const auto& x : c.pts) {
      const auto d = current_divergence(v, c.s.matter, c.s.metric, *k, x, c.mode, c.chart);
      w.add(std::abs(d.value), d.scale);
    }
  r.detail["vectors"] = static_cast<double>(vectors.size());
  return finish(r, w);
}

CheckReport witness_rotation(const Ctx& c) {
  auto r = base_report(c, "witness-trad-rotation");
  const auto rot = rotating_killing(c);
  Lowest w;
  for (const auto& x : c.pts) {
    double value = 0.0;
    double scale = 0.0;
    double top = -1.0;
    for (const auto* k : rot) {
      const auto d = current_divergence(StressVariant::traditional, c.s.matter, c.s.metric, *k, x, c.mode, c.chart);
      const double ratio = d.scale > 0.0 ? std::abs(d.value) / d.scale : 0.0;
      if (ratio > top) {
        top = ratio;
        value = std::abs(d.value);
        scale = d.scale;
      }
    }
    w.add(value, scale);
  }
  r.detail["vectors"] = static_cast<double>(rot.size());
  return finish(r, w);
}

CheckReport master_identity(const Ctx& c) {
  auto r = base_report(c, "master-identity");
  Worst w;
  std::vector<std::pair<const VectorFieldSpec*, bool>> vectors;
  for (const auto& t : c.s.test_vectors) vectors.emplace_back(&t, false);
  for (const auto& k : c.s.killing) vectors.emplace_back(&k, true);
  const int n = c.s.dim();
  for (const auto& [xi, is_killing] : vectors)
    for (const auto& x : c.pts) {
      const auto lhs = current_divergence(StressVariant::canonical, c.s.matter, c.s.metric, *xi, x, c.mode, c.chart);
      const auto tm = stress_tensor(StressVariant::metric, c.s.matter, c.s.metric, x).tensor;
      const auto lg = killing_residual(c.s.metric, *xi, x, c.mode);
      double rhs = 0.0;
      double scale = lhs.scale;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          const double term = 0.5 * tm(a, b) * lg(a, b);
          rhs += term;
          scale = std::max(scale, std::abs(term));
        }
      double res = std::abs(lhs.value - rhs);
      if (is_killing) res = std::max({res, std::abs(lhs.value), std::abs(rhs)});
      w.add(res, scale);
    }
  r.detail["test_vectors"] = static_cast<double>(c.s.test_vectors.size());
  r.detail["killing_vectors"] = static_cast<double>(c.s.killing.size());
  return finish(r, w);
}

// Lie_xi L through the chain rule against xi^a d_a L.
Residual scalar_lie_at(const Ctx& c, const VectorFieldSpec& xi, std::span<const double> x) {
  const auto& metric = c.s.metric;
  const int n = c.s.dim();
  const auto lj = outer_jet([&](auto xs) {
    Tensor<std::remove_cvref_t<decltype(xs[0])>> t(n, Valence{0, 0});
    const auto g = metric.at(xs);
    if (const auto* gm = std::get_if<GaugeMatter>(&c.s.matter)) {
      t.flat(0) = gm->model.evaluate(field_strength_at(gm->potential, xs), g);
    } else {
      const auto& sm = std::get<ScalarMatter>(c.s.matter);
      t.flat(0) = sm.model.evaluate(scalar_gradient(sm.phi, xs), g);
    }
    return t;
  }, x, c.mode, c.chart);
  const auto vj = exact_jet<double>([&](auto xs) { return xi.at(xs); }, x);
  const auto gj = outer_jet([&](auto xs) { return metric.at(xs); }, x, c.mode, c.chart);
  const auto lie_g = lie_02_partial(gj, vj);
  Residual out;
  double direct = 0.0;
  for (int a = 0; a < n; ++a) {
    const double term = vj.value(a) * lj.partial.flat(static_cast<std::size_t>(a));
    direct += term;
    out.scale = std::max(out.scale, std::abs(term));
  }
  double chain = 0.0;
  Tensor<double> dldg;
  if (const auto* gm = std::get_if<GaugeMatter>(&c.s.matter)) {
    const auto fj = outer_jet([&](auto xs) { return field_strength_at(gm->potential, xs); }, x, c.mode, c.chart);
    const auto lie_f = lie_02_partial(fj, vj);
    const auto p = dL_dF(gm->model, fj.value, gj.value);
    dldg = dL_dg(gm->model, fj.value, gj.value);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const double term = p(a, b) * lie_f(a, b);
        chain += term;
        out.scale = std::max(out.scale, std::abs(term));
      }
  } else {
    const auto& sm = std::get<ScalarMatter>(c.s.matter);
    const auto dj = outer_jet([&](auto xs) { return scalar_gradient(sm.phi, xs); }, x, c.mode, c.chart);
    const auto p = scalar_dL(sm.model, dj.value, gj.value);
    dldg = scalar_dL_dg(sm.model, dj.value, gj.value);
    for (int a = 0; a < n; ++a) {
      double lie = 0.0;
      for (int cc = 0; cc < n; ++cc) lie += vj.value(cc) * dj.partial(a, cc) + dj.value(cc) * vj.partial(cc, a);
      const double term = p(a) * lie;
      chain += term;
      out.scale = std::max(out.scale, std::abs(term));
    }
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double term = dldg(a, b) * lie_g(a, b);
      chain += term;
      out.scale = std::max(out.scale, std::abs(term));
    }
  out.value = std::abs(chain - direct);
  return out;
}

CheckReport scalar_lie(const Ctx& c) {
  auto r = base_report(c, "scalar-lie");
  Worst w;
  for (const auto& xi : c.s.test_vectors)
    for (const auto& x : c.pts) w.add(scalar_lie_at(c, xi, x));
  r.detail["vectors"] = static_cast<double>(c.s.test_vectors.size());
  return finish(r, w);
}

}  // namespace

// ---------------------------------------------------------------------------

const std::vector<CheckInfo>& check_catalog() { return kChecks; }

std::string_view check_base(std::string_view name) {
  const auto pos = name.find('[');
  return pos == std::string_view::npos ? name : name.substr(0, pos);
}

const CheckInfo& check_info(std::string_view name) {
  const auto base = check_base(name);
  for (const auto& c : kChecks)
    if (c.name == base) return c;
  throw ConfigError("unknown check '" + std::string(name) + "'");
}

double fd_tolerance(double h) { return std::max(1e-8, 1e2 * h * h); }

double resolve_tolerance(std::string_view name, const VerifyConfig& cfg) {
  const auto& info = check_info(name);
  if (auto it = cfg.tolerance_overrides.find(std::string(name)); it != cfg.tolerance_overrides.end())
    return it->second;
  if (auto it = cfg.tolerance_overrides.find(std::string(info.name)); it != cfg.tolerance_overrides.end())
    return it->second;
  if (info.witness) return info.tolerance;
  if (cfg.tolerance) return *cfg.tolerance;
  if (cfg.mode.is_fd() && info.derivative_stage) return std::max(info.tolerance, fd_tolerance(cfg.mode.h));
  return info.tolerance;
}

std::vector<Matter> coincidence_models(const Scenario& s) {
  std::vector<Matter> out;
  if (const auto* gm = std::get_if<GaugeMatter>(&s.matter)) {
    const auto& kind = gm->model.kind();
    auto pick = [&](const std::string& k, LagrangianModel fallback) {
      out.push_back(GaugeMatter{kind == k ? gm->model : fallback, gm->potential});
    };
    pick("maxwell", LagrangianModel::maxwell());
    pick("born-infeld", LagrangianModel::born_infeld(kDefaultBornInfeldBeta));
    pick("quartic", LagrangianModel::quartic(kDefaultQuarticLambda));
    if (kind != "maxwell" && kind != "born-infeld" && kind != "quartic") out.push_back(*gm);
  } else {
    const auto& sm = std::get<ScalarMatter>(s.matter);
    const auto& kind = sm.model.kind();
    out.push_back(ScalarMatter{kind == "scalar-massless" ? sm.model : ScalarFieldModel::massless(), sm.phi});
    out.push_back(ScalarMatter{kind == "scalar-kinetic" ? sm.model : ScalarFieldModel::kinetic(kDefaultScalarLambda),
                               sm.phi});
  }
  return out;
}

namespace {

std::vector<LagrangianModel> off_shell_models(const Scenario& s) {
  std::vector<LagrangianModel> out;
  for (const auto& m : coincidence_models(s)) out.push_back(std::get<GaugeMatter>(m).model);
  return out;
}

bool lorentzian(const Scenario& s) {
  const auto& sig = s.metric.signature();
  return std::count(sig.begin(), sig.end(), -1) == 1;
}

using CheckFn = std::function<CheckReport(const Ctx&)>;

std::vector<std::pair<std::string, CheckFn>> plan(const Scenario& s, const Ctx* ctx) {
  std::vector<std::pair<std::string, CheckFn>> out;
  const bool gauge = !s.scalar();
  out.emplace_back("metric-compatibility", metric_compatibility);
  out.emplace_back("riemann-symmetries", riemann_symmetries);
  out.emplace_back("commutator", commutator);
  if (!s.killing.empty()) out.emplace_back("killing", killing);
  out.emplace_back("bianchi-random", bianchi_random);
  for (const auto& m : coincidence_models(s))
    out.emplace_back("coincidence[" + model_label(m) + "]", [m](const Ctx& c) { return coincidence(c, m); });
  out.emplace_back("symmetry", symmetry);
  out.emplace_back("divergence-footnote", divergence_footnote);
  out.emplace_back("scalar-lie", scalar_lie);
  if (gauge) {
    out.emplace_back("bianchi", bianchi);
    for (const auto& m : off_shell_models(s)) {
      out.emplace_back("off-shell-identity[" + m.kind() + "]",
                       [m](const Ctx& c) { return off_shell_identity(c, m); });
      if (m.kind() == "born-infeld" && lorentzian(s)) {
        const double beta = m.params().at("beta");
        out.emplace_back("off-shell-identity-edge[" + m.kind() + "]",
                         [m, beta](const Ctx& c) { return off_shell_edge(c, m, beta); });
      }
    }
    if (!s.gauge_functions.empty()) out.emplace_back("gauge-invariance", gauge_invariance);
    if (s.has_witness("trad-gauge") && !s.gauge_functions.empty())
      out.emplace_back("witness-trad-gauge", witness_gauge);
    if (s.has_witness("trad-asymmetry")) out.emplace_back("witness-trad-asymmetry", witness_asymmetry);
  }
  if (s.on_shell) {
    out.emplace_back("field-equation", field_equation);
    out.emplace_back("divergence-canonical",
                     [](const Ctx& c) { return divergence(c, StressVariant::canonical, "divergence-canonical"); });
    out.emplace_back("divergence-metric",
                     [](const Ctx& c) { return divergence(c, StressVariant::metric, "divergence-metric"); });
    out.emplace_back("master-identity", master_identity);
    if (!s.killing.empty()) {
      out.emplace_back("noether-canonical", [](const Ctx& c) {
        std::vector<const VectorFieldSpec*> all;
        for (const auto& k : c.s.killing) all.push_back(&k);
        return noether(c, StressVariant::canonical, "noether-canonical", all);
      });
    }
    if (gauge) {
      out.emplace_back("divergence-traditional", divergence_traditional);
      if (s.has_witness("curvature-obstruction"))
        out.emplace_back("witness-curvature-obstruction", witness_curvature);
      if (!s.killing.empty() && (ctx == nullptr || !constant_killing(*ctx).empty())) {
        out.emplace_back("noether-traditional", [](const Ctx& c) {
          const auto vs = constant_killing(c);
          if (vs.empty()) throw ConfigError("no covariantly constant Killing field");
          return noether(c, StressVariant::traditional, "noether-traditional", vs);
        });
      }
      if (s.has_witness("trad-rotation") && !s.killing.empty())
        out.emplace_back("witness-trad-rotation", witness_rotation);
    }
  }
  return out;
}

Ctx make_ctx(const Scenario& s, const VerifyConfig& cfg) {
  if (cfg.samples && *cfg.samples < 1) throw ConfigError("sample count must be at least 1");
  if (cfg.mode.is_fd()) FdScheme{cfg.mode.h, 2}.validate();
  const int samples = cfg.samples.value_or(s.samples);
  const std::uint64_t seed = cfg.seed.value_or(s.seed);
  return Ctx{s, cfg, s.chart.sample_points(samples, seed), cfg.mode, &s.chart, is_flat(s)};
}

bool selected(const std::string& name, const VerifyConfig& cfg) {
  if (cfg.checks.empty()) return true;
  for (const auto& c : cfg.checks)
    if (c == "all" || c == name || c == check_base(name)) return true;
  return false;
}

CheckReport guarded(const Ctx& c, const std::string& name, const CheckFn& fn) {
  try {
    return fn(c);
  } catch (const Error& e) {
    auto r = base_report(c, name);
    r.pass = false;
    r.note = std::string("evaluation failed: ") + e.what();
    return r;
  }
}

}  // namespace

std::vector<std::string> applicable_checks(const Scenario& s) {
  const VerifyConfig cfg;
  const auto ctx = make_ctx(s, cfg);
  std::vector<std::string> out;
  for (const auto& [name, fn] : plan(s, &ctx)) out.push_back(name);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<CheckReport> run_checks(const Scenario& s, const VerifyConfig& cfg) {
  for (const auto& c : cfg.checks)
    if (c != "all") check_info(c);
  const auto ctx = make_ctx(s, cfg);
  std::vector<CheckReport> out;
  for (const auto& [name, fn] : plan(s, &ctx))
    if (selected(name, cfg)) out.push_back(guarded(ctx, name, fn));
  std::sort(out.begin(), out.end(), [](const CheckReport& a, const CheckReport& b) { return a.name < b.name; });
  return out;
}

std::vector<CheckReport> run_suite(const std::vector<Scenario>& scenarios, const VerifyConfig& cfg) {
  std::vector<CheckReport> out;
  for (const auto& s : scenarios) {
    auto rows = run_checks(s, cfg);
    out.insert(out.end(), rows.begin(), rows.end());
  }
  std::stable_sort(out.begin(), out.end(), [](const CheckReport& a, const CheckReport& b) {
    return std::tie(a.scenario, a.name) < std::tie(b.scenario, b.name);
  });
  return out;
}

CheckReport run_check(const Scenario& s, std::string_view name, const VerifyConfig& cfg) {
  check_info(name);
  const auto ctx = make_ctx(s, cfg);
  for (const auto& [n, fn] : plan(s, &ctx))
    if (n == name) return fn(ctx);
  throw ConfigError("check '" + std::string(name) + "' does not apply to scenario '" + s.name + "'");
}

std::vector<double> halving_steps(double h0, int halvings) {
  if (halvings < 3) throw ConfigError("a convergence study needs at least 3 halvings");
  if (!(h0 > 0.0)) throw ConfigError("finite-difference step must be positive");
  std::vector<double> out;
  for (int k = 0; k <= halvings; ++k) out.push_back(h0 / std::pow(2.0, k));
  return out;
}

ConvergenceSeries convergence_study(const Scenario& s, std::string_view check,
                                    const std::vector<double>& steps, const VerifyConfig& cfg) {
  const auto& info = check_info(check);
  if (!info.derivative_stage)
    throw ConfigError("check '" + std::string(check) + "' has no derivative stage to converge");
  if (steps.size() < 4) throw ConfigError("a convergence study needs at least 3 halvings");
  ConvergenceSeries out;
  out.check = std::string(check);
  out.scenario = s.name;
  for (double h : steps) {
    VerifyConfig c = cfg;
    c.mode = DerivativeMode::fd(h);
    const auto r = run_check(s, check, c);
    if (!r.note.empty()) throw ConfigError(r.note);
    out.steps.push_back({h, r.detail.at("raw_max_residual"), r.detail.at("raw_scale")});
  }
  const auto& first = out.steps.front();
  out.degenerate = first.residual <= kRoundingFloor * (1.0 + first.scale);
  bool ok = true;
  for (std::size_t k = 0; k + 1 < out.steps.size(); ++k) {
    const double a = out.steps[k].residual;
    const double b = out.steps[k + 1].residual;
    if (out.degenerate || !(a > 0.0) || !(b > 0.0)) {
      out.orders.push_back(std::nullopt);
      continue;
    }
    const double order = std::log2(a / b);
    out.orders.push_back(order);
    if (order < kOrderLow || order > kOrderHigh) ok = false;
  }
  out.pass = ok;
  return out;
}

}  // namespace emt
