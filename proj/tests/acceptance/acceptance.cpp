// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "emt/verify.hpp"

using namespace emt;

namespace {

struct Outcome {
  bool pass = true;
  std::string summary;
  std::vector<std::string> problems;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      problems.push_back(what);
    }
  }
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

VerifyConfig config_for(std::vector<std::string> checks, int samples = 64) {
  VerifyConfig cfg;
  cfg.checks = std::move(checks);
  cfg.samples = samples;
  return cfg;
}

// Worst residual / (1 + scale) over rows, and the rows that fail the bound.
struct Bound {
  double worst_ratio = 0.0;
  int rows = 0;
};

void bound_rows(Outcome& out, Bound& b, const std::vector<CheckReport>& rows, double tol) {
  for (const auto& r : rows) {
    ++b.rows;
    const double ratio = r.max_residual / (1.0 + r.scale);
    b.worst_ratio = std::max(b.worst_ratio, ratio);
    out.require(r.note.empty() && std::isfinite(r.max_residual) && r.max_residual <= tol * (1.0 + r.scale),
                r.scenario + "/" + r.name + " residual " + sci(r.max_residual) + " " + r.note);
  }
}

Outcome coincidence() {
  Outcome out;
  Bound b;
  for (const auto& s : catalog()) {
    const auto rows = run_checks(s, config_for({"coincidence"}));
    out.require(rows.size() == (s.scalar() ? 2u : 3u), s.name + ": unexpected model count");
    bound_rows(out, b, rows, 1e-12);
  }
  out.summary = std::to_string(b.rows) + " scenario/model pairs at 64 points, worst |T_c - T_m|/(1+scale) = " +
                sci(b.worst_ratio) + " (tol 1e-12)";
  return out;
}

Outcome conservation() {
  Outcome out;
  Bound b;
  int scenarios = 0;
  bool no_isometry = false;
  for (const auto& s : catalog()) {
    if (!s.on_shell) continue;
    ++scenarios;
    if (s.killing.empty()) no_isometry = true;
    bound_rows(out, b, run_checks(s, config_for({"divergence-canonical", "divergence-metric"})), 1e-9);
  }
  out.require(no_isometry, "no on-shell scenario without isometries");
  out.summary = std::to_string(scenarios) + " on-shell scenarios (one without isometries), worst |div T|/(1+scale) = " +
                sci(b.worst_ratio) + " (tol 1e-9)";
  return out;
}

Outcome curvature_obstruction() {
  Outcome out;
  const auto& s = catalog_scenario("schwarzschild-coulomb");
  const auto& gm = s.gauge();
  double min_div = INFINITY;
  double min_curv = INFINITY;
  double worst_sum = 0.0;
  for (const auto& x : s.chart.sample_points(64, s.seed)) {
    const auto b = traditional_balance(gm, s.metric, x);
    const double div = max_abs(b.divergence);
    const double curv = max_abs(b.curvature);
    double sum = 0.0;
    for (int i = 0; i < s.dim(); ++i) sum = std::max(sum, std::abs(b.divergence(i) + b.curvature(i)));
    min_div = std::min(min_div, div / b.scale);
    min_curv = std::min(min_curv, curv / b.scale);
    worst_sum = std::max(worst_sum, sum / (1.0 + b.scale));
  }
  out.require(min_div >= 1e-3, "divergence term below 1e-3 of the local scale: " + sci(min_div));
  out.require(min_curv >= 1e-3, "curvature term below 1e-3 of the local scale: " + sci(min_curv));
  out.require(worst_sum <= 1e-8, "balance residual " + sci(worst_sum));

  double flat_worst = 0.0;
  int flat = 0;
  for (const auto& f : catalog()) {
    if (f.scalar() || !f.on_shell || !is_flat(f)) continue;
    ++flat;
    for (const auto& x : f.chart.sample_points(64, f.seed)) {
      const auto b = traditional_balance(f.gauge(), f.metric, x);
      const double worst = std::max(max_abs(b.divergence), max_abs(b.curvature)) / (1.0 + b.scale);
      flat_worst = std::max(flat_worst, worst);
    }
  }
  out.require(flat_worst <= 1e-10, "flat scenario term " + sci(flat_worst));
  out.summary = "schwarzschild: min |div|/scale = " + sci(min_div) + ", min |K|/scale = " + sci(min_curv) +
                ", sum " + sci(worst_sum) + " (tol 1e-8); " + std::to_string(flat) +
                " flat scenarios: max term " + sci(flat_worst) + " (tol 1e-10)";
  return out;
}

Outcome master_identity() {
  Outcome out;
  Bound b;
  std::size_t fewest = 1000;
  for (const auto& s : catalog()) {
    if (!s.on_shell) continue;
    std::size_t non_killing = 0;
    for (const auto& v : s.test_vectors) {
      double worst = 0.0;
      for (const auto& x : s.points()) worst = std::max(worst, max_abs(killing_residual(s.metric, v, x)));
      if (worst > 1e-6) ++non_killing;
    }
    fewest = std::min(fewest, non_killing);
    out.require(non_killing >= 5, s.name + ": fewer than 5 non-Killing test vectors");
    bound_rows(out, b, run_checks(s, config_for({"master-identity"})), 1e-8);
  }
  out.summary = "at least " + std::to_string(fewest) + " non-Killing vectors per on-shell scenario, worst " +
                "residual/(1+scale) = " + sci(b.worst_ratio) + " (tol 1e-8)";
  return out;
}

Outcome noether() {
  Outcome out;
  const auto& wave = catalog_scenario("minkowski-planewave");
  const auto& schw = catalog_scenario("schwarzschild-coulomb");
  out.require(wave.killing.size() == 10, "plane wave does not carry 10 Killing fields");
  out.require(schw.killing.size() == 4, "schwarzschild does not carry 4 Killing fields");
  Bound b;
  const auto wave_rows = run_checks(wave, config_for({"noether-canonical", "noether-traditional"}));
  bound_rows(out, b, wave_rows, 1e-9);
  for (const auto& r : wave_rows)
    if (r.name == "noether-traditional")
      out.require(r.detail.at("vectors") == 4.0, "expected the 4 translations as constant Killing fields");
  bound_rows(out, b, run_checks(schw, config_for({"noether-canonical"})), 1e-9);

  // Rotation/boost currents of the traditional tensor: the null plane wave
  // has a symmetric traditional tensor, so the witness uses the uniform
  // field in a non-temporal gauge.
  const auto& e = catalog_scenario("minkowski-constant-e");
  const auto w = run_checks(e, config_for({"witness-trad-rotation"}));
  out.require(w.size() == 1 && w[0].pass, "rotation current witness failed");
  const double ratio = w.empty() || w[0].scale == 0.0 ? 0.0 : w[0].max_residual / w[0].scale;
  out.summary = "T_c currents for 10 + 4 Killing fields, T_trad for 4 translations: worst " + sci(b.worst_ratio) +
                " (tol 1e-9); rotation witness min ratio " + sci(ratio) + " (>= 1e-3)";
  return out;
}

Outcome witnesses() {
  Outcome out;
  const auto& s = catalog_scenario("minkowski-constant-e");
  const double e = s.constants.at("E");
  double min_asym = INFINITY;
  for (const auto& x : s.chart.sample_points(64, s.seed))
    min_asym = std::min(min_asym, antisymmetric_part(stress_tensor(StressVariant::traditional, s.matter, s.metric, x).tensor));
  out.require(min_asym >= 0.1 * e * e, "antisymmetric part " + sci(min_asym) + " below 0.1 E^2");
  const auto rows = run_checks(s, config_for({"witness-trad-gauge", "gauge-invariance"}));
  double gauge_ratio = 0.0;
  double canonical_change = 0.0;
  for (const auto& r : rows) {
    if (r.name == "witness-trad-gauge") {
      gauge_ratio = r.scale > 0.0 ? r.max_residual / r.scale : 0.0;
      out.require(r.max_residual >= 0.1 * r.scale, "T_trad gauge change below 0.1 scale");
    } else {
      canonical_change = r.max_residual;
      out.require(r.max_residual <= 1e-12, "T_c changed by " + sci(r.max_residual));
    }
  }
  out.require(rows.size() == 2, "missing witness rows");
  out.summary = "min antisym(T_trad) = " + sci(min_asym) + " vs 0.1 E^2 = " + sci(0.1 * e * e) +
                "; T_trad gauge change ratio " + sci(gauge_ratio) + " (>= 0.1); T_c change " +
                sci(canonical_change) + " (<= 1e-12)";
  return out;
}

Outcome bianchi() {
  Outcome out;
  Bound b;
  int potentials = 0;
  for (const auto& s : catalog()) {
    const auto rows = run_checks(s, config_for({"bianchi", "bianchi-random"}));
    for (const auto& r : rows)
      if (r.name == "bianchi-random") potentials += static_cast<int>(r.detail.at("potentials"));
    bound_rows(out, b, rows, 1e-10);
  }
  out.summary = "catalog potentials plus " + std::to_string(potentials) + " seeded random potentials, worst " +
                sci(b.worst_ratio) + " (tol 1e-10)";
  return out;
}

Outcome convergence() {
  Outcome out;
  struct Case {
    const char* scenario;
    const char* check;
  };
  const std::vector<Case> cases{{"schwarzschild-coulomb", "divergence-canonical"},
                                {"schwarzschild-coulomb", "divergence-metric"},
                                {"schwarzschild-coulomb", "divergence-traditional"},
                                {"de-sitter-random", "bianchi-random"}};
  double lo = INFINITY;
  double hi = -INFINITY;
  for (const auto& c : cases) {
    const auto s = convergence_study(catalog_scenario(c.scenario), c.check, halving_steps(0.1, 3));
    out.require(!s.degenerate, std::string(c.check) + ": residuals at rounding level");
    out.require(s.orders.size() == 3, std::string(c.check) + ": expected three orders");
    for (const auto& o : s.orders) {
      out.require(o.has_value() && *o >= 1.5 && *o <= 2.5, std::string(c.check) + ": order outside 2 +- 0.5");
      if (o) {
        lo = std::min(lo, *o);
        hi = std::max(hi, *o);
      }
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "observed orders in [%.3f, %.3f] over 3 halvings from h = 0.1", lo, hi);
  out.summary = buf;
  return out;
}

Outcome scalar() {
  Outcome out;
  Bound coincide;
  Bound conserve;
  for (const char* name : {"scalar-wave", "schwarzschild-scalar"}) {
    const auto& s = catalog_scenario(name);
    bound_rows(out, coincide, run_checks(s, config_for({"coincidence"})), 1e-12);
    bound_rows(out, conserve, run_checks(s, config_for({"divergence-canonical", "divergence-metric"})), 1e-9);
  }
  out.summary = "coincidence worst " + sci(coincide.worst_ratio) + " (tol 1e-12), divergence worst " +
                sci(conserve.worst_ratio) + " (tol 1e-9)";
  return out;
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"coincidence of canonical and metric tensors", coincidence},
      {"conservation on-shell", conservation},
      {"curvature obstruction of the traditional tensor", curvature_obstruction},
      {"master identity for non-Killing fields", master_identity},
      {"noether currents", noether},
      {"traditional tensor witnesses", witnesses},
      {"bianchi identity", bianchi},
      {"difference convergence order", convergence},
      {"scalar field variant", scalar},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.summary = std::string("error: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("%s criterion %d: %s: %s\n", o.pass ? "PASS" : "FAIL", index, name, o.summary.c_str());
    for (std::size_t k = 0; k < o.problems.size() && k < 10; ++k) std::printf("    %s\n", o.problems[k].c_str());
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d of %zu criteria passed in %.1f s\n", static_cast<int>(criteria.size()) - failed, criteria.size(),
              seconds);
  return failed == 0 ? 0 : 1;
}
