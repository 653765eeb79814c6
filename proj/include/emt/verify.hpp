#pragma once

// Named residual checks over a scenario. A check passes when its worst
// residual satisfies residual <= tolerance * (1 + scale), where scale is the
// largest term entering the identity at that point. Witness checks assert a
// lower bound instead: value >= tolerance * scale.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emt/scenarios.hpp"

namespace emt {

struct CheckReport {
  std::string name;
  std::string scenario;
  double max_residual = 0.0;  // at the worst point; for witnesses the observed value
  double scale = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  int points = 0;
  bool witness = false;
  std::map<std::string, double> detail;
  std::string note;
};

struct CheckInfo {
  std::string_view name;
  double tolerance;
  bool derivative_stage;  // has an outer coordinate derivative (FD-capable)
  bool witness;
  std::string_view summary;
};

/// All check families, by base name.
const std::vector<CheckInfo>& check_catalog();
const CheckInfo& check_info(std::string_view name);

/// Base name of a check: "coincidence[maxwell]" -> "coincidence".
std::string_view check_base(std::string_view name);

struct VerifyConfig {
  DerivativeMode mode = DerivativeMode::dual();
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;                    // applies to every non-witness check
  std::map<std::string, double> tolerance_overrides;  // by full or base name
  std::vector<std::string> checks;                    // empty: all
};

/// Tolerance for a named check under the given configuration.
double resolve_tolerance(std::string_view name, const VerifyConfig& cfg);

/// Finite-difference tolerance floor for derivative-stage checks.
double fd_tolerance(double h);

/// Tolerance for the traditional divergence on flat backgrounds, where both
/// terms must vanish separately.
inline constexpr double kFlatTraditionalTolerance = 1e-10;

/// Default off-catalog model parameters used when a scenario is run under
/// the other Lagrangians.
inline constexpr double kDefaultBornInfeldBeta = 2.0;
inline constexpr double kDefaultQuarticLambda = 0.05;
inline constexpr double kDefaultScalarLambda = 0.1;

/// The gauge (or scalar) models a scenario's coincidence checks run over.
std::vector<Matter> coincidence_models(const Scenario& s);

/// Seeded random polynomial and trigonometric potentials on the scenario chart.
std::vector<GaugePotential> random_potentials(const Scenario& s, int count);

/// Every applicable check on one scenario, sorted by name.
std::vector<CheckReport> run_checks(const Scenario& s, const VerifyConfig& cfg = {});

/// run_checks over several scenarios, sorted by (scenario, check).
std::vector<CheckReport> run_suite(const std::vector<Scenario>& scenarios,
                                   const VerifyConfig& cfg = {});

/// A single named check (full name, e.g. "coincidence[quartic]"); throws
/// ConfigError if it does not apply to the scenario.
CheckReport run_check(const Scenario& s, std::string_view name, const VerifyConfig& cfg = {});

/// Names of the checks that apply to a scenario.
std::vector<std::string> applicable_checks(const Scenario& s);

struct ConvergenceStep {
  double h = 0.0;
  double residual = 0.0;  // largest raw residual over the sample points
  double scale = 0.0;
};

struct ConvergenceSeries {
  std::string check;
  std::string scenario;
  std::vector<ConvergenceStep> steps;
  std::vector<std::optional<double>> orders;  // log2 of successive residual ratios
  bool degenerate = false;                    // residuals at rounding level
  bool pass = false;
};

inline constexpr double kOrderLow = 1.5;
inline constexpr double kOrderHigh = 2.5;

/// h0, h0/2, ... with `halvings` halvings; halvings < 3 is a ConfigError.
std::vector<double> halving_steps(double h0, int halvings);

/// Reruns a derivative-stage check in finite-difference mode at each step.
ConvergenceSeries convergence_study(const Scenario& s, std::string_view check,
                                    const std::vector<double>& steps, const VerifyConfig& cfg = {});

}  // namespace emt
