#pragma once

// Scenario documents: a chart, a metric, matter fields, a Lagrangian model
// and the vector-field catalogs the checks run over.
//
// JSON layout (all expressions use the grammar in expr.hpp):
//   name, dimension, signature ("-+++" or [-1, 1, ...]), coordinates
//   domain        {coord: [lo|null, hi|null]}   open box, default unbounded
//   sample_ranges {coord: [lo, hi]}             default [-1, 1]
//   constants     {name: number}
//   metric        {components: {"ab": expr}}    a <= b only; digits or coordinate names
//   potential     {components: [expr, ...]}     or scalar_field: expr
//   model         {kind, params}
//   on_shell      bool
//   killing       [{components, kind: constant|killing-candidate, label}]
//   test_vectors  [{components, label}]
//   gauge_functions [expr | {expr, label}]
//   witnesses     [name]
//   seed, samples

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "emt/expr.hpp"
#include "emt/geometry.hpp"
#include "emt/stress.hpp"

namespace emt {

/// Names accepted in a scenario's `witnesses` list.
inline constexpr std::string_view kWitnessNames[] = {
    "curvature-obstruction",
    "trad-asymmetry",
    "trad-gauge",
    "trad-rotation",
};

struct Scenario {
  std::string name;
  std::string description;
  Chart chart;
  ConstantTable constants;
  MetricField metric;
  Matter matter;
  bool on_shell = false;
  std::vector<VectorFieldSpec> killing;
  std::vector<VectorFieldSpec> test_vectors;
  std::vector<GaugeFunction> gauge_functions;
  std::vector<std::string> witnesses;
  std::uint64_t seed = 1;
  int samples = 64;

  int dim() const { return chart.dim(); }
  bool scalar() const { return is_scalar(matter); }
  bool has_witness(std::string_view w) const;
  std::vector<Point> points() const { return chart.sample_points(samples, seed); }
  const GaugeMatter& gauge() const;
  const ScalarMatter& scalar_matter() const;
};

/// Build a scenario from JSON text without running gates.
/// Throws ParseError for malformed JSON or expressions and ConfigError for
/// structural problems (wrong counts, unknown keys or model kinds).
Scenario parse_scenario(std::string_view json_text);

/// Canonical JSON text of a scenario; parsing it yields an equal scenario.
std::string serialize(const Scenario& s);

/// Gate failures, one message per offending field (empty when all pass).
std::vector<std::string> run_gates(const Scenario& s);

/// parse_scenario followed by run_gates; throws GateError on any failure.
Scenario load_scenario(std::string_view json_text);
Scenario load_scenario_file(const std::filesystem::path& path);

/// True when the Riemann tensor vanishes at every sample point.
bool is_flat(const Scenario& s);

// Tolerances used by the load-time gates.
inline constexpr double kKillingGateTolerance = 1e-10;
inline constexpr double kOnShellGateTolerance = 1e-8;

// ---------------------------------------------------------------------------
// Built-in catalog.

struct CatalogEntry {
  std::string name;
  std::string document;  // JSON text
};

const std::vector<CatalogEntry>& catalog_documents();

/// Every catalog scenario, loaded with gates.
const std::vector<Scenario>& catalog();

/// Catalog scenario by name; throws ConfigError if unknown.
const Scenario& catalog_scenario(std::string_view name);

/// The n(n+1)/2 Killing fields of Minkowski space in cartesian coordinates
/// with signature (-, +, ..., +): n translations (constant) then the
/// rotations and boosts x_i d_j - x_j d_i.
std::vector<std::pair<std::vector<std::string>, std::string>> minkowski_killing_sources(
    const std::vector<std::string>& coordinates);

/// Five or more smooth non-Killing vector fields (polynomial, trigonometric
/// and exponential components) as expression sources.
std::vector<std::vector<std::string>> default_test_vector_sources(
    const std::vector<std::string>& coordinates);

}  // namespace emt
