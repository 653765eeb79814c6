#pragma once

// Report rendering: JSON documents carrying the run configuration and the
// conventions in force, and a fixed-width table for logs.

#include <map>
#include <string>
#include <vector>

#include "emt/verify.hpp"

namespace emt {

/// Echo of what was run, written into every report.
struct RunInfo {
  std::vector<std::string> scenarios;
  std::vector<std::string> checks;  // as requested; empty means all
  VerifyConfig config;
  std::map<std::string, std::string> signatures;  // scenario -> "-+++"
  int halvings = 0;                               // convergence runs only
};

RunInfo make_run_info(const std::vector<Scenario>& scenarios, const VerifyConfig& config);

inline constexpr const char* kUnitsConvention =
    "geometric units G = c = 1; mostly-plus signature for Lorentzian charts; "
    "Maxwell reference L = -1/4 F_ab F^ab";

/// Number of rows with pass == false.
int count_failures(const std::vector<CheckReport>& rows);
int count_failures(const std::vector<ConvergenceSeries>& series);

std::string report_json(const RunInfo& info, const std::vector<CheckReport>& rows);

/// Fixed-width table, failing rows first, each group sorted by (scenario, check).
std::string report_human(const RunInfo& info, const std::vector<CheckReport>& rows);

std::string convergence_json(const RunInfo& info, const std::vector<ConvergenceSeries>& series);
std::string convergence_human(const RunInfo& info, const std::vector<ConvergenceSeries>& series);

/// Catalog listing with dimension, signature, model and Killing count.
std::string catalog_json(const std::vector<Scenario>& scenarios);
std::string catalog_human(const std::vector<Scenario>& scenarios);

}  // namespace emt
