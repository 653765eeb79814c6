#include "emt/cli.hpp"

#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "emt/report.hpp"

namespace emt {

namespace {

struct Options {
  std::vector<std::string> scenarios;
  std::vector<std::string> scenario_files;
  std::vector<std::string> checks;
  std::string mode = "dual";
  std::optional<double> h;
  std::vector<std::string> tol;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format;
  int halvings = 3;
  bool list = false;
  bool convergence = false;
  bool strict_gates = false;
};

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ','))
      if (!part.empty()) out.push_back(part);
  }
  return out;
}

double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ConfigError(what + ": '" + text + "' is not a number");
  return v;
}

VerifyConfig build_config(const Options& o) {
  VerifyConfig cfg;
  if (o.mode == "fd") {
    cfg.mode = DerivativeMode::fd(o.h.value_or(1e-4));
    FdScheme{cfg.mode.h, 2}.validate();
  } else if (o.h && !o.convergence) {
    throw ConfigError("--h requires --mode fd");
  }
  if (o.samples && *o.samples < 1) throw ConfigError("--samples must be at least 1");
  cfg.samples = o.samples;
  cfg.seed = o.seed;
  for (const auto& t : split_list(o.tol)) {
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      const double v = parse_double(t, "--tol");
      if (!(v > 0.0)) throw ConfigError("--tol must be positive");
      cfg.tolerance = v;
      continue;
    }
    const std::string name = t.substr(0, eq);
    check_info(name);
    const double v = parse_double(t.substr(eq + 1), "--tol " + name);
    if (!(v > 0.0)) throw ConfigError("--tol " + name + " must be positive");
    cfg.tolerance_overrides[name] = v;
  }
  for (const auto& c : split_list(o.checks)) {
    if (c != "all") check_info(c);
    cfg.checks.push_back(c);
  }
  if (std::find(cfg.checks.begin(), cfg.checks.end(), "all") != cfg.checks.end()) cfg.checks.clear();
  return cfg;
}

struct Selection {
  std::vector<Scenario> scenarios;
  std::vector<CheckReport> gate_rows;
  std::vector<std::string> gate_messages;
};

Selection select_scenarios(const Options& o) {
  Selection sel;
  auto names = split_list(o.scenarios);
  if (names.empty() && o.scenario_files.empty()) names.push_back("all");
  for (const auto& n : names) {
    if (n == "all") {
      for (const auto& s : catalog()) sel.scenarios.push_back(s);
    } else {
      sel.scenarios.push_back(catalog_scenario(n));
    }
  }
  for (const auto& path : o.scenario_files) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read scenario file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    auto s = parse_scenario(buf.str());
    const auto failures = run_gates(s);
    if (failures.empty()) {
      sel.scenarios.push_back(std::move(s));
      continue;
    }
    for (const auto& f : failures) {
      sel.gate_messages.push_back(s.name + ": " + f);
      CheckReport r;
      r.name = "gate";
      r.scenario = s.name;
      r.pass = false;
      r.note = f;
      sel.gate_rows.push_back(std::move(r));
    }
  }
  return sel;
}

void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw ConfigError("cannot write report to '" + o.out + "'");
  f << text;
}

int execute(const Options& o, std::ostream& out, std::ostream& err) {
  const std::string format = o.format.empty() ? (o.out.empty() ? "human" : "json") : o.format;

  if (o.list) {
    emit(o, format == "json" ? catalog_json(catalog()) : catalog_human(catalog()), out);
    return kExitPass;
  }

  const auto cfg = build_config(o);
  if (o.convergence && o.halvings < 3) throw ConfigError("--halvings must be at least 3");
  auto sel = select_scenarios(o);
  if (o.strict_gates && !sel.gate_messages.empty()) {
    for (const auto& m : sel.gate_messages) err << "gate failure: " << m << "\n";
    return kExitGate;
  }

  auto info = make_run_info(sel.scenarios, cfg);
  for (const auto& r : sel.gate_rows)
    if (std::find(info.scenarios.begin(), info.scenarios.end(), r.scenario) == info.scenarios.end())
      info.scenarios.push_back(r.scenario);

  if (o.convergence) {
    info.halvings = o.halvings;
    const auto steps = halving_steps(o.h.value_or(o.mode == "fd" ? cfg.mode.h : 1e-2), o.halvings);
    std::vector<ConvergenceSeries> series;
    for (const auto& s : sel.scenarios) {
      for (const auto& name : applicable_checks(s)) {
        if (!check_info(name).derivative_stage) continue;
        if (!cfg.checks.empty() && std::find(cfg.checks.begin(), cfg.checks.end(), name) == cfg.checks.end() &&
            std::find(cfg.checks.begin(), cfg.checks.end(), std::string(check_base(name))) == cfg.checks.end())
          continue;
        series.push_back(convergence_study(s, name, steps, cfg));
      }
    }
    if (series.empty()) throw ConfigError("no derivative-stage check selected for a convergence study");
    const int failed = count_failures(series) + static_cast<int>(sel.gate_rows.size());
    emit(o, format == "json" ? convergence_json(info, series) : convergence_human(info, series), out);
    if (failed > 0) {
      err << failed << " convergence series failed\n";
      return kExitFailures;
    }
    return kExitPass;
  }

  auto rows = run_suite(sel.scenarios, cfg);
  rows.insert(rows.end(), sel.gate_rows.begin(), sel.gate_rows.end());
  std::stable_sort(rows.begin(), rows.end(), [](const CheckReport& a, const CheckReport& b) {
    return std::tie(a.scenario, a.name) < std::tie(b.scenario, b.name);
  });
  if (rows.empty()) throw ConfigError("the selected checks apply to none of the selected scenarios");
  emit(o, format == "json" ? report_json(info, rows) : report_human(info, rows), out);
  const int failed = count_failures(rows);
  if (failed > 0) {
    err << failed << " check(s) failed\n";
    return kExitFailures;
  }
  return kExitPass;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Build energy-momentum tensors for a scenario catalog and verify their identities.",
               "emt-verify"};
  app.set_help_flag("--help", "print this help and exit");
  Options o;
  app.add_option("--scenario", o.scenarios, "catalog scenario name(s) or 'all' (default: all)")
      ->delimiter(',');
  app.add_option("--scenario-file", o.scenario_files, "scenario JSON document(s)");
  app.add_option("--checks", o.checks, "check names, base names or 'all'")->delimiter(',');
  app.add_option("--mode", o.mode, "outer derivative: dual or fd")->check(CLI::IsMember({"dual", "fd"}));
  app.add_option("--h", o.h, "finite-difference step (initial step for --convergence)");
  app.add_option("--tol", o.tol, "global tolerance, or check=value overrides")->delimiter(',');
  app.add_option("--samples", o.samples, "sample points per scenario");
  app.add_option("--seed", o.seed, "sampling seed");
  app.add_option("--out", o.out, "report path (default: standard output)");
  app.add_option("--format", o.format, "json or human (default: json with --out, else human)")
      ->check(CLI::IsMember({"json", "human"}));
  app.add_option("--halvings", o.halvings, "step halvings for --convergence (at least 3)");
  app.add_flag("--list", o.list, "list the scenario catalog");
  app.add_flag("--convergence", o.convergence, "run finite-difference convergence studies");
  app.add_flag("--strict-gates", o.strict_gates, "exit 3 when a scenario gate fails");

  std::vector<const char*> argv{"emt-verify"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    return execute(o, out, err);
  } catch (const GateError& e) {
    err << e.what() << "\n";
    return o.strict_gates ? kExitGate : kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, out, err);
}

}  // namespace emt
