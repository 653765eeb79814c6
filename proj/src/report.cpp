#include "emt/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <tuple>

#include <json.hpp>

namespace emt {

using nlohmann::json;

namespace {

// Non-finite numbers have no JSON form; they are written as strings.
json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

json config_json(const RunInfo& info) {
  const auto& c = info.config;
  json j;
  j["scenarios"] = info.scenarios;
  j["checks"] = info.checks.empty() ? std::vector<std::string>{"all"} : info.checks;
  j["mode"] = c.mode.is_fd() ? "fd" : "dual";
  if (c.mode.is_fd()) j["h"] = c.mode.h;
  j["samples"] = c.samples ? json(*c.samples) : json("scenario");
  j["seed"] = c.seed ? json(*c.seed) : json("scenario");
  j["tolerance"] = c.tolerance ? json(*c.tolerance) : json("default");
  json overrides = json::object();
  for (const auto& [k, v] : c.tolerance_overrides) overrides[k] = v;
  j["tolerance_overrides"] = overrides;
  if (info.halvings > 0) j["halvings"] = info.halvings;
  return j;
}

json run_json(const RunInfo& info) {
  json conv;
  json sig = json::object();
  for (const auto& [k, v] : info.signatures) sig[k] = v;
  conv["signature"] = sig;
  conv["riemann_convention"] = std::string(RiemannValue::convention);
  conv["pair_counting"] = std::string(kPairCountingConvention);
  conv["traditional_derivative"] = std::string(kTraditionalDerivativeConvention);
  conv["units"] = kUnitsConvention;
  return json{{"config", config_json(info)}, {"conventions", conv}};
}

std::string human_header(const RunInfo& info) {
  std::ostringstream os;
  os << "mode " << (info.config.mode.is_fd() ? "fd (h = " + sci(info.config.mode.h) + ")" : std::string("dual"))
     << ", " << info.scenarios.size() << " scenario(s)\n";
  return os.str();
}

}  // namespace

RunInfo make_run_info(const std::vector<Scenario>& scenarios, const VerifyConfig& config) {
  RunInfo info;
  info.config = config;
  info.checks = config.checks;
  for (const auto& s : scenarios) {
    info.scenarios.push_back(s.name);
    info.signatures[s.name] = s.metric.signature_string();
  }
  return info;
}

int count_failures(const std::vector<CheckReport>& rows) {
  return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.pass; }));
}

int count_failures(const std::vector<ConvergenceSeries>& series) {
  return static_cast<int>(std::count_if(series.begin(), series.end(), [](const auto& r) { return !r.pass; }));
}

std::string report_json(const RunInfo& info, const std::vector<CheckReport>& rows) {
  json checks = json::array();
  for (const auto& r : rows) {
    json row{{"name", r.name},
             {"scenario", r.scenario},
             {"max_residual", number(r.max_residual)},
             {"scale", number(r.scale)},
             {"tolerance", r.tolerance},
             {"pass", r.pass},
             {"points", r.points},
             {"witness", r.witness}};
    json detail = json::object();
    for (const auto& [k, v] : r.detail) detail[k] = number(v);
    row["detail"] = detail;
    if (!r.note.empty()) row["note"] = r.note;
    checks.push_back(std::move(row));
  }
  const int failed = count_failures(rows);
  json doc{{"run", run_json(info)},
           {"summary", {{"total", rows.size()}, {"failed", failed}, {"pass", failed == 0}}},
           {"checks", checks}};
  return doc.dump(2) + "\n";
}

std::string report_human(const RunInfo& info, const std::vector<CheckReport>& rows) {
  std::vector<const CheckReport*> order;
  for (const auto& r : rows) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [](const CheckReport* a, const CheckReport* b) {
    return std::make_tuple(a->pass, a->scenario, a->name) < std::make_tuple(b->pass, b->scenario, b->name);
  });
  std::size_t ws = 8;
  std::size_t wc = 5;
  for (const auto* r : order) {
    ws = std::max(ws, r->scenario.size());
    wc = std::max(wc, r->name.size());
  }
  std::ostringstream os;
  os << human_header(info);
  char line[512];
  std::snprintf(line, sizeof line, "%-6s %-*s %-*s %11s %11s %11s %6s %s\n", "status", static_cast<int>(ws),
                "scenario", static_cast<int>(wc), "check", "residual", "scale", "tolerance", "points", "kind");
  os << line;
  for (const auto* r : order) {
    std::snprintf(line, sizeof line, "%-6s %-*s %-*s %11s %11s %11s %6d %s", r->pass ? "PASS" : "FAIL",
                  static_cast<int>(ws), r->scenario.c_str(), static_cast<int>(wc), r->name.c_str(),
                  sci(r->max_residual).c_str(), sci(r->scale).c_str(), sci(r->tolerance).c_str(), r->points,
                  r->witness ? "witness" : "bound");
    os << line;
    if (!r->note.empty()) os << "  " << r->note;
    os << "\n";
  }
  const int failed = count_failures(rows);
  os << rows.size() << " checks, " << failed << " failed\n";
  return os.str();
}

std::string convergence_json(const RunInfo& info, const std::vector<ConvergenceSeries>& series) {
  json out = json::array();
  for (const auto& s : series) {
    json steps = json::array();
    for (const auto& st : s.steps)
      steps.push_back({{"h", st.h}, {"residual", number(st.residual)}, {"scale", number(st.scale)}});
    json orders = json::array();
    for (const auto& o : s.orders) orders.push_back(o ? json(*o) : json(nullptr));
    out.push_back({{"check", s.check},
                   {"scenario", s.scenario},
                   {"steps", steps},
                   {"orders", orders},
                   {"expected_order", 2.0},
                   {"order_window", {kOrderLow, kOrderHigh}},
                   {"degenerate", s.degenerate},
                   {"pass", s.pass}});
  }
  const int failed = count_failures(series);
  json doc{{"run", run_json(info)},
           {"summary", {{"total", series.size()}, {"failed", failed}, {"pass", failed == 0}}},
           {"series", out}};
  return doc.dump(2) + "\n";
}

std::string convergence_human(const RunInfo& info, const std::vector<ConvergenceSeries>& series) {
  std::ostringstream os;
  os << human_header(info);
  char line[256];
  for (const auto& s : series) {
    os << (s.pass ? "PASS " : "FAIL ") << s.scenario << " " << s.check;
    if (s.degenerate) os << " (residual at rounding level; order undefined)";
    os << "\n";
    std::snprintf(line, sizeof line, "  %11s %11s %11s %7s\n", "h", "residual", "scale", "order");
    os << line;
    for (std::size_t k = 0; k < s.steps.size(); ++k) {
      const auto& st = s.steps[k];
      std::string order = "-";
      if (k > 0 && s.orders[k - 1]) {
        char b[16];
        std::snprintf(b, sizeof b, "%.3f", *s.orders[k - 1]);
        order = b;
      }
      std::snprintf(line, sizeof line, "  %11s %11s %11s %7s\n", sci(st.h).c_str(), sci(st.residual).c_str(),
                    sci(st.scale).c_str(), order.c_str());
      os << line;
    }
  }
  os << series.size() << " series, " << count_failures(series) << " failed\n";
  return os.str();
}

std::string catalog_json(const std::vector<Scenario>& scenarios) {
  json out = json::array();
  for (const auto& s : scenarios) {
    out.push_back({{"name", s.name},
                   {"description", s.description},
                   {"dimension", s.dim()},
                   {"signature", s.metric.signature_string()},
                   {"model", matter_model_kind(s.matter)},
                   {"field", s.scalar() ? "scalar" : "gauge"},
                   {"on_shell", s.on_shell},
                   {"killing_count", s.killing.size()},
                   {"test_vector_count", s.test_vectors.size()},
                   {"witnesses", s.witnesses}});
  }
  return json{{"scenarios", out}}.dump(2) + "\n";
}

std::string catalog_human(const std::vector<Scenario>& scenarios) {
  std::size_t wn = 4;
  for (const auto& s : scenarios) wn = std::max(wn, s.name.size());
  std::ostringstream os;
  char line[512];
  std::snprintf(line, sizeof line, "%-*s %3s %-9s %-16s %-8s %7s  %s\n", static_cast<int>(wn), "name", "dim",
                "signature", "model", "on-shell", "killing", "description");
  os << line;
  for (const auto& s : scenarios) {
    std::snprintf(line, sizeof line, "%-*s %3d %-9s %-16s %-8s %7zu  %s\n", static_cast<int>(wn), s.name.c_str(),
                  s.dim(), s.metric.signature_string().c_str(), matter_model_kind(s.matter).c_str(),
                  s.on_shell ? "yes" : "no", s.killing.size(), s.description.c_str());
    os << line;
  }
  return os.str();
}

}  // namespace emt
