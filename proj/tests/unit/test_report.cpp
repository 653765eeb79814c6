#include <limits>

#include <doctest.h>
#include <json.hpp>

#include "emt/report.hpp"

using namespace emt;
using nlohmann::json;

namespace {

std::vector<Scenario> two_scenarios() {
  return {catalog_scenario("minkowski-2d"), catalog_scenario("sphere-monopole")};
}

}  // namespace

TEST_CASE("json reports carry configuration, conventions and sorted rows") {
  const auto scenarios = two_scenarios();
  VerifyConfig cfg;
  cfg.checks = {"coincidence", "symmetry"};
  const auto rows = run_suite(scenarios, cfg);
  const auto info = make_run_info(scenarios, cfg);
  const auto text = report_json(info, rows);
  CHECK(text == report_json(info, run_suite(scenarios, cfg)));

  const auto doc = json::parse(text);
  CHECK(doc["run"]["config"]["mode"] == "dual");
  CHECK(doc["run"]["conventions"]["signature"]["minkowski-2d"] == "-+");
  CHECK(doc["run"]["conventions"]["signature"]["sphere-monopole"] == "++");
  CHECK(doc["run"]["conventions"].contains("riemann_convention"));
  CHECK(doc["run"]["conventions"].contains("pair_counting"));
  CHECK(doc["summary"]["failed"] == 0);
  const auto& checks = doc["checks"];
  REQUIRE(checks.size() == rows.size());
  for (std::size_t i = 1; i < checks.size(); ++i) {
    const auto prev = checks[i - 1]["scenario"].get<std::string>() + "/" + checks[i - 1]["name"].get<std::string>();
    const auto cur = checks[i]["scenario"].get<std::string>() + "/" + checks[i]["name"].get<std::string>();
    CHECK(prev < cur);
  }
  for (const auto& c : checks)
    for (const char* key : {"name", "scenario", "max_residual", "scale", "tolerance", "pass", "points", "witness"})
      CHECK(c.contains(key));
}

TEST_CASE("human reports list failures first") {
  CheckReport ok{"symmetry", "a-scenario", 0.0, 1.0, 1e-10, true, 4, false, {}, ""};
  CheckReport bad{"bianchi", "z-scenario", 1.0, 1.0, 1e-10, false, 4, false, {}, "something broke"};
  const auto text = report_human(RunInfo{}, {ok, bad});
  const auto fail = text.find("FAIL");
  const auto pass = text.find("PASS");
  REQUIRE(fail != std::string::npos);
  REQUIRE(pass != std::string::npos);
  CHECK(fail < pass);
  CHECK(text.find("something broke") != std::string::npos);
  CHECK(text.find("2 checks, 1 failed") != std::string::npos);
  CHECK(count_failures(std::vector<CheckReport>{ok, bad}) == 1);
}

TEST_CASE("non-finite residuals stay valid json") {
  CheckReport r{"bianchi", "s", std::numeric_limits<double>::infinity(), 0.0, 1e-10, false, 1, false, {}, ""};
  const auto doc = json::parse(report_json(RunInfo{}, {r}));
  CHECK(doc["checks"][0]["max_residual"] == "inf");
}

TEST_CASE("catalog listing round-trips through json") {
  const auto text = catalog_json(catalog());
  const auto doc = json::parse(text);
  CHECK(json::parse(doc.dump()) == doc);
  CHECK(doc["scenarios"].size() >= 7);
  bool found = false;
  for (const auto& s : doc["scenarios"])
    if (s["name"] == "minkowski-planewave") {
      found = true;
      CHECK(s["dimension"] == 4);
      CHECK(s["killing_count"] == 10);
    }
  CHECK(found);
  CHECK(catalog_human(catalog()).find("minkowski-planewave") != std::string::npos);
}

TEST_CASE("convergence reports write undefined orders as null") {
  ConvergenceSeries s{"killing", "x", {{0.1, 0.0, 1.0}, {0.05, 0.0, 1.0}}, {std::nullopt}, true, true};
  const auto doc = json::parse(convergence_json(RunInfo{}, {s}));
  CHECK(doc["series"][0]["orders"][0].is_null());
  CHECK(doc["series"][0]["degenerate"] == true);
  CHECK(convergence_human(RunInfo{}, {s}).find("order undefined") != std::string::npos);
}
