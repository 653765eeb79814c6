#include <doctest.h>

#include "emt/verify.hpp"
#include "generators.hpp"
#include "scenario_docs.hpp"

using namespace emt;
using nlohmann::json;

namespace {

std::vector<std::string> gate_failures(const json& doc) {
  try {
    load_scenario(doc.dump());
  } catch (const GateError& e) {
    return e.failures();
  }
  return {};
}

bool mentions(const std::vector<std::string>& failures, const std::string& needle) {
  for (const auto& f : failures)
    if (f.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("catalog holds at least seven gated scenarios") {
  const auto& cat = catalog();
  CHECK(cat.size() >= 7);
  for (const auto& s : cat) {
    CAPTURE(s.name);
    CHECK(run_gates(s).empty());
    CHECK(s.test_vectors.size() >= 5);
  }
  CHECK(catalog_scenario("minkowski-planewave").killing.size() == 10);
  CHECK(catalog_scenario("schwarzschild-coulomb").killing.size() == 4);
  CHECK(catalog_scenario("minkowski-5d-planewave").killing.size() == 15);
  CHECK_THROWS_AS(catalog_scenario("missing-name"), ConfigError);
}

TEST_CASE("flatness is detected numerically") {
  CHECK(is_flat(catalog_scenario("minkowski-planewave")));
  CHECK(is_flat(catalog_scenario("minkowski-coulomb-spherical")));
  CHECK_FALSE(is_flat(catalog_scenario("schwarzschild-coulomb")));
  CHECK_FALSE(is_flat(catalog_scenario("sphere-monopole")));
}

TEST_CASE("serialization round-trips every catalog scenario") {
  for (const auto& s : catalog()) {
    CAPTURE(s.name);
    const auto text = serialize(s);
    const auto again = parse_scenario(text);
    CHECK(serialize(again) == text);
    CHECK(again.killing.size() == s.killing.size());
    CHECK(again.metric.signature() == s.metric.signature());
  }
}

TEST_CASE("a redeclared catalog document yields identical reports") {
  const auto& ref = catalog_scenario("minkowski-planewave");
  const auto copy = load_scenario(docs::catalog_doc("minkowski-planewave").dump(4));
  const auto a = run_checks(ref);
  const auto b = run_checks(copy);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].name == b[i].name);
    CHECK(a[i].max_residual == b[i].max_residual);
    CHECK(a[i].scale == b[i].scale);
    CHECK(a[i].pass == b[i].pass);
  }
}

TEST_CASE("metric components accept digit and coordinate-name keys") {
  auto j = docs::coulomb();
  j["metric"]["components"] = {{"00", "-1"}, {"rr", "1"}, {"thth", "r^2"}, {"33", "r^2*sin(th)^2"}};
  const auto s = load_scenario(j.dump());
  const std::vector<double> x{0.0, 2.0, 1.0, 0.0};
  CHECK(s.metric.at<double>(x)(2, 2) == doctest::Approx(4.0));
}

TEST_CASE("malformed documents are parse errors with a position") {
  try {
    parse_scenario("{\"name\": \"x\", ");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() > 0);
  }
  auto j = docs::coulomb();
  j["potential"]["components"][0] = "q/(r";
  CHECK_THROWS_AS(parse_scenario(j.dump()), ParseError);
}

TEST_CASE("structural problems are configuration errors") {
  auto extra = docs::coulomb();
  extra["colour"] = "blue";
  CHECK_THROWS_WITH_AS(parse_scenario(extra.dump()), doctest::Contains("colour"), ConfigError);

  auto count = docs::coulomb();
  count["potential"]["components"].erase(3);
  CHECK_THROWS_AS(parse_scenario(count.dump()), ConfigError);

  auto lower = docs::coulomb();
  lower["metric"]["components"]["10"] = "0";
  CHECK_THROWS_AS(parse_scenario(lower.dump()), ConfigError);

  auto model = docs::coulomb();
  model["model"] = {{"kind", "user-composite"}};
  CHECK_THROWS_AS(parse_scenario(model.dump()), ConfigError);

  auto witness = docs::coulomb();
  witness["witnesses"] = {"no-such-witness"};
  CHECK_THROWS_AS(parse_scenario(witness.dump()), ConfigError);
}

TEST_CASE("the dilation r d_r is rejected as a Killing field") {
  auto j = docs::coulomb();
  j["killing"].push_back({{"components", {"0", "r", "0", "0"}}, {"kind", "killing-candidate"}, {"label", "dilation"}});
  CHECK(mentions(gate_failures(j), "dilation"));
}

TEST_CASE("a constant-kind field that varies is rejected") {
  auto j = docs::catalog_doc("minkowski-planewave");
  j["killing"][0]["components"][0] = "1 + 0*t + x";
  j["killing"][0]["kind"] = "constant";
  CHECK_FALSE(gate_failures(j).empty());
}

TEST_CASE("an off-shell potential declared on-shell is rejected") {
  auto j = docs::coulomb();
  j["potential"]["components"][0] = "q/r^2";
  CHECK(mentions(gate_failures(j), "on_shell"));
  j["on_shell"] = false;
  CHECK(gate_failures(j).empty());
}

TEST_CASE("metric gates catch a wrong signature and a degenerate metric") {
  auto sig = docs::coulomb();
  sig["signature"] = "++++";
  CHECK(mentions(gate_failures(sig), "metric"));

  auto degenerate = docs::coulomb();
  degenerate["metric"]["components"] = {{"tt", "-1"}, {"rr", "0"}, {"thth", "r^2"}, {"phph", "r^2*sin(th)^2"}};
  CHECK(mentions(gate_failures(degenerate), "metric"));
}

TEST_CASE("catalog test vectors are not Killing fields") {
  for (const auto& s : catalog()) {
    CAPTURE(s.name);
    for (const auto& v : s.test_vectors) {
      CAPTURE(v.label);
      double worst = 0.0;
      for (const auto& x : s.points()) worst = std::max(worst, max_abs(killing_residual(s.metric, v, x)));
      CHECK(worst > 1e-3);
    }
  }
}

TEST_CASE("minkowski isometries in every dimension") {
  for (int n = 2; n <= 6; ++n) {
    std::vector<std::string> coords;
    for (int i = 0; i < n; ++i) coords.push_back("x" + std::to_string(i));
    const auto sources = minkowski_killing_sources(coords);
    CHECK(sources.size() == static_cast<std::size_t>(n * (n + 1) / 2));
    std::vector<std::string> diag(static_cast<std::size_t>(n), "1");
    diag[0] = "-1";
    std::vector<int> sig(static_cast<std::size_t>(n), 1);
    sig[0] = -1;
    const auto m = MetricField::diagonal(parse_all(diag, coords), sig);
    gen::Gen g(static_cast<std::uint64_t>(n));
    const auto x = g.point(n);
    for (const auto& [comps, label] : sources)
      CHECK(max_abs(killing_residual(m, VectorFieldSpec{parse_all(comps, coords), VectorKind::arbitrary, label}, x)) ==
            0.0);
  }
}
