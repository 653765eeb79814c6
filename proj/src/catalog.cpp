#include <sstream>

#include <json.hpp>

#include "emt/scenarios.hpp"

namespace emt {

using nlohmann::json;

std::vector<std::pair<std::vector<std::string>, std::string>> minkowski_killing_sources(
    const std::vector<std::string>& coords) {
  const std::size_t n = coords.size();
  std::vector<std::pair<std::vector<std::string>, std::string>> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> c(n, "0");
    c[i] = "1";
    out.emplace_back(std::move(c), "translation-" + coords[i]);
  }
  // xi^i = eta^ii x^j, xi^j = -eta^jj x^i for the pair (i, j); index 0 is timelike.
  auto eta = [](std::size_t k) { return k == 0 ? -1 : 1; };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      std::vector<std::string> c(n, "0");
      c[i] = eta(i) > 0 ? coords[j] : "-" + coords[j];
      c[j] = eta(j) > 0 ? "-" + coords[i] : coords[i];
      const bool boost = eta(i) * eta(j) < 0;
      out.emplace_back(std::move(c),
                       std::string(boost ? "boost-" : "rotation-") + coords[i] + "-" + coords[j]);
    }
  return out;
}

std::vector<std::vector<std::string>> default_test_vector_sources(
    const std::vector<std::string>& c) {
  const std::size_t n = c.size();
  auto next = [&](std::size_t a) { return c[(a + 1) % n]; };
  std::vector<std::vector<std::string>> out(5, std::vector<std::string>(n, "0"));
  out[0][0] = c[1];
  out[0][1] = "sin(" + c[0] + ")";
  for (std::size_t a = 0; a < n; ++a) {
    out[1][a] = c[a] + "*" + next(a);
    out[2][a] = "cos(" + next(a) + ") + 0.5*sin(" + c[a] + ")";
    std::ostringstream coef;
    coef << 0.2 * static_cast<double>(a + 1);
    out[3][a] = coef.str() + "*exp(0.3*" + c[a] + ")";
    out[4][a] = a == 0 ? "1 + " + c[0] + "^2" : "0.5*" + c[n - 1] + "*" + c[a];
  }
  return out;
}

namespace {

struct Doc {
  json j;

  Doc(const std::string& name, const std::string& description, std::vector<std::string> coords,
      const std::string& signature) {
    j["name"] = name;
    j["description"] = description;
    j["dimension"] = coords.size();
    j["signature"] = signature;
    j["coordinates"] = coords;
    j["seed"] = 1;
    j["samples"] = 64;
  }

  std::vector<std::string> coords() const { return j["coordinates"].get<std::vector<std::string>>(); }

  Doc& metric(const json& comps) {
    j["metric"] = {{"components", comps}};
    return *this;
  }
  Doc& potential(std::vector<std::string> a) {
    j["potential"] = {{"components", a}};
    return *this;
  }
  Doc& scalar(const std::string& phi) {
    j["scalar_field"] = phi;
    return *this;
  }
  Doc& model(const std::string& kind, json params = json::object()) {
    j["model"] = {{"kind", kind}, {"params", params}};
    return *this;
  }
  Doc& on_shell(bool v) {
    j["on_shell"] = v;
    return *this;
  }
  Doc& constants(json c) {
    j["constants"] = std::move(c);
    return *this;
  }
  Doc& domain(json d) {
    j["domain"] = std::move(d);
    return *this;
  }
  Doc& ranges(json r) {
    j["sample_ranges"] = std::move(r);
    return *this;
  }
  Doc& killing(const std::vector<std::string>& comps, const std::string& kind, const std::string& label) {
    j["killing"].push_back({{"components", comps}, {"kind", kind}, {"label", label}});
    return *this;
  }
  Doc& minkowski_killing() {
    for (const auto& [comps, label] : minkowski_killing_sources(coords())) {
      const bool constant = label.rfind("translation-", 0) == 0;
      killing(comps, constant ? "constant" : "killing-candidate", label);
    }
    return *this;
  }
  Doc& spherical_killing(bool time_translation = true) {
    const auto c = coords();
    const std::size_t n = c.size();
    const std::size_t th = n - 2;
    auto vec = [&](std::string a_th, std::string a_ph) {
      std::vector<std::string> v(n, "0");
      v[th] = std::move(a_th);
      v[th + 1] = std::move(a_ph);
      return v;
    };
    if (time_translation) {
      std::vector<std::string> t(n, "0");
      t[0] = "1";
      killing(t, "constant", "translation-t");
    }
    killing(vec("0", "1"), "killing-candidate", "rotation-z");
    killing(vec("-sin(ph)", "-cos(ph)*cos(th)/sin(th)"), "killing-candidate", "rotation-x");
    killing(vec("cos(ph)", "-sin(ph)*cos(th)/sin(th)"), "killing-candidate", "rotation-y");
    return *this;
  }
  Doc& test_vectors() {
    const auto vs = default_test_vector_sources(coords());
    for (std::size_t i = 0; i < vs.size(); ++i)
      j["test_vectors"].push_back({{"components", vs[i]}, {"label", "test-" + std::to_string(i)}});
    return *this;
  }
  Doc& gauge(const std::string& expr, const std::string& label) {
    j["gauge_functions"].push_back({{"expr", expr}, {"label", label}});
    return *this;
  }
  Doc& witness(const std::string& w) {
    j["witnesses"].push_back(w);
    return *this;
  }
  CatalogEntry entry() const { return {j["name"].get<std::string>(), j.dump(2) + "\n"}; }
};

json minkowski_metric(std::size_t n) {
  json m = json::object();
  for (std::size_t a = 0; a < n; ++a) m[std::to_string(a) + std::to_string(a)] = a == 0 ? "-1" : "1";
  return m;
}

const json kSchwarzschildMetric = {
    {"tt", "-(1 - 2*M/r)"}, {"rr", "1/(1 - 2*M/r)"}, {"thth", "r^2"}, {"phph", "r^2*sin(th)^2"}};

const json kSphericalFlatMetric = {{"tt", "-1"}, {"rr", "1"}, {"thth", "r^2"}, {"phph", "r^2*sin(th)^2"}};

const json kPolarRange = {0.4, 2.741592653589793};

std::vector<CatalogEntry> build() {
  std::vector<CatalogEntry> out;
  const std::vector<std::string> txyz = {"t", "x", "y", "z"};
  const std::vector<std::string> sph = {"t", "r", "th", "ph"};
  const json polar_domain = {{"th", {0.0, 3.141592653589793}}};

  out.push_back(Doc("minkowski-planewave", "Maxwell plane wave on 4d Minkowski", txyz, "-+++")
                    .metric(minkowski_metric(4))
                    .potential({"0", "0", "a*cos(k*(t - x))", "0"})
                    .constants({{"a", 0.5}, {"k", 1.3}})
                    .model("maxwell")
                    .on_shell(true)
                    .minkowski_killing()
                    .test_vectors()
                    .gauge("0.4*t*x + 0.3*sin(y)*z", "chi-polynomial-trig")
                    .gauge("0.2*exp(0.5*x)*cos(t)", "chi-exp")
                    .entry());

  out.push_back(Doc("minkowski-constant-e", "uniform electric field F_tx = E in a non-temporal gauge",
                    txyz, "-+++")
                    .metric(minkowski_metric(4))
                    .potential({"E*y", "E*t", "E*t", "0"})
                    .constants({{"E", 0.8}})
                    .model("maxwell")
                    .on_shell(true)
                    .minkowski_killing()
                    .test_vectors()
                    .gauge("E*t*x", "chi-txE")
                    .gauge("0.3*sin(x)*cos(y) + 0.1*t*z", "chi-trig")
                    .witness("trad-asymmetry")
                    .witness("trad-gauge")
                    .witness("trad-rotation")
                    .entry());

  out.push_back(Doc("minkowski-constant-b", "uniform magnetic field F_xy = B, quartic model", txyz, "-+++")
                    .metric(minkowski_metric(4))
                    .potential({"0", "0", "B*x", "0"})
                    .constants({{"B", 0.6}})
                    .model("quartic", {{"lambda", 0.05}})
                    .on_shell(true)
                    .minkowski_killing()
                    .test_vectors()
                    .gauge("0.5*x*y - 0.2*t^2", "chi-quadratic")
                    .entry());

  {
    Doc d("minkowski-coulomb-spherical", "Coulomb field on Minkowski in spherical coordinates", sph, "-+++");
    d.metric(kSphericalFlatMetric)
        .potential({"q/r", "0", "0", "0"})
        .constants({{"q", 0.5}})
        .domain({{"r", {0.0, nullptr}}, {"th", {0.0, 3.141592653589793}}})
        .ranges({{"t", {-1.0, 1.0}}, {"r", {1.0, 3.0}}, {"th", kPolarRange}, {"ph", {-3.0, 3.0}}})
        .model("maxwell")
        .on_shell(true)
        .spherical_killing();
    const std::string sx = "sin(th)*cos(ph)", sy = "sin(th)*sin(ph)";
    d.killing({"0", sx, "cos(th)*cos(ph)/r", "-sin(ph)/(r*sin(th))"}, "killing-candidate", "translation-x")
        .killing({"0", sy, "cos(th)*sin(ph)/r", "cos(ph)/(r*sin(th))"}, "killing-candidate", "translation-y")
        .killing({"0", "cos(th)", "-sin(th)/r", "0"}, "killing-candidate", "translation-z")
        .killing({"r*" + sx, "t*" + sx, "t*cos(th)*cos(ph)/r", "-t*sin(ph)/(r*sin(th))"},
                 "killing-candidate", "boost-x")
        .killing({"r*" + sy, "t*" + sy, "t*cos(th)*sin(ph)/r", "t*cos(ph)/(r*sin(th))"},
                 "killing-candidate", "boost-y")
        .killing({"r*cos(th)", "t*cos(th)", "-t*sin(th)/r", "0"}, "killing-candidate", "boost-z")
        .test_vectors()
        .gauge("0.3*t*r", "chi-tr")
        .gauge("0.2*cos(th)*sin(ph)", "chi-angular");
    out.push_back(d.entry());
  }

  out.push_back(Doc("minkowski-2d", "uniform field on 2d Minkowski, Born-Infeld", {"t", "x"}, "-+")
                    .metric(minkowski_metric(2))
                    .potential({"0", "E*t"})
                    .constants({{"E", 0.5}})
                    .model("born-infeld", {{"beta", 2.0}})
                    .on_shell(true)
                    .minkowski_killing()
                    .test_vectors()
                    .gauge("0.3*t*x^2", "chi-cubic")
                    .entry());

  out.push_back(Doc("minkowski-3d-planewave", "null plane wave on 3d Minkowski, Born-Infeld",
                    {"t", "x", "y"}, "-++")
                    .metric(minkowski_metric(3))
                    .potential({"0", "0", "0.4*sin(1.1*(t - x))"})
                    .model("born-infeld", {{"beta", 1.5}})
                    .on_shell(true)
                    .minkowski_killing()
                    .test_vectors()
                    .gauge("0.25*sin(t + y)", "chi-trig")
                    .entry());

  out.push_back(Doc("minkowski-5d-planewave", "null plane wave on 5d Minkowski, quartic model",
                    {"t", "x", "y", "z", "w"}, "-++++")
                    .metric(minkowski_metric(5))
                    .potential({"0", "0", "0", "0.3*cos(0.9*(t - x)) + 0.2*sin(0.7*(t - x))", "0"})
                    .model("quartic", {{"lambda", 0.1}})
                    .on_shell(true)
                    .minkowski_killing()
                    .test_vectors()
                    .gauge("0.2*w*t + 0.1*y^2", "chi-quadratic")
                    .entry());

  out.push_back(Doc("schwarzschild-coulomb", "Coulomb test field on the Schwarzschild exterior", sph, "-+++")
                    .metric(kSchwarzschildMetric)
                    .potential({"q/r", "0", "0", "0"})
                    .constants({{"M", 1.0}, {"q", 0.1}})
                    .domain({{"r", {2.5, nullptr}}, {"th", {0.0, 3.141592653589793}}})
                    .ranges({{"t", {-1.0, 1.0}}, {"r", {3.0, 12.0}}, {"th", kPolarRange}, {"ph", {-3.0, 3.0}}})
                    .model("maxwell")
                    .on_shell(true)
                    .spherical_killing()
                    .test_vectors()
                    .gauge("0.2*t*r", "chi-tr")
                    .gauge("0.1*sin(th)*cos(ph)", "chi-angular")
                    .witness("curvature-obstruction")
                    .entry());

  out.push_back(Doc("de-sitter-random", "random off-shell potential on the de Sitter static patch", sph, "-+++")
                    .metric({{"tt", "-(1 - r^2/l^2)"}, {"rr", "1/(1 - r^2/l^2)"}, {"thth", "r^2"},
                             {"phph", "r^2*sin(th)^2"}})
                    .potential({"0.3*sin(r)*cos(t) + 0.1*r^2", "0.2*cos(th)*t + 0.1*r*ph",
                                "0.15*r*sin(ph) + 0.05*t^2", "0.1*r^2*sin(th)^2*cos(t)"})
                    .constants({{"l", 2.0}})
                    .domain({{"r", {0.0, 2.0}}, {"th", {0.0, 3.141592653589793}}})
                    .ranges({{"t", {-1.0, 1.0}}, {"r", {0.3, 1.5}}, {"th", kPolarRange}, {"ph", {-3.0, 3.0}}})
                    .model("born-infeld", {{"beta", 2.0}})
                    .on_shell(false)
                    .spherical_killing()
                    .test_vectors()
                    .gauge("0.3*t*r^2 + 0.1*cos(th)", "chi-mixed")
                    .entry());

  out.push_back(Doc("sphere-monopole", "monopole field on the unit 2-sphere, Born-Infeld", {"th", "ph"}, "++")
                    .metric({{"thth", "1"}, {"phph", "sin(th)^2"}})
                    .potential({"0", "g*(1 - cos(th))"})
                    .constants({{"g", 0.7}})
                    .domain(polar_domain)
                    .ranges({{"th", kPolarRange}, {"ph", {-3.0, 3.0}}})
                    .model("born-infeld", {{"beta", 1.5}})
                    .on_shell(true)
                    .spherical_killing(false)
                    .test_vectors()
                    .gauge("0.3*cos(th)*sin(ph)", "chi-angular")
                    .entry());

  out.push_back(Doc("conformal-2d-noniso", "constant-invariant field on a 2d metric with no isometry",
                    {"t", "x"}, "-+")
                    .metric({{"tt", "-(1 + 0.3*sin(t)*cos(x))"}, {"xx", "1 + 0.3*sin(t)*cos(x)"}})
                    .potential({"0", "E*(t - 0.3*cos(t)*cos(x))"})
                    .constants({{"E", 0.5}})
                    .model("born-infeld", {{"beta", 2.0}})
                    .on_shell(true)
                    .test_vectors()
                    .gauge("0.2*t*x", "chi-tx")
                    .entry());

  out.push_back(Doc("scalar-wave", "superposed massless scalar plane waves on 4d Minkowski", txyz, "-+++")
                    .metric(minkowski_metric(4))
                    .scalar("0.5*sin(1.2*(t - x)) + 0.3*cos(0.8*(t - y)) + 0.2*sin(0.6*(t + z))")
                    .model("scalar-massless")
                    .on_shell(true)
                    .minkowski_killing()
                    .test_vectors()
                    .entry());

  out.push_back(Doc("schwarzschild-scalar", "static massless scalar on the Schwarzschild exterior", sph, "-+++")
                    .metric(kSchwarzschildMetric)
                    .scalar("c*log(1 - 2*M/r)")
                    .constants({{"M", 1.0}, {"c", 0.3}})
                    .domain({{"r", {2.5, nullptr}}, {"th", {0.0, 3.141592653589793}}})
                    .ranges({{"t", {-1.0, 1.0}}, {"r", {3.0, 12.0}}, {"th", kPolarRange}, {"ph", {-3.0, 3.0}}})
                    .model("scalar-massless")
                    .on_shell(true)
                    .spherical_killing()
                    .test_vectors()
                    .entry());
  return out;
}

}  // namespace

const std::vector<CatalogEntry>& catalog_documents() {
  static const std::vector<CatalogEntry> docs = build();
  return docs;
}

const std::vector<Scenario>& catalog() {
  static const std::vector<Scenario> all = [] {
    std::vector<Scenario> out;
    for (const auto& e : catalog_documents()) out.push_back(load_scenario(e.document));
    return out;
  }();
  return all;
}

const Scenario& catalog_scenario(std::string_view name) {
  for (const auto& s : catalog())
    if (s.name == name) return s;
  throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

}  // namespace emt
