#include "emt/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace emt {

using nlohmann::json;

bool Scenario::has_witness(std::string_view w) const {
  return std::find(witnesses.begin(), witnesses.end(), w) != witnesses.end();
}

const GaugeMatter& Scenario::gauge() const {
  if (const auto* g = std::get_if<GaugeMatter>(&matter)) return *g;
  throw ConfigError("scenario '" + name + "' carries a scalar field, not a gauge potential");
}

const ScalarMatter& Scenario::scalar_matter() const {
  if (const auto* s = std::get_if<ScalarMatter>(&matter)) return *s;
  throw ConfigError("scenario '" + name + "' carries a gauge potential, not a scalar field");
}

namespace {

const std::set<std::string, std::less<>> kTopLevelKeys = {
    "name",         "description", "dimension", "signature", "coordinates",
    "domain",       "sample_ranges", "constants", "metric",  "potential",
    "scalar_field", "model",       "on_shell",  "killing",   "test_vectors",
    "gauge_functions", "witnesses", "seed",     "samples",
};

[[noreturn]] void bad(const std::string& field, const std::string& msg) {
  throw ConfigError(field + ": " + msg);
}

const json& require(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) bad(key, "missing required field");
  return *it;
}

std::string as_string(const json& j, const std::string& field) {
  if (!j.is_string()) bad(field, "expected a string");
  return j.get<std::string>();
}

double as_number(const json& j, const std::string& field) {
  if (!j.is_number()) bad(field, "expected a number");
  return j.get<double>();
}

std::vector<int> parse_signature(const json& j, int n) {
  std::vector<int> sig;
  if (j.is_string()) {
    for (char c : j.get<std::string>()) {
      if (c == '-') sig.push_back(-1);
      else if (c == '+') sig.push_back(1);
      else bad("signature", std::string("unexpected character '") + c + "'");
    }
  } else if (j.is_array()) {
    for (const auto& e : j) {
      if (!e.is_number_integer() || (e.get<int>() != 1 && e.get<int>() != -1))
        bad("signature", "entries must be +1 or -1");
      sig.push_back(e.get<int>());
    }
  } else {
    bad("signature", "expected a string like \"-+++\" or an array of +1/-1");
  }
  if (static_cast<int>(sig.size()) != n)
    bad("signature", "has " + std::to_string(sig.size()) + " entries, dimension is " + std::to_string(n));
  return sig;
}

std::optional<double> bound(const json& j, const std::string& field) {
  if (j.is_null()) return std::nullopt;
  return as_number(j, field);
}

int coordinate_index(const std::vector<std::string>& coords, std::string_view name) {
  for (std::size_t i = 0; i < coords.size(); ++i)
    if (coords[i] == name) return static_cast<int>(i);
  return -1;
}

std::vector<Interval> parse_boxes(const json* j, const std::vector<std::string>& coords,
                                  const char* field, Interval fallback) {
  std::vector<Interval> out(coords.size(), fallback);
  if (!j) return out;
  if (!j->is_object()) bad(field, "expected an object keyed by coordinate name");
  for (const auto& [key, val] : j->items()) {
    const int i = coordinate_index(coords, key);
    const std::string f = std::string(field) + "." + key;
    if (i < 0) bad(f, "unknown coordinate");
    if (!val.is_array() || val.size() != 2) bad(f, "expected [lower, upper]");
    out[static_cast<std::size_t>(i)] = Interval{bound(val[0], f), bound(val[1], f)};
  }
  return out;
}

std::pair<int, int> metric_key(const std::string& key, const std::vector<std::string>& coords) {
  const int n = static_cast<int>(coords.size());
  const std::string field = "metric.components." + key;
  std::optional<std::pair<int, int>> found;
  if (key.size() == 2 && std::isdigit(static_cast<unsigned char>(key[0])) &&
      std::isdigit(static_cast<unsigned char>(key[1]))) {
    found = std::pair{key[0] - '0', key[1] - '0'};
    if (found->first >= n || found->second >= n) bad(field, "index out of range");
  } else {
    for (std::size_t split = 1; split < key.size(); ++split) {
      const int a = coordinate_index(coords, std::string_view(key).substr(0, split));
      const int b = coordinate_index(coords, std::string_view(key).substr(split));
      if (a >= 0 && b >= 0) {
        if (found) bad(field, "ambiguous coordinate pair");
        found = std::pair{a, b};
      }
    }
    if (!found) bad(field, "key must be two digits or two coordinate names");
  }
  if (found->first > found->second) bad(field, "only components with a <= b may be given");
  return *found;
}

std::vector<SmoothMap> parse_components(const json& j, const Scenario& s, const std::string& field) {
  if (!j.is_array()) bad(field, "expected an array of expressions");
  if (static_cast<int>(j.size()) != s.dim())
    bad(field, "has " + std::to_string(j.size()) + " components, dimension is " + std::to_string(s.dim()));
  std::vector<SmoothMap> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto src = as_string(j[i], field + "[" + std::to_string(i) + "]");
    out.push_back(SmoothMap::parse(src, s.chart.coordinates(), s.constants));
  }
  return out;
}

VectorFieldSpec parse_vector(const json& j, const Scenario& s, const std::string& field,
                             VectorKind default_kind, std::size_t index) {
  VectorFieldSpec v;
  v.kind = default_kind;
  v.label = field + "[" + std::to_string(index) + "]";
  if (j.is_array()) {
    v.components = parse_components(j, s, field);
    return v;
  }
  if (!j.is_object()) bad(field, "expected an object or an array of expressions");
  v.components = parse_components(require(j, "components"), s, field + ".components");
  if (auto it = j.find("kind"); it != j.end()) {
    try {
      v.kind = vector_kind_from_string(as_string(*it, field + ".kind"));
    } catch (const ConfigError& e) {
      bad(field + ".kind", e.what());
    }
  }
  if (auto it = j.find("label"); it != j.end()) v.label = as_string(*it, field + ".label");
  return v;
}

std::map<std::string, double> numeric_params(const json& params, const std::string& kind) {
  std::map<std::string, double> out;
  for (const auto& [k, v] : params.items()) {
    if (v.is_number()) out[k] = v.get<double>();
    else if (!(kind == "power-series" && k == "coeffs"))
      bad("model.params." + k, "expected a number");
  }
  return out;
}

double param(const std::map<std::string, double>& p, const char* key, const std::string& kind) {
  auto it = p.find(key);
  if (it == p.end()) bad("model.params", "'" + kind + "' requires parameter '" + key + "'");
  return it->second;
}

void check_params(const std::map<std::string, double>& p, std::initializer_list<const char*> allowed,
                  const std::string& kind) {
  for (const auto& [k, v] : p) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }))
      bad("model.params." + k, "not a parameter of '" + kind + "'");
  }
}

}  // namespace

Scenario parse_scenario(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed scenario JSON: ") + e.what(), e.byte);
  }
  if (!doc.is_object()) throw ConfigError("scenario document must be a JSON object");
  for (const auto& [k, v] : doc.items()) {
    if (!kTopLevelKeys.contains(k)) bad(k, "unknown field");
  }

  Scenario s;
  s.name = as_string(require(doc, "name"), "name");
  if (auto it = doc.find("description"); it != doc.end())
    s.description = as_string(*it, "description");

  const auto& coords_j = require(doc, "coordinates");
  if (!coords_j.is_array()) bad("coordinates", "expected an array of names");
  std::vector<std::string> coords;
  for (const auto& c : coords_j) coords.push_back(as_string(c, "coordinates"));
  const int n = static_cast<int>(coords.size());
  if (auto it = doc.find("dimension"); it != doc.end()) {
    if (!it->is_number_integer() || it->get<int>() != n)
      bad("dimension", "does not match the " + std::to_string(n) + " coordinates given");
  }
  if (n < 2) bad("coordinates", "dimension must be at least 2");
  {
    std::set<std::string> seen;
    for (const auto& c : coords) {
      if (!seen.insert(c).second) bad("coordinates", "duplicate name '" + c + "'");
      if (c.empty() || !(std::isalpha(static_cast<unsigned char>(c[0])) || c[0] == '_'))
        bad("coordinates", "'" + c + "' is not an identifier");
    }
  }
  const auto sig = parse_signature(require(doc, "signature"), n);

  if (auto it = doc.find("constants"); it != doc.end()) {
    if (!it->is_object()) bad("constants", "expected an object of name: number");
    for (const auto& [k, v] : it->items()) {
      if (coordinate_index(coords, k) >= 0) bad("constants." + k, "shadows a coordinate");
      s.constants[k] = as_number(v, "constants." + k);
    }
  }

  auto find_ptr = [&](const char* key) -> const json* {
    auto it = doc.find(key);
    return it == doc.end() ? nullptr : &*it;
  };
  const auto domain = parse_boxes(find_ptr("domain"), coords, "domain", Interval{});
  const auto ranges = parse_boxes(find_ptr("sample_ranges"), coords, "sample_ranges",
                                  Interval{-1.0, 1.0});
  s.chart = Chart(coords, domain, ranges);

  // Metric.
  {
    const auto& m = require(doc, "metric");
    const auto& comps = require(m, "components");
    if (!comps.is_object()) bad("metric.components", "expected an object keyed by index pair");
    std::vector<SmoothMap> upper(static_cast<std::size_t>(n * (n + 1) / 2));
    std::set<std::pair<int, int>> seen;
    for (const auto& [key, val] : comps.items()) {
      const auto [a, b] = metric_key(key, coords);
      if (!seen.insert({a, b}).second) bad("metric.components." + key, "duplicate component");
      const auto src = as_string(val, "metric.components." + key);
      const int idx = a * n - a * (a - 1) / 2 + (b - a);
      upper[static_cast<std::size_t>(idx)] = SmoothMap::parse(src, coords, s.constants);
    }
    s.metric = MetricField(n, std::move(upper), sig);
  }

  // Matter and model.
  const json* pot = find_ptr("potential");
  const json* phi = find_ptr("scalar_field");
  if ((pot != nullptr) == (phi != nullptr))
    bad("potential", "exactly one of 'potential' and 'scalar_field' must be given");
  std::string kind = phi ? "scalar-massless" : "maxwell";
  std::map<std::string, double> params;
  const json* coeffs = nullptr;
  if (const json* model = find_ptr("model")) {
    if (!model->is_object()) bad("model", "expected {kind, params}");
    kind = as_string(require(*model, "kind"), "model.kind");
    if (auto it = model->find("params"); it != model->end()) {
      if (!it->is_object()) bad("model.params", "expected an object");
      params = numeric_params(*it, kind);
      if (auto c = it->find("coeffs"); c != it->end()) coeffs = &*c;
    }
  }
  const bool scalar_kind = kind.rfind("scalar-", 0) == 0;
  if (phi) {
    if (!scalar_kind) bad("model.kind", "'" + kind + "' cannot drive a scalar field");
    ScalarMatter sm;
    if (kind == "scalar-massless") {
      check_params(params, {}, kind);
      sm.model = ScalarFieldModel::massless();
    } else if (kind == "scalar-kinetic") {
      check_params(params, {"lambda"}, kind);
      sm.model = ScalarFieldModel::kinetic(param(params, "lambda", kind));
    } else {
      bad("model.kind", "unknown scalar model '" + kind + "'");
    }
    sm.phi = SmoothMap::parse(as_string(*phi, "scalar_field"), coords, s.constants);
    s.matter = std::move(sm);
  } else {
    if (scalar_kind) bad("model.kind", "'" + kind + "' needs a scalar_field");
    GaugeMatter gm;
    if (kind == "maxwell") {
      check_params(params, {}, kind);
      gm.model = LagrangianModel::maxwell();
    } else if (kind == "born-infeld") {
      check_params(params, {"beta"}, kind);
      gm.model = LagrangianModel::born_infeld(param(params, "beta", kind));
    } else if (kind == "quartic") {
      check_params(params, {"lambda"}, kind);
      gm.model = LagrangianModel::quartic(param(params, "lambda", kind));
    } else if (kind == "power-series") {
      check_params(params, {}, kind);
      if (!coeffs || !coeffs->is_array()) bad("model.params.coeffs", "expected an array of numbers");
      std::vector<double> c;
      for (const auto& e : *coeffs) c.push_back(as_number(e, "model.params.coeffs"));
      gm.model = LagrangianModel::power_series(std::move(c));
    } else if (kind == "user-composite") {
      bad("model.kind", "'user-composite' models are not supported");
    } else {
      bad("model.kind", "unknown model '" + kind + "'");
    }
    const auto& comps = pot->is_object() ? require(*pot, "components") : *pot;
    gm.potential = GaugePotential(parse_components(comps, s, "potential.components"));
    s.matter = std::move(gm);
  }

  if (auto it = doc.find("on_shell"); it != doc.end()) {
    if (!it->is_boolean()) bad("on_shell", "expected true or false");
    s.on_shell = it->get<bool>();
  }

  if (const json* k = find_ptr("killing")) {
    if (!k->is_array()) bad("killing", "expected an array");
    for (std::size_t i = 0; i < k->size(); ++i)
      s.killing.push_back(parse_vector((*k)[i], s, "killing[" + std::to_string(i) + "]",
                                       VectorKind::killing_candidate, i));
    for (auto& v : s.killing) {
      if (v.kind == VectorKind::arbitrary) v.kind = VectorKind::killing_candidate;
    }
  }
  if (const json* t = find_ptr("test_vectors")) {
    if (!t->is_array()) bad("test_vectors", "expected an array");
    for (std::size_t i = 0; i < t->size(); ++i)
      s.test_vectors.push_back(
          parse_vector((*t)[i], s, "test_vectors[" + std::to_string(i) + "]", VectorKind::arbitrary, i));
  }
  if (const json* g = find_ptr("gauge_functions")) {
    if (!g->is_array()) bad("gauge_functions", "expected an array");
    for (std::size_t i = 0; i < g->size(); ++i) {
      const std::string field = "gauge_functions[" + std::to_string(i) + "]";
      const auto& e = (*g)[i];
      GaugeFunction gf;
      gf.label = field;
      std::string src;
      if (e.is_object()) {
        src = as_string(require(e, "expr"), field + ".expr");
        if (auto it = e.find("label"); it != e.end()) gf.label = as_string(*it, field + ".label");
      } else {
        src = as_string(e, field);
      }
      gf.chi = SmoothMap::parse(src, coords, s.constants);
      s.gauge_functions.push_back(std::move(gf));
    }
    if (s.scalar() && !s.gauge_functions.empty())
      bad("gauge_functions", "a scalar-field scenario has no gauge freedom");
  }
  if (const json* w = find_ptr("witnesses")) {
    if (!w->is_array()) bad("witnesses", "expected an array of names");
    for (const auto& e : *w) {
      const auto name = as_string(e, "witnesses");
      if (std::find(std::begin(kWitnessNames), std::end(kWitnessNames), name) == std::end(kWitnessNames))
        bad("witnesses", "unknown witness '" + name + "'");
      s.witnesses.push_back(name);
    }
  }
  if (auto it = doc.find("seed"); it != doc.end()) {
    if (!it->is_number_unsigned()) bad("seed", "expected a non-negative integer");
    s.seed = it->get<std::uint64_t>();
  }
  if (auto it = doc.find("samples"); it != doc.end()) {
    if (!it->is_number_integer() || it->get<long long>() < 1) bad("samples", "expected an integer >= 1");
    s.samples = it->get<int>();
  }
  return s;
}

namespace {

json bound_json(const std::optional<double>& b) { return b ? json(*b) : json(nullptr); }

json model_json(const Matter& m) {
  json j;
  json params = json::object();
  if (const auto* gm = std::get_if<GaugeMatter>(&m)) {
    j["kind"] = gm->model.kind();
    const auto p = gm->model.params();
    if (gm->model.kind() == "power-series") {
      std::vector<double> c(p.size());
      for (const auto& [k, v] : p) c[static_cast<std::size_t>(std::stoi(k.substr(1)) - 1)] = v;
      params["coeffs"] = c;
    } else {
      for (const auto& [k, v] : p) params[k] = v;
    }
  } else {
    const auto& sm = std::get<ScalarMatter>(m);
    j["kind"] = sm.model.kind();
    for (const auto& [k, v] : sm.model.params()) params[k] = v;
  }
  j["params"] = params;
  return j;
}

json components_json(const std::vector<SmoothMap>& comps) {
  json a = json::array();
  for (const auto& c : comps) a.push_back(c.source());
  return a;
}

}  // namespace

std::string serialize(const Scenario& s) {
  json doc;
  const auto& coords = s.chart.coordinates();
  const int n = s.dim();
  doc["name"] = s.name;
  if (!s.description.empty()) doc["description"] = s.description;
  doc["dimension"] = n;
  doc["signature"] = s.metric.signature_string();
  doc["coordinates"] = coords;
  json domain = json::object();
  json ranges = json::object();
  for (int i = 0; i < n; ++i) {
    const auto& d = s.chart.domain()[static_cast<std::size_t>(i)];
    if (d.lower || d.upper) domain[coords[static_cast<std::size_t>(i)]] = {bound_json(d.lower), bound_json(d.upper)};
    const auto& r = s.chart.sample_ranges()[static_cast<std::size_t>(i)];
    ranges[coords[static_cast<std::size_t>(i)]] = {bound_json(r.lower), bound_json(r.upper)};
  }
  doc["domain"] = domain;
  doc["sample_ranges"] = ranges;
  json constants = json::object();
  for (const auto& [k, v] : s.constants) constants[k] = v;
  doc["constants"] = constants;
  json metric = json::object();
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      const auto& c = s.metric.component(a, b);
      if (c.constant_value() == 0.0) continue;
      metric[coords[static_cast<std::size_t>(a)] + coords[static_cast<std::size_t>(b)]] = c.source();
    }
  doc["metric"] = {{"components", metric}};
  if (const auto* gm = std::get_if<GaugeMatter>(&s.matter)) {
    doc["potential"] = {{"components", components_json(gm->potential.components())}};
  } else {
    doc["scalar_field"] = std::get<ScalarMatter>(s.matter).phi.source();
  }
  doc["model"] = model_json(s.matter);
  doc["on_shell"] = s.on_shell;
  json killing = json::array();
  for (const auto& k : s.killing)
    killing.push_back({{"components", components_json(k.components)},
                       {"kind", std::string(to_string(k.kind))},
                       {"label", k.label}});
  doc["killing"] = killing;
  json tests = json::array();
  for (const auto& t : s.test_vectors)
    tests.push_back({{"components", components_json(t.components)}, {"label", t.label}});
  doc["test_vectors"] = tests;
  json gauges = json::array();
  for (const auto& g : s.gauge_functions) gauges.push_back({{"expr", g.chi.source()}, {"label", g.label}});
  doc["gauge_functions"] = gauges;
  doc["witnesses"] = s.witnesses;
  doc["seed"] = s.seed;
  doc["samples"] = s.samples;
  return doc.dump(2) + "\n";
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

}  // namespace

std::vector<std::string> run_gates(const Scenario& s) {
  std::vector<std::string> failures;
  std::vector<Point> pts;
  try {
    pts = s.points();
  } catch (const Error& e) {
    failures.push_back(std::string("sample_ranges: ") + e.what());
    return failures;
  }

  // Metric: evaluable, nonsingular, with the declared signature sign.
  int sig_sign = 1;
  for (int v : s.metric.signature()) sig_sign *= v;
  for (const auto& x : pts) {
    try {
      const auto g = s.metric.at<double>(x);
      const double det = determinant(g);
      if (det == 0.0) throw SingularMetricError("metric is singular", condition_estimate(g));
      if ((det > 0.0 ? 1 : -1) != sig_sign) {
        failures.push_back("metric: determinant sign disagrees with signature " +
                           s.metric.signature_string());
        break;
      }
    } catch (const Error& e) {
      failures.push_back(std::string("metric: ") + e.what());
      break;
    }
  }
  if (!failures.empty()) return failures;

  // Killing declarations.
  for (std::size_t i = 0; i < s.killing.size(); ++i) {
    const auto& k = s.killing[i];
    const std::string field = "killing[" + std::to_string(i) + "] (" + k.label + ")";
    if (k.kind == VectorKind::constant &&
        std::any_of(k.components.begin(), k.components.end(),
                    [](const SmoothMap& c) { return !c.is_constant(); })) {
      failures.push_back(field + ": declared constant but its components depend on the coordinates");
    }
    double worst = 0.0;
    bool exceeded = false;
    try {
      for (const auto& x : pts) {
        const auto r = max_abs(killing_residual(s.metric, k, x));
        const auto g = s.metric.at<double>(x);
        const auto v = k.at<double>(x);
        double scale = 0.0;
        for (int a = 0; a < s.dim(); ++a) {
          double low = 0.0;
          for (int b = 0; b < s.dim(); ++b) low += g(a, b) * v(b);
          scale = std::max(scale, std::abs(low));
        }
        worst = std::max(worst, r);
        if (r > kKillingGateTolerance * (1.0 + scale)) exceeded = true;
      }
    } catch (const Error& e) {
      failures.push_back(field + ": " + e.what());
      continue;
    }
    if (exceeded) {
      failures.push_back(field + ": Killing residual " + fmt(worst) + " exceeds " +
                         fmt(kKillingGateTolerance));
    }
  }

  // Declared on-shell configurations satisfy the field equation.
  if (s.on_shell) {
    double worst = 0.0;
    bool exceeded = false;
    try {
      for (const auto& x : pts) {
        const auto fe = matter_field_equation(s.matter, s.metric, x);
        const double r = max_abs(fe.value);
        worst = std::max(worst, r);
        if (r > kOnShellGateTolerance * (1.0 + fe.scale)) exceeded = true;
      }
    } catch (const Error& e) {
      failures.push_back(std::string("on_shell: ") + e.what());
      return failures;
    }
    if (exceeded) {
      failures.push_back("on_shell: field-equation residual " + fmt(worst) + " exceeds " +
                         fmt(kOnShellGateTolerance));
    }
  }
  return failures;
}

Scenario load_scenario(std::string_view json_text) {
  auto s = parse_scenario(json_text);
  auto failures = run_gates(s);
  if (!failures.empty()) {
    for (auto& f : failures) f = s.name + ": " + f;
    throw GateError(std::move(failures));
  }
  return s;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read scenario file '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return load_scenario(os.str());
}

bool is_flat(const Scenario& s) {
  for (const auto& x : s.points()) {
    const auto r = riemann(s.metric, x);
    const auto g = s.metric.at<double>(x);
    if (max_abs(r.components) > 1e-12 * (1.0 + max_abs(g))) return false;
  }
  return true;
}

}  // namespace emt
