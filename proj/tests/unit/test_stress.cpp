#include <cmath>

#include <doctest.h>

#include "emt/stress.hpp"
#include "generators.hpp"

using namespace emt;

namespace {

const std::vector<std::string> kTXYZ{"t", "x", "y", "z"};
const std::vector<std::string> kSph{"t", "r", "th", "ph"};

MetricField minkowski() { return MetricField::diagonal(parse_all({"-1", "1", "1", "1"}, kTXYZ), {-1, 1, 1, 1}); }

MetricField schwarzschild() {
  return MetricField::diagonal(parse_all({"-(1 - 2/r)", "1/(1 - 2/r)", "r^2", "r^2*sin(th)^2"}, kSph),
                               {-1, 1, 1, 1});
}

// A slowly varying Lorentzian metric with every component nonconstant.
MetricField wavy_metric(gen::Gen& g) {
  std::vector<std::string> upper;
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) {
      const std::string e = "(" + g.expression(kTXYZ) + ")";
      if (a == b) upper.push_back(a == 0 ? "-(1.5 + 0.1*" + e + ")" : "1.5 + 0.1*" + e);
      else upper.push_back("0.05*" + e);
    }
  return MetricField(4, parse_all(upper, kTXYZ), {-1, 1, 1, 1});
}

// Constant metric with entries g.
MetricField constant_metric(const Tensor<double>& g) {
  std::vector<SmoothMap> upper;
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) upper.push_back(SmoothMap::constant(g(a, b)));
  return MetricField(4, upper, {-1, 1, 1, 1});
}

Matter gauge(const LagrangianModel& m, const std::vector<std::string>& src, const std::vector<std::string>& c) {
  return GaugeMatter{m, GaugePotential(parse_all(src, c))};
}

std::vector<LagrangianModel> models() {
  return {LagrangianModel::maxwell(), LagrangianModel::born_infeld(2.0), LagrangianModel::quartic(0.05)};
}

}  // namespace

TEST_CASE("uniform electric field has the textbook energy density and pressures") {
  const double e = 0.8;
  const auto matter = gauge(LagrangianModel::maxwell(), {"0", "0.8*t", "0", "0"}, kTXYZ);
  const std::vector<double> x{0.3, -0.2, 0.5, 0.1};
  for (auto v : {StressVariant::canonical, StressVariant::metric}) {
    const auto t = stress_tensor(v, matter, minkowski(), x).tensor;
    CHECK(t(0, 0) == doctest::Approx(e * e / 2));
    CHECK(t(1, 1) == doctest::Approx(-e * e / 2));
    CHECK(t(2, 2) == doctest::Approx(e * e / 2));
    CHECK(t(3, 3) == doctest::Approx(e * e / 2));
    CHECK(std::abs(t(0, 1)) + std::abs(t(1, 2)) + std::abs(t(0, 3)) == 0.0);
  }
}

TEST_CASE("canonical and metric tensors coincide off-shell") {
  for (const auto& model : models()) {
    CAPTURE(model.kind());
    gen::for_all(15, 51, [&](gen::Gen& g) {
      const auto metric = wavy_metric(g);
      auto src = g.expressions(kTXYZ);
      for (auto& s : src) s = "0.3*(" + s + ")";
      const auto matter = gauge(model, src, kTXYZ);
      const auto x = g.point(4, -0.5, 0.5);
      const auto tc = stress_tensor(StressVariant::canonical, matter, metric, x).tensor;
      const auto tm = stress_tensor(StressVariant::metric, matter, metric, x).tensor;
      CHECK(max_abs(tc) > 0.0);
      CHECK(max_abs_diff(tc, tm) <= 1e-12 * (1.0 + max_abs(tc)));
      CHECK(antisymmetric_part(tc) <= 1e-12 * (1.0 + max_abs(tc)));
    });
  }
}

TEST_CASE("metric tensor matches the determinant-weighted metric derivative") {
  // T^ab = (2 / sqrt|g|) d(sqrt|g| L)/dg_ab with F_ab held fixed; the oracle
  // differentiates numerically with a linear potential on a constant metric.
  for (const auto& model : models()) {
    CAPTURE(model.kind());
    gen::for_all(5, 52, [&](gen::Gen& g) {
      const auto gm = g.metric({-1, 1, 1, 1});
      const auto f = g.antisymmetric(4, 0.3);
      std::vector<std::string> src(4);
      for (int b = 0; b < 4; ++b) {
        std::ostringstream os;
        os.precision(17);
        os << "0";
        for (int a = 0; a < 4; ++a) os << " + " << 0.5 * f(a, b) << "*" << kTXYZ[static_cast<std::size_t>(a)];
        src[static_cast<std::size_t>(b)] = os.str();
      }
      const auto matter = gauge(model, src, kTXYZ);
      const auto x = g.point(4);
      const auto tm = stress_tensor(StressVariant::metric, matter, constant_metric(gm), x).tensor;
      auto density = [&](const Tensor<double>& h) { return std::sqrt(std::abs(determinant(h))) * model.evaluate(f, h); };
      const double root = std::sqrt(std::abs(determinant(gm)));
      const double eps = 1e-5;
      for (int a = 0; a < 4; ++a)
        for (int b = a; b < 4; ++b) {
          Tensor<double> hp = gm;
          Tensor<double> hm = gm;
          hp(a, b) += eps;
          hm(a, b) -= eps;
          if (a != b) {
            hp(b, a) += eps;
            hm(b, a) -= eps;
          }
          double d = (density(hp) - density(hm)) / (2 * eps);
          if (a != b) d /= 2.0;
          CHECK(tm(a, b) == doctest::Approx(2.0 * d / root).epsilon(1e-7).scale(1.0));
        }
    });
  }
}

TEST_CASE("traditional minus canonical is the gauge-dependent term in flat space") {
  // For maxwell, T_trad^ab - T_c^ab = F^ac d_c A^b on cartesian Minkowski.
  gen::for_all(15, 53, [](gen::Gen& g) {
    const auto src = g.expressions(kTXYZ);
    const auto matter = gauge(LagrangianModel::maxwell(), src, kTXYZ);
    const auto& a = std::get<GaugeMatter>(matter).potential;
    const auto x = g.point(4);
    const auto tt = stress_tensor(StressVariant::traditional, matter, minkowski(), x).tensor;
    const auto tc = stress_tensor(StressVariant::canonical, matter, minkowski(), x).tensor;
    const auto f = field_strength(a, x);
    const double eta[4] = {-1, 1, 1, 1};
    for (int p = 0; p < 4; ++p)
      for (int q = 0; q < 4; ++q) {
        double s = 0.0;
        for (int c = 0; c < 4; ++c) {
          const double dca = fd_partial([&](std::span<const double> y) { return a.at<double>(y)(q); }, x, c,
                                        FdScheme{1e-4, 2});
          s += eta[p] * eta[c] * f(p, c) * dca * eta[q];
        }
        CHECK(std::abs(tt(p, q) - tc(p, q) - s) <= 1e-7);
      }
  });
}

TEST_CASE("scalar gradient field phi = t") {
  const Matter m = ScalarMatter{ScalarFieldModel::massless(), SmoothMap::parse("t", kTXYZ)};
  const std::vector<double> x{0.1, 0.2, 0.3, 0.4};
  for (auto v : {StressVariant::canonical, StressVariant::metric}) {
    const auto t = stress_tensor(v, m, minkowski(), x).tensor;
    CHECK(t(0, 0) == doctest::Approx(0.5));
    CHECK(t(1, 1) == doctest::Approx(0.5));
    CHECK(t(0, 1) == 0.0);
  }
  CHECK(lagrangian_at(m, minkowski(), x) == doctest::Approx(0.5));
  CHECK_THROWS_AS(stress_tensor(StressVariant::traditional, m, minkowski(), x), ConfigError);
}

TEST_CASE("density form of the divergence agrees with the direct form off-shell") {
  const auto metric = schwarzschild();
  for (const auto& model : models()) {
    CAPTURE(model.kind());
    gen::for_all(8, 54, [&](gen::Gen& g) {
      auto src = g.expressions(kSph);
      for (auto& s : src) s = "0.3*(" + s + ")";
      const auto matter = gauge(model, src, kSph);
      const std::vector<double> x{g.uniform(-1, 1), g.uniform(3, 10), g.uniform(0.4, 2.7), g.uniform(-3, 3)};
      const auto direct = stress_divergence(StressVariant::canonical, matter, metric, x);
      const auto dens = stress_divergence_density(StressVariant::canonical, matter, metric, x);
      CHECK(max_abs(direct.value) > 1e-6);
      CHECK(max_abs_diff(direct.value, dens.value) <= 1e-12 * (1.0 + direct.scale));
    });
  }
}

TEST_CASE("traditional divergence balances the curvature term on schwarzschild") {
  const GaugeMatter m{LagrangianModel::maxwell(), GaugePotential(parse_all({"-0.1/r", "0", "0", "0"}, kSph))};
  gen::for_all(10, 55, [&](gen::Gen& g) {
    const std::vector<double> x{g.uniform(-1, 1), g.uniform(3, 10), g.uniform(0.4, 2.7), g.uniform(-3, 3)};
    const auto b = traditional_balance(m, schwarzschild(), x);
    const double div = max_abs(b.divergence);
    const double curv = max_abs(b.curvature);
    CHECK(div >= 1e-3 * b.scale);
    CHECK(curv >= 1e-3 * b.scale);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(b.divergence(i) + b.curvature(i)) <= 1e-12 * (1.0 + b.scale));
  });
}

TEST_CASE("noether current lowers the generator with the local metric") {
  const auto matter = gauge(LagrangianModel::maxwell(), {"0", "0.8*t", "0", "0"}, kTXYZ);
  const std::vector<double> x{0.3, -0.2, 0.5, 0.1};
  const auto t = stress_tensor(StressVariant::canonical, matter, minkowski(), x);
  const VectorFieldSpec time{parse_all({"1", "0", "0", "0"}, kTXYZ), VectorKind::constant, "time"};
  const auto j = noether_current(t, time, minkowski());
  CHECK(j.j(0) == doctest::Approx(-t.tensor(0, 0)));
  CHECK(j.generator == "time");
}

TEST_CASE("matter field equation for a scalar wave") {
  const Matter m = ScalarMatter{ScalarFieldModel::massless(), SmoothMap::parse("sin(t - x) + 0.3*cos(y + t)", kTXYZ)};
  gen::for_all(10, 56, [&](gen::Gen& g) {
    const auto x = g.point(4);
    const auto fe = matter_field_equation(m, minkowski(), x);
    CHECK(fe.value.size() == 1);
    CHECK(std::abs(fe.value.flat(0)) <= 1e-14);
  });
}
