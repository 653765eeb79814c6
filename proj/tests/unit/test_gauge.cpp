#include <cmath>

#include <doctest.h>

#include "emt/gauge.hpp"
#include "generators.hpp"

using namespace emt;

namespace {

const std::vector<std::string> kTXYZ{"t", "x", "y", "z"};
const std::vector<std::string> kSph{"t", "r", "th", "ph"};

MetricField schwarzschild() {
  return MetricField::diagonal(parse_all({"-(1 - 2/r)", "1/(1 - 2/r)", "r^2", "r^2*sin(th)^2"}, kSph),
                               {-1, 1, 1, 1});
}

MetricField flat_spherical() {
  return MetricField::diagonal(parse_all({"-1", "1", "r^2", "r^2*sin(th)^2"}, kSph), {-1, 1, 1, 1});
}

GaugePotential potential(const std::vector<std::string>& src, const std::vector<std::string>& coords) {
  return GaugePotential(parse_all(src, coords));
}

std::vector<double> exterior_point(gen::Gen& g) {
  return {g.uniform(-1, 1), g.uniform(3.0, 10.0), g.uniform(0.4, 2.7), g.uniform(-3, 3)};
}

}  // namespace

TEST_CASE("field strength of a closed-form potential") {
  const auto a = potential({"x*y", "t^2", "0", "0"}, kTXYZ);
  const std::vector<double> x{0.5, 2.0, 3.0, -1.0};
  const auto f = field_strength(a, x);
  CHECK(f(0, 1) == doctest::Approx(2 * 0.5 - 3.0));
  CHECK(f(0, 2) == doctest::Approx(-2.0));
  CHECK(f(1, 2) == 0.0);
  CHECK(f(1, 0) == -f(0, 1));
}

TEST_CASE("potentials need one component per coordinate and at least two") {
  CHECK_THROWS_AS(GaugePotential(parse_all({"t"}, kTXYZ)), ConfigError);
}

TEST_CASE("field strength is unchanged by a gauge shift") {
  gen::for_all(20, 41, [](gen::Gen& g) {
    const auto a = potential(g.expressions(kTXYZ), kTXYZ);
    const GaugeFunction chi{SmoothMap::parse(g.expression(kTXYZ), kTXYZ), "chi"};
    const auto b = a.shifted(chi);
    CHECK(b.shifts().size() == 1);
    const auto x = g.point(4);
    const auto f0 = field_strength(a, x);
    CHECK(max_abs_diff(f0, field_strength(b, x)) <= 1e-14 * (1.0 + max_abs(f0)));
    // The potential itself does change.
    const auto a0 = a.at<double>(x);
    const auto a1 = b.at<double>(x);
    CHECK(max_abs_diff(a0, a1) > 0.0);
  });
}

TEST_CASE("bianchi identity holds for random potentials on a curved background") {
  const auto m = schwarzschild();
  gen::for_all(30, 42, [&](gen::Gen& g) {
    const auto a = potential(g.expressions(kSph), kSph);
    const auto x = exterior_point(g);
    const auto r = bianchi_residual(a, m, x);
    CHECK(r.scale > 0.0);
    CHECK(r.value <= 1e-12 * (1.0 + r.scale));
    CHECK(bianchi_partial_residual(a, x).value <= 1e-12 * (1.0 + r.scale));
  });
}

TEST_CASE("coulomb potential solves the maxwell equations on schwarzschild") {
  const auto m = schwarzschild();
  const auto a = potential({"-0.1/r", "0", "0", "0"}, kSph);
  gen::for_all(20, 43, [&](gen::Gen& g) {
    const auto x = exterior_point(g);
    const auto fe = field_equation_residual(LagrangianModel::maxwell(), a, m, x);
    CHECK(max_abs(fe.value) <= 1e-15 * (1.0 + fe.scale));
  });
}

TEST_CASE("field equation residual of a non-coulomb potential") {
  // With A_t = f(r) on flat spherical coordinates the residual is
  // 1/2 (r^2 f')' / r^2 in the t slot; f = q / r^3 gives 3 q / r^5.
  const double q = 0.5;
  const auto m = flat_spherical();
  const auto a = potential({"0.5/r^3", "0", "0", "0"}, kSph);
  gen::for_all(10, 44, [&](gen::Gen& g) {
    const auto x = exterior_point(g);
    const auto fe = field_equation_residual(LagrangianModel::maxwell(), a, m, x);
    CHECK(fe.value(0) == doctest::Approx(3.0 * q / std::pow(x[1], 5)).epsilon(1e-12));
    CHECK(std::abs(fe.value(1)) + std::abs(fe.value(2)) + std::abs(fe.value(3)) <= 1e-15);
  });
}

TEST_CASE("finite-difference bianchi residual converges at second order") {
  const auto m = schwarzschild();
  gen::Gen g(45);
  const auto a = potential(g.expressions(kSph), kSph);
  const std::vector<double> x{0.1, 5.0, 1.0, 0.5};
  const double r1 = bianchi_residual(a, m, x, DerivativeMode::fd(1e-2)).value;
  const double r2 = bianchi_residual(a, m, x, DerivativeMode::fd(5e-3)).value;
  CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.05));
}
