#include <cmath>

#include <doctest.h>

#include "emt/lagrangian.hpp"
#include "generators.hpp"

using namespace emt;

namespace {

const std::vector<int> kLorentz{-1, 1, 1, 1};
const std::vector<int> kEuclid3{1, 1, 1};

std::vector<LagrangianModel> models() {
  return {LagrangianModel::maxwell(), LagrangianModel::born_infeld(2.0), LagrangianModel::quartic(0.05),
          LagrangianModel::power_series({-0.25, 0.02, -0.003})};
}

Tensor<double> raise(const Tensor<double>& f, const Tensor<double>& gi) {
  const int n = f.dim();
  Tensor<double> up(n, Valence{2, 0});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double s = 0.0;
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) s += gi(a, c) * gi(b, d) * f(c, d);
      up(a, b) = s;
    }
  return up;
}

// Oracle: L changes by 2 P^ab eps when F_ab -> F_ab + eps, F_ba -> F_ba - eps.
double fd_pair_dF(const LagrangianModel& m, Tensor<double> f, const Tensor<double>& g, int a, int b) {
  const double eps = 1e-5;
  auto shifted = [&](double e) {
    Tensor<double> t = f;
    t(a, b) += e;
    t(b, a) -= e;
    return m.evaluate(t, g);
  };
  return (shifted(eps) - shifted(-eps)) / (2 * eps) / 2.0;
}

// Oracle: symmetric metric perturbation, halved off the diagonal.
double fd_pair_dg(const LagrangianModel& m, const Tensor<double>& f, const Tensor<double>& g, int a, int b) {
  const double eps = 1e-5;
  auto shifted = [&](double e) {
    Tensor<double> t = g;
    t(a, b) += e;
    if (a != b) t(b, a) += e;
    return m.evaluate(f, t);
  };
  const double d = (shifted(eps) - shifted(-eps)) / (2 * eps);
  return a == b ? d : d / 2.0;
}

}  // namespace

TEST_CASE("maxwell derivatives have their textbook form") {
  gen::for_all(30, 31, [](gen::Gen& g) {
    const auto gm = g.metric(kLorentz);
    const auto f = g.antisymmetric(4);
    const auto gi = inverse(gm);
    const auto up = raise(f, gi);
    const auto m = LagrangianModel::maxwell();
    const auto p = dL_dF(m, f, gm);
    const auto q = dL_dg(m, f, gm);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        CHECK(p(a, b) == doctest::Approx(-0.5 * up(a, b)).epsilon(1e-13).scale(1.0));
        // dL/dg_ab = +1/2 F^ac F^b_c with F held lower.
        double s = 0.0;
        for (int c = 0; c < 4; ++c)
          for (int d = 0; d < 4; ++d) s += 0.5 * up(a, c) * gi(b, d) * f(d, c);
        CHECK(q(a, b) == doctest::Approx(s).epsilon(1e-13).scale(1.0));
      }
    CHECK(max_abs_diff(p, maxwell_dL_dF_analytic(f, gm)) <= 1e-14);
    CHECK(max_abs_diff(q, maxwell_dL_dg_analytic(f, gm)) <= 1e-14);
  });
}

TEST_CASE("dual derivatives follow the pair-counting convention") {
  for (const auto& m : models()) {
    CAPTURE(m.kind());
    gen::for_all(10, 32, [&](gen::Gen& g) {
      const auto gm = g.metric(kLorentz);
      const auto f = g.antisymmetric(4, 0.3);
      const auto p = dL_dF(m, f, gm);
      const auto q = dL_dg(m, f, gm);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          if (a != b) CHECK(std::abs(p(a, b) - fd_pair_dF(m, f, gm, a, b)) <= 1e-8);
          CHECK(std::abs(q(a, b) - fd_pair_dg(m, f, gm, a, b)) <= 1e-8);
        }
    });
  }
}

TEST_CASE("field derivative is antisymmetric and metric derivative symmetric") {
  for (const auto& m : models()) {
    CAPTURE(m.kind());
    gen::for_all(20, 33, [&](gen::Gen& g) {
      const auto gm = g.metric(kEuclid3);
      const auto f = g.antisymmetric(3);
      const auto p = dL_dF(m, f, gm);
      const auto q = dL_dg(m, f, gm);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          CHECK(p(a, b) == -p(b, a));
          CHECK(q(a, b) == q(b, a));
        }
    });
  }
}

TEST_CASE("off-shell identity holds for every model at random field and metric") {
  for (const auto& m : models()) {
    CAPTURE(m.kind());
    gen::for_all(50, 34, [&](gen::Gen& g) {
      const auto gm = g.metric(kLorentz);
      const auto f = g.antisymmetric(4, 0.4);
      const auto gi = inverse(gm);
      const auto p = dL_dF(m, f, gm);
      const auto q = dL_dg(m, f, gm);
      double scale = max_abs(q);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          double pf = 0.0;
          for (int c = 0; c < 4; ++c)
            for (int d = 0; d < 4; ++d) pf += p(a, c) * gi(b, d) * f(d, c);
          CHECK(std::abs(pf + q(a, b)) <= 1e-12 * (1.0 + scale));
        }
    });
  }
}

TEST_CASE("born-infeld reduces to maxwell as beta grows") {
  gen::for_all(10, 35, [](gen::Gen& g) {
    const auto gm = g.metric(kLorentz);
    const auto f = g.antisymmetric(4, 0.4);
    const double maxwell = LagrangianModel::maxwell().evaluate(f, gm);
    const double gap3 = std::abs(LagrangianModel::born_infeld(1e3).evaluate(f, gm) - maxwell);
    CHECK(gap3 <= 1e-6);
    // The leading correction scales as 1 / beta^2; moderate beta keeps
    // cancellation in beta^2 (1 - sqrt(...)) well below the gap.
    const double gap10 = std::abs(LagrangianModel::born_infeld(10.0).evaluate(f, gm) - maxwell);
    const double gap20 = std::abs(LagrangianModel::born_infeld(20.0).evaluate(f, gm) - maxwell);
    if (gap10 > 1e-6) CHECK(gap10 / gap20 == doctest::Approx(4.0).epsilon(0.05));
  });
}

TEST_CASE("born-infeld rejects fields beyond the critical electric field") {
  Tensor<double> eta(2, Valence{0, 2});
  eta(0, 0) = -1;
  eta(1, 1) = 1;
  Tensor<double> f(2, Valence{0, 2});
  f(0, 1) = 2.5;
  f(1, 0) = -2.5;
  CHECK_THROWS_AS(LagrangianModel::born_infeld(2.0).evaluate(f, eta), DomainError);
  f(0, 1) = 1.0;
  f(1, 0) = -1.0;
  // beta^2 (1 - sqrt(1 - E^2 / beta^2)) with E = 1, beta = 2.
  CHECK(LagrangianModel::born_infeld(2.0).evaluate(f, eta) == doctest::Approx(4.0 * (1.0 - std::sqrt(0.75))));
}

TEST_CASE("model parameters are reported by name") {
  CHECK(LagrangianModel::born_infeld(1.5).params().at("beta") == 1.5);
  CHECK(LagrangianModel::quartic(0.1).params().at("lambda") == 0.1);
  CHECK(LagrangianModel::maxwell().params().empty());
  CHECK(LagrangianModel::power_series({1.0, 2.0}).params().size() == 2);
  CHECK(ScalarFieldModel::kinetic(0.1).params().at("lambda") == 0.1);
  CHECK_THROWS_AS(LagrangianModel::born_infeld(0.0), ConfigError);
  CHECK_THROWS_AS(LagrangianModel::power_series({}), ConfigError);
}

TEST_CASE("a one-term invariant series is maxwell") {
  gen::for_all(10, 36, [](gen::Gen& g) {
    const auto gm = g.metric(kLorentz);
    const auto f = g.antisymmetric(4);
    CHECK(LagrangianModel::power_series({-0.25}).evaluate(f, gm) ==
          doctest::Approx(LagrangianModel::maxwell().evaluate(f, gm)).epsilon(1e-14));
  });
}

TEST_CASE("scalar lagrangian derivatives") {
  gen::for_all(20, 37, [](gen::Gen& g) {
    const auto gm = g.metric(kLorentz);
    const auto gi = inverse(gm);
    Tensor<double> dphi(4, Valence{0, 1});
    for (int a = 0; a < 4; ++a) dphi(a) = g.uniform(-1, 1);
    const auto m = ScalarFieldModel::massless();
    const auto p = scalar_dL(m, dphi, gm);
    const auto q = scalar_dL_dg(m, dphi, gm);
    for (int a = 0; a < 4; ++a) {
      double up = 0.0;
      for (int b = 0; b < 4; ++b) up += gi(a, b) * dphi(b);
      CHECK(p(a) == doctest::Approx(-up).epsilon(1e-13).scale(1.0));
      for (int b = 0; b < 4; ++b) {
        double ub = 0.0;
        for (int c = 0; c < 4; ++c) ub += gi(b, c) * dphi(c);
        // dX/dg_ab = +1/2 d^a phi d^b phi for X = -1/2 g^ab d_a phi d_b phi.
        CHECK(q(a, b) == doctest::Approx(0.5 * up * ub).epsilon(1e-13).scale(1.0));
      }
    }
  });
}
