#include <doctest.h>

#include <cmath>

#include "dwv/assumptions.hpp"
#include "dwv/quad.hpp"

using namespace dwv;

namespace {

// "very slow oscillation" reference configuration: trivial omega,
// Theta == Lambda, F == Lambda, Xi = Lambda / lambda.
CoefficientFamily slow_reference() {
  CustomHooks h;
  h.lambda = [](double t, int k) {
    switch (k) {
      case 0: return 2.0 * (1.0 + t);
      case 1: return 2.0;
      default: return 0.0;
    }
  };
  h.rho = [](double t, int k) {
    // rho = (1+t)^{1/2}
    double c = 1.0;
    for (int i = 0; i < k; ++i) c *= (0.5 - double(i));
    return c * std::pow(1.0 + t, 0.5 - double(k));
  };
  h.Lambda = [](double t) { return sqr(1.0 + t); };
  h.Theta = [](double t) { return sqr(1.0 + t); };
  h.Xi = [](double t) { return 0.5 * (1.0 + t); };
  h.F = [](double t) { return sqr(1.0 + t); };
  return CoefficientFamily::custom(h, 2);
}

}  // namespace

TEST_CASE("example families certify on their stated windows") {
  // boundary kappa = (3 - beta)/4 included
  auto poly = CoefficientFamily::polynomial(1.0, 0.5, 0.0, 0.625, 2, 8);
  auto rp = check_all(poly, 500.0);
  INFO(rp.to_text());
  CHECK(rp.all_pass());

  auto expf = CoefficientFamily::exponential(1.2, 0.5, -0.25, 2, 8);
  auto re = check_all(expf, 12.0);
  INFO(re.to_text());
  CHECK(re.all_pass());

  auto se = CoefficientFamily::super_exponential(1.0, 0.5, -0.25, 2, 2);
  auto rs = check_all(se, 5.0);
  INFO(rs.to_text());
  CHECK(rs.all_pass());
}

TEST_CASE("slow-oscillation reference passes A3-A5 trivially") {
  auto fam = slow_reference();
  auto rep = check_all(fam, 200.0);
  INFO(rep.to_text());
  CHECK(rep.all_pass());
  // A3 ratio is exactly zero at every point
  CHECK(rep.get(ConditionId::A3).constants[0].second == 0.0);
  for (double t : {1.0, 10.0, 100.0})
    CHECK(stabilization_ratio(fam, t) == 0.0);
}

TEST_CASE("over-damping configuration fails B4") {
  // beta >= 2 alpha + 1 makes lambda^2 / rho integrable
  auto od = CoefficientFamily::polynomial_unchecked(1.0, 3.5, 0.0, 0.625, 2, 1.0);
  auto rep = check_all(od, 800.0);
  CHECK_FALSE(rep.get(ConditionId::B4).pass);
  // the admissible counterpart passes it on the same horizon
  auto ok = CoefficientFamily::polynomial(1.0, 0.5, 0.0, 0.625, 2, 0);
  CHECK(check_all(ok, 800.0).get(ConditionId::B4).pass);
  // the checked factory rejects the window outright
  CHECK_THROWS_AS(CoefficientFamily::polynomial(1.0, 3.5, 0.0, 0.625, 2, 0),
                  ParamError);
}

TEST_CASE("stabilization ratio and partial-sum majorant") {
  auto fam = CoefficientFamily::polynomial(1.0, 0.5, 0.0, 0.625, 2, 8);
  // bounded over a long sweep
  double sup = 0.0;
  for (double t : {4.0, 16.0, 64.0, 256.0, 1024.0, 10000.0})
    sup = std::max(sup, stabilization_ratio(fam, t));
  CHECK(std::isfinite(sup));
  CHECK(sup > 0.0);
  // single-bump bound: integral <= eta delta lambda(bump end) * int|psi|
  CustomHooks h;
  h.lambda = [](double t, int k) {
    return k == 0 ? 2.0 * (1.0 + t) : (k == 1 ? 2.0 : 0.0);
  };
  h.rho = [](double, int k) { return k == 0 ? 1.0 : 0.0; };
  h.Lambda = [](double t) { return sqr(1.0 + t); };
  h.Theta = [](double t) { return 1.0 + t; };
  h.Xi = [](double) { return 1.0; };
  auto base = CoefficientFamily::custom(h, 2);
  (void)base;
  Oscillator single({1.0}, {1.0}, {1.0}, BumpProfile(2));
  auto f = [&](double s) {
    return 2.0 * (1.0 + s) * std::abs(single.eval(s) - 1.0);
  };
  QuadResult q = integrate(f, 1.0, 2.0, 1e-10, {1.25, 1.5, 1.75});
  // 1/2 eta_1 delta_1 lambda(t_2) with t_2 = 2
  CHECK(q.value <= 0.5 * 1.0 * 1.0 * (2.0 * 3.0) + 1e-12);
}

TEST_CASE("report structure and determinism") {
  auto fam = CoefficientFamily::polynomial(1.0, 0.5, 0.0, 0.625, 2, 4);
  auto a = check_all(fam, 100.0);
  auto b = check_all(fam, 100.0);
  CHECK(a.to_text() == b.to_text());
  CHECK(a.records.size() == 11);
  // every id exactly once
  for (int i = 0; i < 11; ++i)
    CHECK(a.records[std::size_t(i)].id == ConditionId(i));
  // empirical sup constants are monotone in the horizon when the short
  // grid is nested in the long one (same spacing)
  GridSpec fine;
  fine.n = 1000;
  auto small = check_all(fam, 100.0, fine);
  GridSpec fine4 = fine;
  fine4.n = 4000;
  auto big = check_all(fam, 400.0, fine4);
  CHECK(big.get(ConditionId::A3).constants[0].second >=
        small.get(ConditionId::A3).constants[0].second - 1e-12);
  CHECK(big.get(ConditionId::A2).constants[1].second >=
        small.get(ConditionId::A2).constants[1].second - 1e-12);
}

TEST_CASE("t0 detection for the damping-derivative ratio") {
  auto fam = CoefficientFamily::polynomial(1.0, 0.5, 0.0, 0.625, 2, 0);
  // |rho'| / rho^2 = beta (1+t)^{-beta-1} / rho_coeff <= eps/4
  double eps = 0.2;
  double t0 = detect_t0(fam, eps, 50.0);
  CHECK(t0 > 0.0);
  double c = sqr(2.0) / 2.5;  // rho coefficient
  double exact = std::pow(0.5 / (c * eps / 4.0), 1.0 / 1.5) - 1.0;
  CHECK(t0 == doctest::Approx(exact).epsilon(0.05));
  // grid resolution contract: refusing refinement on a coarse grid names
  // the violating bump
  auto osc = CoefficientFamily::polynomial(1.0, 0.5, 0.0, 0.625, 2, 8);
  GridSpec coarse;
  coarse.n = 40;
  coarse.refine_bumps = false;
  CHECK_THROWS_AS(build_grid(osc, 500.0, coarse), NumericError);
}
