#include <doctest.h>

#include <cmath>
#include <vector>

#include "dwv/coeffs.hpp"
#include "dwv/jet.hpp"
#include "dwv/quad.hpp"

using namespace dwv;

namespace {

// 4th-order central difference, used only to cross-check analytic derivatives.
template <class F>
double fd_deriv(const F& f, double t, double h) {
  return (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) /
         (12.0 * h);
}

CoefficientFamily example_poly(int J = 0) {
  return CoefficientFamily::polynomial(1.0, 0.5, 0.0, 0.625, 2, J);
}

}  // namespace

TEST_CASE("jet arithmetic against closed forms") {
  auto t = JetR::variable(0.7);
  auto f = exp(sin(t) * t) / (t + JetR(2.0));
  // reference: g(t) = exp(t sin t)/(t+2); derivatives via fd on jet-free eval
  auto g = [](double x) { return std::exp(x * std::sin(x)) / (x + 2.0); };
  CHECK(f.value() == doctest::Approx(g(0.7)).epsilon(1e-14));
  CHECK(f.deriv(1) == doctest::Approx(fd_deriv(g, 0.7, 1e-3)).epsilon(1e-8));
  auto p = pow(t, 2.5);
  CHECK(p.deriv(2) == doctest::Approx(2.5 * 1.5 * std::pow(0.7, 0.5)).epsilon(1e-13));
  auto s = sqrt(t * t + JetR(1.0));
  auto sref = [](double x) { return std::sqrt(x * x + 1.0); };
  CHECK(s.deriv(1) == doctest::Approx(fd_deriv(sref, 0.7, 1e-4)).epsilon(1e-9));
}

TEST_CASE("adaptive quadrature basics") {
  auto q = integrate([](double x) { return x * x; }, 0.0, 1.0, 1e-12);
  CHECK(q.value == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(q.converged);
  // kinked integrand handled by a breakpoint
  auto k = integrate([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0,
                     1e-12, {0.3});
  CHECK(k.value == doctest::Approx(0.5 * (0.09 + 0.49)).epsilon(1e-12));
  // power-law tail estimate is exact for pure power laws
  double T = 7.0, p = 2.5;
  double g = std::pow(T, -p), dg = -p * std::pow(T, -p - 1.0);
  CHECK(decay_tail_estimate(g, dg, T) ==
        doctest::Approx(std::pow(T, 1.0 - p) / (p - 1.0)).epsilon(1e-13));
}

TEST_CASE("bump profile satisfies its declared constraints") {
  BumpProfile psi(2);
  // unit mass of |psi| is 1/2
  auto q = integrate([&](double s) { return std::abs(psi.eval(s, 0)); }, 0.0,
                     1.0, 1e-10, {0.1, 0.25, 0.75, 0.9});
  CHECK(q.value == doctest::Approx(0.5).epsilon(1e-8));
  // strict amplitude bound and sign changes
  CHECK(psi.min_value() < 0.0);
  CHECK(psi.max_value() > 0.0);
  CHECK(psi.min_value() > -1.0);
  CHECK(psi.max_value() < 1.0);
  // support and C^M endpoint flatness
  CHECK(psi.eval(-0.1, 0) == 0.0);
  CHECK(psi.eval(1.1, 0) == 0.0);
  // vanishing rate |psi^{(k)}(s)| = O(s^{M+1-k}) at both endpoints
  for (int k = 0; k <= 2; ++k) {
    for (double s : {1e-6, 1e-9}) {
      double cap = 1e6 * std::pow(s, 3 - k);
      CHECK(std::abs(psi.eval(s, k)) <= cap);
      CHECK(std::abs(psi.eval(1.0 - s, k)) <= cap);
    }
  }
  // derivative consistency inside the support
  for (double s : {0.05, 0.3, 0.5, 0.77, 0.93}) {
    double fd = fd_deriv([&](double x) { return psi.eval(x, 0); }, s, 1e-5);
    CHECK(psi.eval(s, 1) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("oscillator bump train") {
  auto fam = example_poly(6);
  const Oscillator& osc = *fam.oscillator();
  REQUIRE(osc.size() == 6);
  // t_j = 2^j, delta_j = 2^{0.625 j}, eta_j = 2^{-0.625 j}
  CHECK(osc.center(0) == doctest::Approx(2.0));
  CHECK(osc.width(2) == doctest::Approx(std::pow(2.0, 0.625 * 3)));
  CHECK(osc.amplitude(1) == doctest::Approx(std::pow(2.0, -1.25)));
  // omega = 1 exactly between supports, bounded everywhere
  CHECK(fam.omega(1.5) == 1.0);
  CHECK(fam.omega(100.0, 1) == 0.0);
  for (double t = 0.0; t < 70.0; t += 0.0137) {
    CHECK(fam.omega(t) >= 1.0 + fam.c0() - 1e-12);
    CHECK(fam.omega(t) <= 1.0 + fam.c1() + 1e-12);
  }
  // first-derivative scale: |omega'| <= C eta_j / delta_j inside bump j
  double max_dpsi = 0.0;
  for (int i = 0; i <= 2000; ++i)
    max_dpsi = std::max(max_dpsi, std::abs(osc.profile().eval(i / 2000.0, 1)));
  int j = 1;
  for (double u = 0.05; u < 1.0; u += 0.1) {
    double t = osc.center(j) + u * osc.width(j);
    CHECK(std::abs(fam.omega(t, 1)) <=
          max_dpsi * osc.amplitude(j) / osc.width(j) + 1e-12);
  }
  // derivative order above M is rejected
  CHECK_THROWS_AS(fam.omega(2.5, 3), ParamError);
}

TEST_CASE("polynomial family closed forms") {
  auto fam = example_poly();
  // Lambda = (1+t)^2, Theta = 1+t
  CHECK(fam.Lambda(3.0) == doctest::Approx(16.0).epsilon(1e-14));
  CHECK(fam.Theta(3.0) == doctest::Approx(4.0).epsilon(1e-14));
  // F(Lambda(t)) = 2.5 (1+t)^{1.25}
  CHECK(fam.F(0.0) == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(fam.F(3.0) == doctest::Approx(14.142135623730951).epsilon(1e-13));
  CHECK(fam.F_identity_residual(1.0, 1e-10) < 1e-6);
  // rho for alpha=1, beta=1, gamma=0.5 is 2(1+t)
  auto fam2 = CoefficientFamily::polynomial(1.0, 1.0, 0.5, 0.625, 2, 0);
  CHECK(fam2.rho(5.0) == doctest::Approx(12.0).epsilon(1e-14));
  // admissibility window: beta=0.5 needs kappa >= 0.625
  CHECK_THROWS_AS(CoefficientFamily::polynomial(1.0, 0.5, 0.0, 0.6, 2, 0),
                  ParamError);
  CHECK_THROWS_AS(CoefficientFamily::polynomial(1.0, 3.1, 0.0, 0.625, 2, 0),
                  ParamError);
}

TEST_CASE("exponential family closed forms") {
  auto fam = CoefficientFamily::exponential(1.0, 0.5, -0.25, 2, 4);
  CHECK(fam.lambda(2.0) == doctest::Approx(std::exp(2.0)).epsilon(1e-14));
  CHECK(fam.Lambda(2.0) == doctest::Approx(std::exp(2.0)).epsilon(1e-14));
  // F proportional to e^{0.5 t}
  CHECK(fam.log_F(4.0) - fam.log_F(0.0) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(fam.F_identity_residual(2.0, 1e-10) < 1e-6);
  // eta_j = e^{j(r - kappa - 1)} = e^{-0.25 j} <= 1
  for (std::size_t j = 0; j < fam.oscillator()->size(); ++j)
    CHECK(fam.oscillator()->amplitude(j) ==
          doctest::Approx(std::exp(-0.25 * double(j + 1))).epsilon(1e-14));
  CHECK_THROWS_AS(CoefficientFamily::exponential(1.0, 0.5, -0.3, 2, 0),
                  ParamError);
}

TEST_CASE("super-exponential family closed forms and log scale") {
  auto fam = CoefficientFamily::super_exponential(1.0, 0.5, -0.25, 2, 3);
  CHECK(fam.log_Lambda(3.0) == doctest::Approx(std::exp(3.0)).epsilon(1e-14));
  CHECK(fam.log_rho(3.0) == doctest::Approx(3.0 + std::exp(3.0)).epsilon(1e-14));
  // log F proportional to 0.5 e^t
  CHECK(fam.log_F(2.0) - fam.log_F(0.0) ==
        doctest::Approx(0.5 * (std::exp(2.0) - 1.0)).epsilon(1e-13));
  CHECK(fam.F_identity_residual(1.0, 1e-10) < 1e-6);
  // derivative recursion: lambda' = (1 + e^t) lambda exactly
  double t = 1.3;
  CHECK(fam.lambda(t, 1) ==
        doctest::Approx((1.0 + std::exp(t)) * fam.lambda(t)).epsilon(1e-14));
  CHECK(fam.lambda(t, 2) ==
        doctest::Approx((sqr(1.0 + std::exp(t)) + std::exp(t)) * fam.lambda(t))
            .epsilon(1e-14));
  // past the overflow horizon only log evaluators work
  CHECK_THROWS_AS(fam.lambda(10.0), RangeError);
  CHECK(std::isfinite(fam.log_lambda(10.0)));
  CHECK(std::isfinite(fam.log_F(10.0)));
}

TEST_CASE("analytic derivatives match finite differences") {
  std::vector<CoefficientFamily> fams;
  fams.push_back(example_poly(5));
  fams.push_back(CoefficientFamily::exponential(1.2, 0.5, -0.25, 2, 4));
  fams.push_back(CoefficientFamily::super_exponential(1.0, 0.5, -0.25, 2, 2));
  for (const auto& fam : fams) {
    for (double t : {0.4, 1.1, 2.3, 3.7}) {
      double h = 1e-4;
      CHECK(fam.lambda(t, 1) ==
            doctest::Approx(fd_deriv([&](double x) { return fam.lambda(x); }, t, h))
                .epsilon(1e-6));
      CHECK(fam.rho(t, 1) ==
            doctest::Approx(fd_deriv([&](double x) { return fam.rho(x); }, t, h))
                .epsilon(1e-6));
      CHECK(fam.rho_omega(t, 1) ==
            doctest::Approx(
                fd_deriv([&](double x) { return fam.rho_omega(x, 0); }, t, 1e-5))
                .epsilon(1e-5));
    }
  }
}

TEST_CASE("mass term and bracket weight") {
  auto fam = example_poly();
  // on the separating curve |xi| = eta(t) the propagation and damping parts
  // cancel: m = -rho'/2 and the bracket vanishes
  double t = 2.0;
  double xi = fam.eta(t);
  CHECK(fam.mass(t, xi) == doctest::Approx(-0.5 * fam.rho(t, 1)).epsilon(1e-12));
  CHECK(fam.bracket(t, xi) < 1e-8 * fam.rho(t));
  CHECK(fam.log_bracket(t, std::log(xi)) < fam.log_rho(t) - 15.0);
  // xi = 0: mass is negative for all t here (damping dominates)
  CHECK(fam.mass(0.0, 0.0) < 0.0);
  CHECK(fam.mass(50.0, 0.0) < 0.0);
  // rho == 0 custom limit: m = lambda^2 xi^2
  CustomHooks hooks;
  hooks.lambda = [](double, int k) { return k == 0 ? 3.0 : 0.0; };
  hooks.rho = [](double, int) { return 0.0; };
  hooks.Lambda = [](double t) { return 1.0 + 3.0 * t; };
  hooks.Theta = [](double t) { return 1.0 + 3.0 * t; };
  hooks.Xi = [](double) { return 1.0; };
  auto flat = CoefficientFamily::custom(hooks, 2);
  CHECK(flat.mass(1.0, 2.0) == doctest::Approx(36.0).epsilon(1e-14));
  // log-scale bracket agrees with the direct evaluation off the curve
  int sign = 0;
  double lb = fam.log_bracket(3.0, std::log(5.0), &sign);
  CHECK(sign == 1);
  CHECK(lb == doctest::Approx(std::log(fam.bracket(3.0, 5.0))).epsilon(1e-12));
  int sign2 = 0;
  double lb2 = fam.log_bracket(3.0, std::log(1e-4), &sign2);
  CHECK(sign2 == -1);
  CHECK(lb2 == doctest::Approx(std::log(fam.bracket(3.0, 1e-4))).epsilon(1e-12));
  // jet branch matches value and fd derivative
  int s3 = 0;
  JetR bj = fam.bracket_jet(3.0, 5.0, &s3);
  CHECK(s3 == 1);
  CHECK(bj.value() == doctest::Approx(fam.bracket(3.0, 5.0)).epsilon(1e-13));
  CHECK(bj.deriv(1) ==
        doctest::Approx(fd_deriv([&](double x) { return fam.bracket(x, 5.0); },
                                 3.0, 1e-4))
            .epsilon(1e-7));
}

TEST_CASE("quadrature evaluators against closed forms") {
  auto fam = example_poly();
  // B_lambda(0,t) = (1+t)^{2.5} - 1 for alpha=1, beta=0.5
  CHECK(fam.integrate_B_lambda(0.0, 3.0, 1e-10) ==
        doctest::Approx(31.0).epsilon(1e-9));
  // additivity within 10 tol
  double tol = 1e-9;
  double whole = fam.integrate_B_lambda(0.0, 7.0, tol);
  double split = fam.integrate_B_lambda(0.0, 2.0, tol) +
                 fam.integrate_B_lambda(2.0, 7.0, tol);
  CHECK(std::abs(whole - split) <= 10.0 * tol * whole);
  // empty interval
  CHECK(fam.integrate_B_lambda(3.0, 3.0, tol) == 0.0);
  // delta-log closed form: (8/15)((1+t)^{1.5} - 1)
  CHECK(fam.integrate_delta_log(0.0, 3.0, 1e-10) ==
        doctest::Approx(56.0 / 15.0).epsilon(1e-9));
  // with the oscillator the value sits between the omega-band multiples
  auto famo = example_poly(5);
  double base = fam.integrate_delta_log(0.0, 20.0, 1e-9);
  double osc = famo.integrate_delta_log(0.0, 20.0, 1e-9);
  CHECK(osc >= (1.0 + famo.c0()) * base - 1e-9);
  CHECK(osc <= (1.0 + famo.c1()) * base + 1e-9);
  // log-scale integral agrees with the linear one where both work
  CHECK(fam.log_B_lambda(0.0, 3.0, 1e-10) ==
        doctest::Approx(std::log(31.0)).epsilon(1e-8));
}

TEST_CASE("monotonicity of the derived scales") {
  std::vector<CoefficientFamily> fams;
  fams.push_back(example_poly(4));
  fams.push_back(CoefficientFamily::exponential(1.0, 0.5, -0.25, 2, 0));
  fams.push_back(CoefficientFamily::super_exponential(1.0, 0.5, -0.25, 2, 0));
  for (const auto& fam : fams) {
    double prevL = -1e300, prevT = -1e300, prevF = -1e300;
    for (double t = 0.0; t <= 12.0; t += 0.1) {
      CHECK(fam.log_Lambda(t) > prevL);
      CHECK(fam.log_Theta(t) > prevT);
      CHECK(fam.log_F(t) > prevF);
      CHECK(fam.log_Theta(t) <= fam.log_Lambda(t) + 1e-12);
      prevL = fam.log_Lambda(t);
      prevT = fam.log_Theta(t);
      prevF = fam.log_F(t);
    }
  }
}
