#include <doctest.h>

#include <cmath>
#include <vector>

#include "dwv/zones.hpp"

using namespace dwv;

namespace {

// Independent linear-scale re-evaluation of the zone definitions, used to
// cross-check the log-scale implementation.
ZoneTag ref_classify(const CoefficientFamily& fam, const ZoneConfig& cfg,
                     double t, double xi) {
  double lam = fam.lambda(t), rho = fam.rho(t), om = fam.omega(t);
  double jpn = std::sqrt(std::abs(sqr(lam * om * xi) - 0.25 * sqr(rho * om)));
  double eta = fam.eta(t);
  double thr = 0.5 * rho * om;
  bool pe = xi < eta, ph = xi > eta;
  if (xi <= cfg.d0 / fam.F(t) && pe) return ZoneTag::Diss;
  if (xi >= cfg.d0 / fam.F(t) && jpn >= cfg.eps * thr && pe)
    return ZoneTag::Ell;
  if (jpn <= cfg.eps * thr) return ZoneTag::Red;
  if (jpn <= cfg.N * thr && ph && fam.Theta(t) * xi <= cfg.N &&
      fam.Lambda(t) * xi >= cfg.N)
    return ZoneTag::Osc;
  if (jpn >= cfg.N * thr && ph && fam.Theta(t) * xi >= cfg.N)
    return ZoneTag::Hyp;
  return ZoneTag::Uncovered;
}

double central_diff(const std::function<double(double)>& f, double t,
                    double h) {
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("zone config invariants") {
  ZoneConfig ok;
  CHECK_NOTHROW(ok.validate());
  ZoneConfig bad = ok;
  bad.N = 0.5;
  CHECK_THROWS_AS(bad.validate(), ParamError);
  bad = ok;
  bad.eps = 0.5;
  CHECK_THROWS_AS(bad.validate(), ParamError);
  bad = ok;
  bad.eps = 0.0;
  CHECK_THROWS_AS(bad.validate(), ParamError);
  bad = ok;
  bad.d0 = 0.0;
  CHECK_THROWS_AS(bad.validate(), ParamError);
}

TEST_CASE("smooth cutoff") {
  CHECK(smooth_step(0.0) == 1.0);
  CHECK(smooth_step(0.5) == 1.0);
  CHECK(smooth_step(1.0) == 0.0);
  CHECK(smooth_step(7.0) == 0.0);
  CHECK(smooth_step(0.75) == doctest::Approx(0.5));  // symmetric glue
  // non-increasing on the whole transition, strictly decreasing away from
  // the C-infinity-flat endpoints
  double prev = 1.0;
  for (int i = 1; i < 40; ++i) {
    double s = 0.5 + 0.5 * i / 40.0;
    double v = smooth_step(s);
    CHECK(v <= prev);
    if (s >= 0.6 && s <= 0.95) CHECK(v < prev);
    prev = v;
  }
  // derivative matches finite differences and vanishes flatly at the ends
  for (double s : {0.55, 0.6, 0.75, 0.9, 0.97}) {
    double fd = central_diff([](double x) { return smooth_step(x); }, s, 1e-6);
    CHECK(smooth_step_deriv(s) == doctest::Approx(fd).epsilon(1e-6));
  }
  CHECK(smooth_step_deriv(0.5) == 0.0);
  CHECK(smooth_step_deriv(1.0) == 0.0);
  CHECK(std::abs(smooth_step_deriv(0.5001)) < 1e-300);
  CHECK(std::abs(1.0 - smooth_step(0.5001)) < 1e-300);
}

TEST_CASE("classification matches the definitions") {
  auto fam = CoefficientFamily::polynomial(1.0, 0.5, 0.0, 0.625, 2, 4);
  ZoneConfig cfg;

  // on the separating curve the weight vanishes, forcing the reduced zone
  for (double t : {0.0, 1.0, 5.0, 20.0}) {
    double xi = fam.eta(t);
    CHECK(classify(fam, cfg, t, xi).tag == ZoneTag::Red);
    CHECK(classify(fam, cfg, t, xi).region == Region::boundary);
  }

  // small frequency below the curve at t = 0: dissipative
  {
    double xi = 0.1;
    REQUIRE(xi <= cfg.d0 / fam.F(0.0));
    REQUIRE(xi < fam.eta(0.0));
    Zone z = classify(fam, cfg, 0.0, xi);
    CHECK(z.tag == ZoneTag::Diss);
    CHECK(z.region == Region::elliptic);
  }

  // large frequency at t = 0: hyperbolic
  {
    Zone z = classify(fam, cfg, 0.0, 100.0);
    CHECK(z.tag == ZoneTag::Hyp);
    CHECK(z.region == Region::hyperbolic);
  }

  // cross-check against the independent linear-scale evaluation on a grid
  for (int i = 0; i <= 60; ++i) {
    double t = 30.0 * i / 60.0;
    for (int j = 0; j <= 60; ++j) {
      double xi = std::pow(10.0, -4.0 + 6.0 * j / 60.0);
      if (near_zone_boundary(fam, cfg, t, xi, 1e-9)) continue;
      CHECK(classify(fam, cfg, t, xi).tag == ref_classify(fam, cfg, t, xi));
    }
  }

  // invalid arguments
  CHECK_THROWS_AS(classify(fam, cfg, -1.0, 1.0), ParamError);
  CHECK_THROWS_AS(classify(fam, cfg, 1.0, 0.0), ParamError);
}

TEST_CASE("separating times: decreasing eta") {
  // beta < alpha, so eta is strictly decreasing and a fixed small frequency
  // marches through Diss -> Ell -> Red -> (Osc) -> Hyp
  auto fam = CoefficientFamily::polynomial(1.0, 0.5, 0.0, 0.625, 2, 0);
  ZoneConfig cfg;
  double xi = 0.05;
  auto st = separating_times(fam, cfg, xi, 400.0);
  REQUIRE(st.t_diss.has_value());
  REQUIRE(st.t_ell.has_value());
  REQUIRE(st.t_red.has_value());
  REQUIRE(st.t_xi.has_value());
  CHECK(*st.t_diss <= *st.t_ell);
  CHECK(*st.t_ell <= *st.t_xi);
  CHECK(*st.t_xi <= *st.t_red);
  if (st.t_osc) CHECK(*st.t_red <= *st.t_osc);

  // defining equalities hold at the roots
  CHECK(xi * fam.F(*st.t_diss) == doctest::Approx(cfg.d0).epsilon(1e-6));
  CHECK(fam.bracket(*st.t_ell, xi) ==
        doctest::Approx(0.5 * cfg.eps * fam.rho_omega(*st.t_ell)).epsilon(1e-6));
  CHECK(fam.eta(*st.t_xi) ==
        doctest::Approx(xi / std::sqrt(1.0 - sqr(cfg.eps))).epsilon(1e-6));

  // classification flips across each boundary
  double h = 1e-6 * (1.0 + *st.t_red);
  CHECK(classify(fam, cfg, *st.t_diss - h, xi).tag == ZoneTag::Diss);
  CHECK(classify(fam, cfg, *st.t_diss + h, xi).tag == ZoneTag::Ell);
  CHECK(classify(fam, cfg, *st.t_ell - h, xi).tag == ZoneTag::Ell);
  CHECK(classify(fam, cfg, *st.t_ell + h, xi).tag == ZoneTag::Red);
  CHECK(classify(fam, cfg, *st.t_red - h, xi).tag == ZoneTag::Red);
  CHECK(classify(fam, cfg, *st.t_red + h, xi).tag != ZoneTag::Red);
  if (st.t_osc) {
    CHECK(classify(fam, cfg, *st.t_osc + h, xi).tag == ZoneTag::Hyp);
  }
}

TEST_CASE("separating times: increasing and constant eta") {
  ZoneConfig cfg;
  // beta > alpha: eta increasing, a fixed frequency eventually sinks below
  // the separating curve
  auto inc = CoefficientFamily::polynomial(1.0, 1.5, 0.0, 0.625, 2, 0);
  double xi = 2.0;
  auto st = separating_times(inc, cfg, xi, 400.0);
  REQUIRE(st.t_xi.has_value());
  CHECK(inc.eta(*st.t_xi) ==
        doctest::Approx(xi / std::sqrt(1.0 - sqr(cfg.eps))).epsilon(1e-6));
  REQUIRE(st.t_red.has_value());
  REQUIRE(st.t_ell.has_value());
  CHECK(*st.t_red <= *st.t_xi);
  CHECK(*st.t_xi <= *st.t_ell);

  // alpha = beta: eta constant, t_xi undefined off its single value
  auto flat = CoefficientFamily::polynomial(1.0, 1.0, 0.0, 0.625, 2, 0);
  auto sf = separating_times(flat, cfg, 0.7 * flat.eta(0.0), 100.0);
  CHECK_FALSE(sf.t_xi.has_value());

  CHECK_THROWS_AS(separating_times(flat, cfg, 0.0, 10.0), ParamError);
}

TEST_CASE("h1 and h2 weights") {
  auto fam = CoefficientFamily::polynomial(1.0, 0.5, 0.0, 0.625, 2, 4);
  ZoneConfig cfg;

  // pure branches
  {
    double t = 0.0, xi = 0.1;  // |xi| F = 0.25 <= 1/2
    REQUIRE(xi * fam.F(t) <= 0.5);
    CHECK(h1(fam, cfg, t, xi) ==
          doctest::Approx(fam.lambda(t) / fam.F(t)).epsilon(1e-12));
  }
  {
    double t = 0.0, xi = 50.0;  // deep hyperbolic
    CHECK(h1(fam, cfg, t, xi) ==
          doctest::Approx(fam.lambda(t) * xi).epsilon(1e-12));
    CHECK(h2(fam, cfg, t, xi) ==
          doctest::Approx(fam.bracket(t, xi)).epsilon(1e-12));
  }
  {
    double t = 3.0, xi = fam.eta(3.0);  // on Gamma: chi = 1 branch
    CHECK(h2(fam, cfg, t, xi) ==
          doctest::Approx(0.5 * cfg.eps * fam.rho_omega(t)).epsilon(1e-12));
  }

  // positivity and continuity along t and xi
  for (int j = 0; j <= 20; ++j) {
    double xi = std::pow(10.0, -3.0 + 5.0 * j / 20.0);
    double p1 = h1(fam, cfg, 0.0, xi), p2 = h2(fam, cfg, 0.0, xi);
    // step fine enough to resolve the fastest oscillator bump
    for (int i = 1; i <= 8000; ++i) {
      double t = 20.0 * i / 8000.0;
      double v1 = h1(fam, cfg, t, xi), v2 = h2(fam, cfg, t, xi);
      CHECK(v1 > 0.0);
      CHECK(v2 > 0.0);
      CHECK(std::abs(v1 - p1) <= 0.12 * std::max(v1, p1));
      CHECK(std::abs(v2 - p2) <= 0.12 * std::max(v2, p2));
      p1 = v1;
      p2 = v2;
    }
  }

  // time derivatives match central differences in all three cutoff branches
  auto check_derivs = [&](double t, double xi) {
    auto f1 = [&](double s) { return h1(fam, cfg, s, xi); };
    auto f2 = [&](double s) { return h2(fam, cfg, s, xi); };
    WeightValue w1 = h1_with_deriv(fam, cfg, t, xi);
    WeightValue w2 = h2_with_deriv(fam, cfg, t, xi);
    CHECK(w1.value == doctest::Approx(f1(t)).epsilon(1e-12));
    CHECK(w2.value == doctest::Approx(f2(t)).epsilon(1e-12));
    double d1 = central_diff(f1, t, 1e-5 * (1.0 + t));
    double d2 = central_diff(f2, t, 1e-5 * (1.0 + t));
    CHECK(w1.dt == doctest::Approx(d1).epsilon(1e-5));
    CHECK(w2.dt == doctest::Approx(d2).epsilon(1e-5));
  };
  // scan for frequencies that put each weight in its transition band
  for (double t : {1.0, 4.0}) {
    check_derivs(t, 0.25 * cfg.d0 / fam.F(t));  // chi = 1 branch of h1
    check_derivs(t, 10.0);                      // chi = 0 branches
    for (int j = 0; j < 400; ++j) {
      double xi = std::pow(10.0, -4.0 + 6.0 * j / 400.0);
      double s1 = xi * fam.F(t);
      double s2 = fam.bracket(t, xi) / (0.5 * cfg.eps * fam.rho_omega(t));
      if (s1 > 0.6 && s1 < 0.9) check_derivs(t, xi);
      if (s2 > 0.6 && s2 < 0.9) check_derivs(t, xi);
    }
  }
}

TEST_CASE("partition property on a raster") {
  // The Osc/Hyp side conditions leave an uncovered strip of fixed log-width
  // around the separating curve (see in_osc_side_gap); its share of a raster
  // therefore depends on the frequency window. Over a wide log-frequency
  // window the strip is a vanishing fraction; every uncovered point must
  // still be attributed to the gap or to a boundary sliver.
  auto fam = CoefficientFamily::polynomial(1.0, 0.6, -0.5, 0.625, 2, 6);
  ZoneConfig cfg;
  int total = 0, uncovered = 0;
  for (int i = 0; i <= 200; ++i) {
    double t = 4.0 + (200.0 - 4.0) * i / 200.0;
    for (int j = 0; j <= 200; ++j) {
      double xi = std::pow(10.0, -150.0 + 300.0 * j / 200.0);
      ++total;
      Zone z = classify(fam, cfg, t, xi);
      if (z.tag == ZoneTag::Uncovered) {
        ++uncovered;
        bool explained = in_osc_side_gap(fam, cfg, t, xi) ||
                         near_zone_boundary(fam, cfg, t, xi, 1e-3);
        CHECK_MESSAGE(explained, "t=", t, " xi=", xi);
      }
    }
  }
  CHECK(uncovered <= total / 1000);

  // with slowly growing frequencies excluded the gap family shows genuine
  // uncovered points that are all attributed to the Osc side conditions
  auto gap = CoefficientFamily::polynomial(1.0, 0.5, 0.0, 0.625, 2, 0);
  int gap_points = 0;
  for (int i = 0; i <= 100; ++i) {
    double t = 6.0 + 94.0 * i / 100.0;
    for (int j = 0; j <= 100; ++j) {
      double xi = std::pow(10.0, -3.0 + 4.0 * j / 100.0);
      if (classify(gap, cfg, t, xi).tag == ZoneTag::Uncovered) {
        ++gap_points;
        CHECK(in_osc_side_gap(gap, cfg, t, xi));
      }
    }
  }
  CHECK(gap_points > 0);
}

TEST_CASE("frequency threshold") {
  ZoneConfig cfg;
  double root = std::sqrt(1.0 - sqr(cfg.eps));
  auto dec = CoefficientFamily::polynomial(1.0, 0.5, 0.0, 0.625, 2, 0);
  CHECK(omega_threshold(dec, cfg, 0.0) ==
        doctest::Approx(dec.eta(0.0) * root).epsilon(1e-12));
  // decreasing eta: the max sticks to eta(0)
  CHECK(omega_threshold(dec, cfg, 25.0) ==
        doctest::Approx(dec.eta(0.0) * root).epsilon(1e-12));
  // increasing eta: the max follows eta(t)
  auto inc = CoefficientFamily::polynomial(1.0, 1.5, 0.0, 0.625, 2, 0);
  CHECK(omega_threshold(inc, cfg, 25.0) ==
        doctest::Approx(inc.eta(25.0) * root).epsilon(1e-12));
  for (double t : {1.0, 2.0, 4.0, 8.0})
    CHECK(omega_threshold(inc, cfg, t) < omega_threshold(inc, cfg, 2.0 * t));
}
