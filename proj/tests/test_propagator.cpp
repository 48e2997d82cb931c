#include <doctest.h>

#include <cmath>
#include <random>

#include "dwv/propagator.hpp"
#include "dwv/quad.hpp"

using namespace dwv;

namespace {

// lambda omega = c, rho omega = b, all scales trivial
CoefficientFamily const_family(double c, double b) {
  CustomHooks h;
  h.lambda = [c](double, int k) { return k == 0 ? c : 0.0; };
  h.rho = [b](double, int k) { return k == 0 ? b : 0.0; };
  h.Lambda = [c](double t) { return 1.0 + c * t; };
  h.Theta = [](double t) { return 1.0 + t; };
  h.Xi = [](double) { return 1.0; };
  h.F = [](double t) { return 1.0 + t; };
  return CoefficientFamily::custom(h, 2);
}

// fixed-step classical RK4 oracle for the companion system
Mat2 rk4_oracle(const CoefficientFamily& fam, const ZoneConfig& cfg, double s,
                double t, double xi, long steps) {
  (void)cfg;
  auto rhs = [&](double tt, const Mat2& y) -> Mat2 {
    double om = fam.omega(tt);
    double c = sqr(fam.lambda(tt) * om * xi);
    double b = fam.rho(tt) * om;
    return {y[2], y[3], -c * y[0] - b * y[2], -c * y[1] - b * y[3]};
  };
  Mat2 y = mat_identity();
  double h = (t - s) / double(steps);
  for (long i = 0; i < steps; ++i) {
    double tt = s + h * double(i);
    Mat2 k1 = rhs(tt, y);
    Mat2 k2 = rhs(tt + 0.5 * h, axpy(y, 0.5 * h, k1));
    Mat2 k3 = rhs(tt + 0.5 * h, axpy(y, 0.5 * h, k2));
    Mat2 k4 = rhs(tt + h, axpy(y, h, k3));
    for (int j = 0; j < 4; ++j) {
      auto u = std::size_t(j);
      y[u] += h / 6.0 * (k1[u] + 2.0 * k2[u] + 2.0 * k3[u] + k4[u]);
    }
  }
  return y;
}

double rel_err(const Mat2& a, const Mat2& b) {
  double scale = std::max(inf_norm(a), 1e-300);
  double r = 0.0;
  for (std::size_t i = 0; i < 4; ++i)
    r = std::max(r, std::abs(a[i] - b[i]));
  return r / scale;
}

}  // namespace

TEST_CASE("constant coefficients: rotation closed form") {
  auto fam = const_family(1.5, 0.0);
  ZoneConfig cfg;
  double tol = 1e-10;
  for (double xi : {0.3, 2.0, 11.0}) {
    for (auto [s, t] : {std::pair{0.0, 1.0}, {0.7, 3.1}, {2.0, 2.0}}) {
      auto fm =
          fundamental_matrix(fam, cfg, SystemKind::RawScalar, s, t, xi, tol);
      double w = 1.5 * xi, phi = w * (t - s);
      Mat2 exact{std::cos(phi), std::sin(phi) / w, -w * std::sin(phi),
                 std::cos(phi)};
      CHECK(rel_err(exact, fm.E) <= 50.0 * tol);
    }
  }
  // s = t gives the identity without any solver work
  auto id = fundamental_matrix(fam, cfg, SystemKind::USystem, 2.0, 2.0, 1.0,
                               1e-8);
  CHECK(id.E == mat_identity());
  CHECK(id.stats.accepted == 0);

  CHECK_THROWS_AS(
      fundamental_matrix(fam, cfg, SystemKind::RawScalar, 1.0, 0.5, 1.0, 1e-8),
      ParamError);
  CHECK_THROWS_AS(
      fundamental_matrix(fam, cfg, SystemKind::RawScalar, 0.0, 1.0, 1.0, 1e-2),
      ParamError);
}

TEST_CASE("kernels: initial data and small-time expansion") {
  auto fam = const_family(2.0, 0.8);
  ZoneConfig cfg;
  auto kv = kernels(fam, cfg, 0.0, 1.0, 1e-10);
  CHECK(kv.K0 == complexd(1.0));
  CHECK(kv.dtK0 == complexd(0.0));
  CHECK(kv.K1 == complexd(0.0));
  CHECK(kv.dtK1 == complexd(1.0));

  // K1 = t - b t^2 / 2 + O(t^3) for nearly constant coefficients
  double t = 1e-3, b = 0.8;
  auto ks = kernels(fam, cfg, t, 1.0, 1e-10);
  CHECK(std::abs(ks.K1 - (t - 0.5 * b * t * t)) < 5e-9);
  CHECK(std::abs(ks.K0 - 1.0) < 5e-6);  // 1 - c^2 xi^2 t^2/2 + ...
}

TEST_CASE("kernel identities hold with the oscillator active") {
  auto fam = CoefficientFamily::polynomial(1.0, 0.5, 0.0, 0.625, 2, 4);
  ZoneConfig cfg;
  double tol = 1e-10;
  // the cross-check against the micro-energy identities runs inside
  // kernels() and throws on mismatch
  for (double t : {0.5, 2.0, 7.0})
    for (double xi : {0.05, 0.7, 5.0}) CHECK_NOTHROW(kernels(fam, cfg, t, xi, tol));

  // the reported derivatives match finite differences of the kernels
  double t = 3.0, xi = 1.3, h = 1e-5;
  auto km = kernels_at_times(fam, cfg, {t - h, t, t + h}, xi, 1e-12);
  complexd fd0 = (km[2].K0 - km[0].K0) / (2.0 * h);
  complexd fd1 = (km[2].K1 - km[0].K1) / (2.0 * h);
  CHECK(std::abs(km[1].dtK0 - fd0) < 1e-6 * std::abs(fd0));
  CHECK(std::abs(km[1].dtK1 - fd1) < 1e-6 * std::abs(fd1));
}

TEST_CASE("cocycle and Abel identities over random samples") {
  auto fam = CoefficientFamily::polynomial(1.0, 0.5, 0.0, 0.625, 2, 4);
  ZoneConfig cfg;
  double tol = 1e-10;
  std::mt19937 rng(20240817);
  std::uniform_real_distribution<double> ut(0.0, 6.0), ux(-3.0, 1.3);
  for (int it = 0; it < 12; ++it) {
    double a = ut(rng), b = ut(rng), c = ut(rng);
    double s = std::min({a, b, c}), t = std::max({a, b, c});
    double r = a + b + c - s - t;
    double xi = std::pow(10.0, ux(rng));
    for (SystemKind kind :
         {SystemKind::RawScalar, SystemKind::USystem, SystemKind::VScalar}) {
      auto Ets = fundamental_matrix(fam, cfg, kind, s, t, xi, tol);
      auto Etr = fundamental_matrix(fam, cfg, kind, r, t, xi, tol);
      auto Ers = fundamental_matrix(fam, cfg, kind, s, r, xi, tol);
      CHECK(rel_err(Ets.E, mat_mul(Etr.E, Ers.E)) <= 50.0 * tol);
    }
    // Abel: det E = exp(-int rho omega) for the companion system. The
    // Wronskian is a difference of entry products, so the residual is
    // measured against the product scale, not the (possibly tiny) det.
    auto raw = fundamental_matrix(fam, cfg, SystemKind::RawScalar, s, t, xi, tol);
    double expected = std::exp(-2.0 * fam.integrate_delta_log(s, t, 1e-12));
    double scale = std::max(
        {expected, std::abs(raw.E[0] * raw.E[3]), std::abs(raw.E[1] * raw.E[2])});
    CHECK(std::abs(mat_det(raw.E) - expected) <= 50.0 * tol * scale);
  }
}

TEST_CASE("adaptive solve matches the fine-step oracle") {
  auto fam = CoefficientFamily::polynomial(1.0, 0.5, 0.0, 0.625, 2, 4);
  ZoneConfig cfg;
  double s = 0.5, t = 2.5, xi = 3.0;
  Mat2 oracle = rk4_oracle(fam, cfg, s, t, xi, 1L << 20);
  auto fm = fundamental_matrix(fam, cfg, SystemKind::RawScalar, s, t, xi, 1e-10);
  CHECK(rel_err(oracle, fm.E) <= 1e-6);
  CHECK(fm.stats.accepted > 0);
  CHECK(fm.stats.accepted < (1 << 16));  // adaptivity actually saves work
}

TEST_CASE("v-representation reproduces the raw solution") {
  auto fam = CoefficientFamily::polynomial(1.0, 0.5, 0.0, 0.625, 2, 4);
  ZoneConfig cfg;
  double tol = 1e-10;
  complexd u0(0.7, -0.2), u1(0.1, 0.9);
  for (double t : {1.0, 4.0})
    for (double xi : {0.02, 0.4, 3.0}) {
      auto raw =
          fundamental_matrix(fam, cfg, SystemKind::RawScalar, 0.0, t, xi, tol);
      Vec2 u = mat_vec(raw.E, {u0, u1});
      auto vs =
          fundamental_matrix(fam, cfg, SystemKind::VScalar, 0.0, t, xi, tol);
      complexd v0 = u0;
      complexd v1 = 0.5 * fam.rho_omega(0.0) * u0 + u1;
      Vec2 v = mat_vec(vs.E, {v0, v1});
      double inv_delta = std::exp(-vs.log_damping);
      complexd u_from_v = v[0] * inv_delta;
      complexd ut_from_v = (v[1] - 0.5 * fam.rho_omega(t) * v[0]) * inv_delta;
      double scale = std::max({std::abs(u[0]), std::abs(u[1]), 1e-300});
      CHECK(std::abs(u[0] - u_from_v) <= 100.0 * tol * scale);
      CHECK(std::abs(u[1] - ut_from_v) <= 100.0 * tol * scale);
    }
}

TEST_CASE("v-system matches the scalar v-equation by similarity") {
  auto fam = CoefficientFamily::polynomial(1.0, 0.5, 0.0, 0.625, 2, 0);
  ZoneConfig cfg;
  double tol = 1e-10, s = 1.0, t = 3.0, xi = 0.02;
  auto sys = fundamental_matrix(fam, cfg, SystemKind::VSystem, s, t, xi, tol);
  auto raw = fundamental_matrix(fam, cfg, SystemKind::VScalar, s, t, xi, tol);
  complexd mi(0.0, -1.0);
  Mat2 St{h2(fam, cfg, t, xi), 0.0, 0.0, mi};
  Mat2 Ss_inv{1.0 / h2(fam, cfg, s, xi), 0.0, 0.0, 1.0 / mi};
  Mat2 expected = mat_mul(St, mat_mul(raw.E, Ss_inv));
  CHECK(rel_err(expected, sys.E) <= 100.0 * tol);
}

TEST_CASE("backward transform residual in the elliptic zone") {
  ZoneConfig cfg;
  cfg.d0 = 1e-3;  // shrink the dissipative zone so small |xi| stays elliptic
  double tol = 1e-10;
  // trivial-oscillation reference and the oscillating variant
  for (int J : {0, 4}) {
    auto fam = CoefficientFamily::polynomial(1.0, 0.5, 0.0, 0.625, 2, J);
    double s = 1.0, t = 3.0, xi = 0.02;
    REQUIRE(classify(fam, cfg, s, xi).tag == ZoneTag::Ell);
    REQUIRE(classify(fam, cfg, t, xi).tag == ZoneTag::Ell);
    CHECK(backward_transform_check(fam, cfg, s, s, xi, tol) == 0.0);
    CHECK(backward_transform_check(fam, cfg, s, t, xi, tol) <= 100.0 * tol);
  }
}

TEST_CASE("energy monotonicity under pure damping") {
  // constant speed, constant damping: physical mode energy can only decay
  auto fam = const_family(1.0, 0.7);
  ZoneConfig cfg;
  std::vector<double> ts;
  for (int i = 0; i <= 160; ++i) ts.push_back(12.0 * i / 160.0);
  for (double xi : {0.2, 1.0, 4.0}) {
    auto ks = kernels_at_times(fam, cfg, ts, xi, 1e-11);
    complexd u0(1.0, 0.0), u1(0.0, 0.3);
    double prev = kInf;
    for (const auto& kv : ks) {
      complexd u = kv.K0 * u0 + kv.K1 * u1;
      complexd ut = kv.dtK0 * u0 + kv.dtK1 * u1;
      double e = 0.5 * (std::norm(ut) + sqr(xi) * std::norm(u));
      CHECK(e <= prev * (1.0 + 1e-9));
      prev = e;
    }
  }
}

TEST_CASE("norm assembly closed forms and refinement") {
  auto fam = CoefficientFamily::polynomial(1.0, 0.5, 0.0, 0.625, 2, 0);
  ZoneConfig cfg;
  auto g = DataProfile::gaussian();
  auto z = DataProfile::zero();
  // t = 0: ||u||^2 = c_n int r^{n-1} e^{-r^2} dr = pi^{n/2}
  for (int n : {1, 2, 3}) {
    double v = assemble_norm(fam, cfg, g, z, 0.0, 0.0, n, 1e-8);
    CHECK(v == doctest::Approx(std::pow(kPi, 0.5 * n)).epsilon(1e-7));
  }
  // indicator data: ||u||^2 = c_n R^n / n
  auto ind = DataProfile::indicator(2.0);
  double vi = assemble_norm(fam, cfg, ind, z, 0.0, 0.0, 2, 1e-8);
  CHECK(vi == doctest::Approx(surface_measure(2) * 4.0 / 2.0).epsilon(1e-7));

  // grid refinement: halving tol moves the value by less than the coarse tol
  double t = 2.0;
  double coarse = assemble_norm(fam, cfg, g, g, t, 0.0, 2, 1e-6);
  double fine = assemble_norm(fam, cfg, g, g, t, 0.0, 2, 5e-7);
  CHECK(std::abs(coarse - fine) <= 1e-6 * std::abs(coarse) * 10.0);

  // table-based assembly agrees with the adaptive path
  std::vector<double> ts{0.0, 1.0, t};
  auto rs = log_grid(1e-5, 9.5, 401);
  auto table = kernel_table(fam, cfg, ts, rs, 1e-8);
  double tab = norm_from_table(table, 2, g, g, 0.0, 2);
  CHECK(tab == doctest::Approx(coarse).epsilon(2e-3));
  double tab0 = norm_from_table(table, 0, g, z, 0.0, 2);
  CHECK(tab0 == doctest::Approx(kPi).epsilon(1e-4));
}
