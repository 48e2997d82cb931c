#include "dwv/zones.hpp"

#include <algorithm>
#include <cmath>

namespace dwv {

void ZoneConfig::validate() const {
  if (!(N >= 1.0)) throw ParamError("zone config: N must satisfy N >= 1");
  if (!(eps > 0.0 && eps < 0.5))
    throw ParamError("zone config: eps must lie in (0, 1/2)");
  if (!(d0 > 0.0)) throw ParamError("zone config: d0 must be positive");
  if (!(t0 >= 0.0)) throw ParamError("zone config: t0 must be non-negative");
}

const char* zone_tag_name(ZoneTag tag) {
  switch (tag) {
    case ZoneTag::Hyp: return "hyp";
    case ZoneTag::Osc: return "osc";
    case ZoneTag::Red: return "red";
    case ZoneTag::Ell: return "ell";
    case ZoneTag::Diss: return "diss";
    case ZoneTag::Uncovered: return "uncovered";
  }
  return "?";
}

namespace {

// All zone comparisons in one place, evaluated once per point in log scale.
struct PointData {
  double log_xi;
  double log_eta;
  double log_jpn;        // log <xi>
  double log_eps_thr;    // log(eps rho omega / 2)
  double log_N_thr;      // log(N rho omega / 2)
  double log_diss_thr;   // log(d0 / F(Lambda(t)))
  double log_Theta_xi;   // log(Theta |xi|)
  double log_Lambda_xi;  // log(Lambda |xi|)
  double log_N;
};

PointData point_data(const CoefficientFamily& fam, const ZoneConfig& cfg,
                     double t, double xi_mag) {
  if (!(t >= 0.0)) throw ParamError("zone classification: t must be >= 0");
  if (!(xi_mag > 0.0))
    throw ParamError("zone classification: |xi| must be positive");
  PointData p;
  p.log_xi = std::log(xi_mag);
  p.log_eta = fam.log_eta(t);
  p.log_jpn = fam.log_bracket(t, p.log_xi);
  double log_ro_half = fam.log_rho(t) + std::log(fam.omega(t)) - kLog2;
  p.log_eps_thr = std::log(cfg.eps) + log_ro_half;
  p.log_N_thr = std::log(cfg.N) + log_ro_half;
  p.log_diss_thr = std::log(cfg.d0) - fam.log_F(t);
  p.log_Theta_xi = fam.log_Theta(t) + p.log_xi;
  p.log_Lambda_xi = fam.log_Lambda(t) + p.log_xi;
  p.log_N = std::log(cfg.N);
  return p;
}

}  // namespace

Zone classify(const CoefficientFamily& fam, const ZoneConfig& cfg, double t,
              double xi_mag) {
  cfg.validate();
  PointData p = point_data(fam, cfg, t, xi_mag);
  bool pi_hyp = p.log_xi > p.log_eta;
  bool pi_ell = p.log_xi < p.log_eta;
  // precedence: Diss > Ell > Red > Osc > Hyp (boundaries are measure zero,
  // ties must resolve deterministically)
  if (p.log_xi <= p.log_diss_thr && pi_ell)
    return {ZoneTag::Diss, Region::elliptic};
  if (p.log_xi >= p.log_diss_thr && p.log_jpn >= p.log_eps_thr && pi_ell)
    return {ZoneTag::Ell, Region::elliptic};
  if (p.log_jpn <= p.log_eps_thr) return {ZoneTag::Red, Region::boundary};
  if (p.log_jpn <= p.log_N_thr && pi_hyp && p.log_Theta_xi <= p.log_N &&
      p.log_Lambda_xi >= p.log_N)
    return {ZoneTag::Osc, Region::hyperbolic};
  if (p.log_jpn >= p.log_N_thr && pi_hyp && p.log_Theta_xi >= p.log_N)
    return {ZoneTag::Hyp, Region::hyperbolic};
  return {ZoneTag::Uncovered, Region::boundary};
}

bool in_osc_side_gap(const CoefficientFamily& fam, const ZoneConfig& cfg,
                     double t, double xi_mag) {
  if (classify(fam, cfg, t, xi_mag).tag != ZoneTag::Uncovered) return false;
  PointData p = point_data(fam, cfg, t, xi_mag);
  return p.log_xi > p.log_eta && p.log_jpn > p.log_eps_thr;
}

bool near_zone_boundary(const CoefficientFamily& fam, const ZoneConfig& cfg,
                        double t, double xi_mag, double tol) {
  PointData p = point_data(fam, cfg, t, xi_mag);
  auto close = [&](double a, double b) { return std::abs(a - b) <= tol; };
  return close(p.log_xi, p.log_eta) || close(p.log_xi, p.log_diss_thr) ||
         close(p.log_jpn, p.log_eps_thr) || close(p.log_jpn, p.log_N_thr) ||
         close(p.log_Theta_xi, p.log_N) || close(p.log_Lambda_xi, p.log_N);
}

namespace {

// Sample grid for bracketing: uniform plus oscillator bump edges so sign
// changes inside bumps are not skipped.
std::vector<double> bracketing_grid(const CoefficientFamily& fam,
                                    double horizon) {
  const int n = 4096;
  std::vector<double> g;
  g.reserve(n + 64);
  for (int i = 0; i <= n; ++i) g.push_back(horizon * double(i) / n);
  for (double e : fam.bump_edges(0.0, horizon)) g.push_back(e);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

template <class G>
double bisect(const G& g, double a, double b, double tol) {
  double ga = g(a);
  for (int it = 0; it < 200 && (b - a) > tol * std::max(1.0, b); ++it) {
    double m = 0.5 * (a + b);
    double gm = g(m);
    if ((ga <= 0.0) == (gm <= 0.0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

// All roots of g on the grid, in increasing order.
template <class G>
std::vector<double> find_roots(const G& g, const std::vector<double>& grid,
                               double tol) {
  std::vector<double> roots;
  double prev = g(grid.front());
  for (std::size_t i = 1; i < grid.size(); ++i) {
    double cur = g(grid[i]);
    if (std::isfinite(prev) && std::isfinite(cur) &&
        (prev <= 0.0) != (cur <= 0.0))
      roots.push_back(bisect(g, grid[i - 1], grid[i], tol));
    prev = cur;
  }
  return roots;
}

}  // namespace

SeparatingTimes separating_times(const CoefficientFamily& fam,
                                 const ZoneConfig& cfg, double xi_mag,
                                 double horizon, double tol) {
  cfg.validate();
  if (!(xi_mag > 0.0))
    throw ParamError("separating times: |xi| must be positive");
  double log_xi = std::log(xi_mag);
  std::vector<double> grid = bracketing_grid(fam, horizon);
  SeparatingTimes out;

  // |xi| F(Lambda(t)) = d0
  auto g_diss = [&](double t) {
    return log_xi + fam.log_F(t) - std::log(cfg.d0);
  };
  auto diss_roots = find_roots(g_diss, grid, tol);
  if (!diss_roots.empty()) out.t_diss = diss_roots.front();

  // <xi> = c rho omega / 2; the elliptic-side root is t_ell, the
  // hyperbolic-side root is t_red
  auto band_gap = [&](double t, double c) {
    return fam.log_bracket(t, log_xi) -
           (std::log(c) + fam.log_rho(t) + std::log(fam.omega(t)) - kLog2);
  };
  auto g_eps = [&](double t) { return band_gap(t, cfg.eps); };
  for (double r : find_roots(g_eps, grid, tol)) {
    if (log_xi < fam.log_eta(r)) {
      if (!out.t_ell) out.t_ell = r;
    } else {
      if (!out.t_red) out.t_red = r;
    }
  }

  // <xi> = N rho omega / 2 on the hyperbolic side
  auto g_N = [&](double t) { return band_gap(t, cfg.N); };
  for (double r : find_roots(g_N, grid, tol))
    if (log_xi > fam.log_eta(r) && !out.t_osc) out.t_osc = r;

  // eta(t) = |xi| / sqrt(1 - eps^2), only for strictly monotone eta
  double target = log_xi - 0.5 * std::log1p(-sqr(cfg.eps));
  bool inc = true, dec = true;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    double d = fam.log_eta(grid[i]) - fam.log_eta(grid[i - 1]);
    inc = inc && d > 0.0;
    dec = dec && d < 0.0;
  }
  if (inc || dec) {
    auto g_xi = [&](double t) { return fam.log_eta(t) - target; };
    double g0 = g_xi(grid.front()), g1 = g_xi(grid.back());
    if ((g0 <= 0.0) != (g1 <= 0.0))
      out.t_xi = bisect(g_xi, grid.front(), grid.back(), tol);
  }
  return out;
}

double smooth_step(double s) {
  if (s <= 0.5) return 1.0;
  if (s >= 1.0) return 0.0;
  double u = 2.0 * s - 1.0;
  double a = std::exp(-1.0 / u);
  double b = std::exp(-1.0 / (1.0 - u));
  return b / (a + b);
}

double smooth_step_deriv(double s) {
  if (s <= 0.5 || s >= 1.0) return 0.0;
  double u = 2.0 * s - 1.0;
  if (u < 1e-12 || u > 1.0 - 1e-12) return 0.0;
  double a = std::exp(-1.0 / u);
  double b = std::exp(-1.0 / (1.0 - u));
  double da = a / sqr(u);
  double db = -b / sqr(1.0 - u);
  return 2.0 * (db * a - da * b) / sqr(a + b);
}

double h1(const CoefficientFamily& fam, const ZoneConfig& cfg, double t,
          double xi_mag) {
  (void)cfg;
  double log_xi = std::log(xi_mag);
  double log_s = log_xi + fam.log_F(t);
  double hi = std::exp(fam.log_lambda(t) + log_xi);  // lambda |xi|
  if (log_s >= 0.0) return hi;
  double lo = std::exp(fam.log_lambda(t) - fam.log_F(t));  // lambda / F
  if (log_s <= -kLog2) return lo;
  double c = smooth_step(std::exp(log_s));
  return c * lo + (1.0 - c) * hi;
}

WeightValue h1_with_deriv(const CoefficientFamily& fam, const ZoneConfig& cfg,
                          double t, double xi_mag) {
  (void)cfg;
  double lam = fam.lambda(t), dlam = fam.lambda(t, 1);
  double log_xi = std::log(xi_mag);
  double log_s = log_xi + fam.log_F(t);
  if (log_s >= 0.0) return {lam * xi_mag, dlam * xi_mag};
  // d/dt F(Lambda(t)) = F^2 / (lambda Xi^2), exact from the reciprocal-tail
  // definition of F
  double F = std::exp(fam.log_F(t));
  double dF_over_F =
      std::exp(fam.log_F(t) - fam.log_lambda(t) - 2.0 * fam.log_Xi(t));
  double lo = lam / F, dlo = (dlam - lam * dF_over_F) / F;
  if (log_s <= -kLog2) return {lo, dlo};
  double s = std::exp(log_s);
  double ds = xi_mag * F * dF_over_F;
  double c = smooth_step(s), dc = smooth_step_deriv(s);
  double hi = lam * xi_mag, dhi = dlam * xi_mag;
  return {c * lo + (1.0 - c) * hi,
          dc * ds * (lo - hi) + c * dlo + (1.0 - c) * dhi};
}

double h2(const CoefficientFamily& fam, const ZoneConfig& cfg, double t,
          double xi_mag) {
  double thr = 0.5 * cfg.eps * fam.rho_omega(t);
  double jpn = fam.bracket(t, xi_mag);
  double s = jpn / thr;
  if (s <= 0.5) return thr;
  if (s >= 1.0) return jpn;
  double c = smooth_step(s);
  return c * thr + (1.0 - c) * jpn;
}

WeightValue h2_with_deriv(const CoefficientFamily& fam, const ZoneConfig& cfg,
                          double t, double xi_mag) {
  double thr = 0.5 * cfg.eps * fam.rho_omega(t);
  double dthr = 0.5 * cfg.eps * fam.rho_omega(t, 1);
  double jpn = fam.bracket(t, xi_mag);
  double s = jpn / thr;
  if (s <= 0.5) return {thr, dthr};  // bracket jet may be singular near Gamma
  JetR bj = fam.bracket_jet(t, xi_mag);
  double djpn = bj.d[1];
  if (s >= 1.0) return {jpn, djpn};
  double ds = (djpn * thr - jpn * dthr) / sqr(thr);
  double c = smooth_step(s), dc = smooth_step_deriv(s);
  return {c * thr + (1.0 - c) * jpn,
          dc * ds * (thr - jpn) + c * dthr + (1.0 - c) * djpn};
}

double omega_threshold(const CoefficientFamily& fam, const ZoneConfig& cfg,
                       double t) {
  cfg.validate();
  double e = std::max(fam.log_eta(0.0), fam.log_eta(t));
  return std::exp(e) * std::sqrt(1.0 - sqr(cfg.eps));
}

}  // namespace dwv
