#include "dwv/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dwv/quad.hpp"

namespace dwv {

const char* system_kind_name(SystemKind k) {
  switch (k) {
    case SystemKind::RawScalar: return "raw-scalar";
    case SystemKind::USystem: return "u-system";
    case SystemKind::VSystem: return "v-system";
    case SystemKind::VScalar: return "v-scalar";
  }
  return "?";
}

namespace {

// Step cap: a fraction of the local oscillation period plus damping scale,
// never stepping over an oscillator bump.
class StepCap {
 public:
  StepCap(const CoefficientFamily& fam, SystemKind kind, double xi)
      : fam_(fam), kind_(kind), xi_(xi) {}

  double operator()(double t) const {
    double freq;
    if (kind_ == SystemKind::VScalar || kind_ == SystemKind::VSystem) {
      freq = std::sqrt(std::abs(fam_.mass(t, xi_)));
    } else {
      double om = fam_.omega(t);
      freq = fam_.lambda(t) * om * xi_ + fam_.rho(t) * om;
    }
    double cap = 2.5 / std::max(freq, 1e-8);
    if (const Oscillator* o = fam_.oscillator()) {
      int j = o->active_bump(t);
      if (j >= 0) {
        cap = std::min(cap, o->width(std::size_t(j)) / 8.0);
      } else {
        // outside all bumps: do not step past the next bump start
        for (std::size_t i = 0; i < o->size(); ++i) {
          if (o->center(i) > t) {
            cap = std::min(cap, std::max(o->center(i) - t, o->width(i) / 8.0));
            break;
          }
        }
      }
    }
    return cap;
  }

 private:
  const CoefficientFamily& fam_;
  SystemKind kind_;
  double xi_;
};

std::function<Mat2(double, const Mat2&)> make_rhs(const CoefficientFamily& fam,
                                                  const ZoneConfig& cfg,
                                                  SystemKind kind, double xi) {
  // D_t Y = A Y with D_t = -i d/dt, so Y' = iA Y.
  switch (kind) {
    case SystemKind::RawScalar:
      return [&fam, xi](double t, const Mat2& y) -> Mat2 {
        double om = fam.omega(t);
        double c = sqr(fam.lambda(t) * om * xi);
        double b = fam.rho(t) * om;
        return {y[2], y[3], -c * y[0] - b * y[2], -c * y[1] - b * y[3]};
      };
    case SystemKind::USystem:
      return [&fam, &cfg, xi](double t, const Mat2& y) -> Mat2 {
        WeightValue h = h1_with_deriv(fam, cfg, t, xi);
        double om = fam.omega(t);
        complexd a11 = h.dt / h.value;
        complexd a12 = complexd(0.0, h.value);
        complexd a21 = complexd(0.0, sqr(fam.lambda(t) * om * xi) / h.value);
        complexd a22 = -fam.rho(t) * om;
        return {a11 * y[0] + a12 * y[2], a11 * y[1] + a12 * y[3],
                a21 * y[0] + a22 * y[2], a21 * y[1] + a22 * y[3]};
      };
    case SystemKind::VSystem:
      return [&fam, &cfg, xi](double t, const Mat2& y) -> Mat2 {
        WeightValue h = h2_with_deriv(fam, cfg, t, xi);
        complexd a11 = h.dt / h.value;
        complexd a12 = complexd(0.0, h.value);
        complexd a21 = complexd(0.0, fam.mass(t, xi) / h.value);
        return {a11 * y[0] + a12 * y[2], a11 * y[1] + a12 * y[3],
                a21 * y[0], a21 * y[1]};
      };
    case SystemKind::VScalar:
      return [&fam, xi](double t, const Mat2& y) -> Mat2 {
        double m = fam.mass(t, xi);
        return {y[2], y[3], -m * y[0], -m * y[1]};
      };
  }
  throw ParamError("unknown system kind");
}

void check_solver_args(double s, double t, double tol) {
  if (!(s >= 0.0 && t >= s))
    throw ParamError("fundamental matrix: need 0 <= s <= t");
  if (!(tol >= 1e-12 && tol <= 1e-4))
    throw ParamError("fundamental matrix: tol must lie in [1e-12, 1e-4]");
}

}  // namespace

FundamentalMatrix fundamental_matrix(const CoefficientFamily& fam,
                                     const ZoneConfig& cfg, SystemKind kind,
                                     double s, double t, double xi_mag,
                                     double tol) {
  check_solver_args(s, t, tol);
  if (!(xi_mag > 0.0))
    throw ParamError("fundamental matrix: |xi| must be positive");
  FundamentalMatrix out;
  out.s = s;
  out.t = t;
  out.xi_mag = xi_mag;
  out.kind = kind;
  out.tol = tol;
  if (t > s) {
    auto rhs = make_rhs(fam, cfg, kind, xi_mag);
    StepCap cap(fam, kind, xi_mag);
    // per-step errors accumulate over the step count; tighten the controller
    // so the global error stays well inside the requested tol
    double step_tol = std::max(tol / 20.0, 1e-13);
    out.E = integrate_ode(rhs, mat_identity(), s, t, step_tol, cap, out.stats);
  }
  if (kind == SystemKind::VScalar || kind == SystemKind::VSystem)
    out.log_damping = fam.integrate_delta_log(s, t, std::min(tol, 1e-10));
  return out;
}

KernelValues kernels(const CoefficientFamily& fam, const ZoneConfig& cfg,
                     double t, double xi_mag, double tol) {
  // direct: columns of the companion fundamental matrix are the kernels
  FundamentalMatrix raw =
      fundamental_matrix(fam, cfg, SystemKind::RawScalar, 0.0, t, xi_mag, tol);
  KernelValues kv{raw.E[0], raw.E[2], raw.E[1], raw.E[3]};

  // micro-energy route: K0 = h1(0)/h1(t) E^{(11)}, D_t K0 = h1(0) E^{(21)},
  // and with D_t u(0) = -i u_t(0): K1 = -i E^{(12)} / h1(t),
  // D_t K1 = -i E^{(22)}; convert D_t back to d/dt (factor i)
  FundamentalMatrix eu =
      fundamental_matrix(fam, cfg, SystemKind::USystem, 0.0, t, xi_mag, tol);
  double h1_0 = h1(fam, cfg, 0.0, xi_mag);
  double h1_t = h1(fam, cfg, t, xi_mag);
  KernelValues alt;
  alt.K0 = (h1_0 / h1_t) * eu.E[0];
  alt.dtK0 = complexd(0.0, 1.0) * h1_0 * eu.E[2];
  alt.K1 = complexd(0.0, -1.0) / h1_t * eu.E[1];
  alt.dtK1 = eu.E[3];

  double scale = std::max({std::abs(kv.K0), std::abs(kv.K1),
                           std::abs(kv.dtK0), std::abs(kv.dtK1), 1e-30});
  double res = std::max({std::abs(kv.K0 - alt.K0), std::abs(kv.K1 - alt.K1),
                         std::abs(kv.dtK0 - alt.dtK0),
                         std::abs(kv.dtK1 - alt.dtK1)}) /
               scale;
  if (res > 100.0 * tol) {
    std::ostringstream os;
    os << "kernel cross-check mismatch: relative residual " << res << " at t="
       << t << " |xi|=" << xi_mag;
    throw ConsistencyError(os.str());
  }
  return kv;
}

std::vector<KernelValues> kernels_at_times(const CoefficientFamily& fam,
                                           const ZoneConfig& cfg,
                                           const std::vector<double>& ts,
                                           double xi_mag, double tol,
                                           double floor_log) {
  check_solver_args(0.0, ts.empty() ? 0.0 : ts.back(), tol);
  for (std::size_t i = 1; i < ts.size(); ++i)
    if (!(ts[i] >= ts[i - 1]))
      throw ParamError("kernel sweep: times must be sorted");
  auto rhs = make_rhs(fam, cfg, SystemKind::RawScalar, xi_mag);
  StepCap cap(fam, SystemKind::RawScalar, xi_mag);
  std::vector<KernelValues> out;
  out.reserve(ts.size());
  Mat2 y = mat_identity();
  double cur = 0.0;
  bool dead = false;
  OdeStats stats;
  for (double tt : ts) {
    if (!dead && tt > cur) {
      y = integrate_ode(rhs, y, cur, tt, tol, cap, stats, floor_log);
      cur = tt;
      if (stats.floored) dead = true;
    }
    if (dead)
      out.push_back({0.0, 0.0, 0.0, 0.0});
    else
      out.push_back({y[0], y[2], y[1], y[3]});
  }
  return out;
}

double backward_transform_check(const CoefficientFamily& fam,
                                const ZoneConfig& cfg, double s, double t,
                                double xi_mag, double tol) {
  check_solver_args(s, t, tol);
  // left side: E on the micro-energy (lambda |xi| u, D_t u), obtained from
  // the companion solve by the exact similarity S = diag(lambda xi, -i)
  FundamentalMatrix raw =
      fundamental_matrix(fam, cfg, SystemKind::RawScalar, s, t, xi_mag, tol);
  complexd ls = fam.lambda(s) * xi_mag, lt = fam.lambda(t) * xi_mag;
  complexd mi(0.0, -1.0);
  Mat2 St{lt, 0.0, 0.0, mi};
  Mat2 Ss_inv{1.0 / ls, 0.0, 0.0, 1.0 / mi};
  Mat2 lhs = mat_mul(St, mat_mul(raw.E, Ss_inv));

  // right side: E_V from the scalar v-equation by S2 = diag(h2, -i), then
  // T(t) E_V T^{-1}(s) with the delta ratio factored analytically
  FundamentalMatrix vs =
      fundamental_matrix(fam, cfg, SystemKind::VScalar, s, t, xi_mag, tol);
  double h2s = h2(fam, cfg, s, xi_mag), h2t = h2(fam, cfg, t, xi_mag);
  Mat2 S2t{h2t, 0.0, 0.0, mi};
  Mat2 S2s_inv{1.0 / h2s, 0.0, 0.0, 1.0 / mi};
  Mat2 Ev = mat_mul(S2t, mat_mul(vs.E, S2s_inv));
  double rot = fam.rho_omega(t), ros = fam.rho_omega(s);
  // T(t) = (1/delta(t)) Ttil(t), T^{-1}(s) = delta(s) Ttil_inv(s)
  Mat2 Ttil{lt / h2t, 0.0, complexd(0.0, 0.5 * rot) / h2t, 1.0};
  Mat2 Ttil_inv{h2s / ls, 0.0, complexd(0.0, -0.5 * ros) / ls, 1.0};
  double log_ratio = -vs.log_damping;  // log(delta(s)/delta(t))
  Mat2 rhs = mat_mul(Ttil, mat_mul(Ev, Ttil_inv));
  double factor = std::exp(log_ratio);
  for (auto& c : rhs) c *= factor;

  double scale = std::max(inf_norm(lhs), 1e-300);
  double res = 0.0;
  for (int i = 0; i < 4; ++i)
    res = std::max(res, std::abs(lhs[std::size_t(i)] - rhs[std::size_t(i)]));
  return res / scale;
}

DataProfile DataProfile::gaussian() {
  // e^{-r^2/2}; |uhat|^2 = e^{-r^2} falls below 1e-18 at r ~ 6.44
  double R = std::sqrt(-std::log(1e-18));
  return {[](double r) { return std::exp(-0.5 * r * r); }, R, "gaussian"};
}

DataProfile DataProfile::indicator(double R) {
  if (!(R > 0.0)) throw ParamError("indicator profile: radius must be > 0");
  return {[R](double r) { return r <= R ? 1.0 : 0.0; }, R, "indicator"};
}

DataProfile DataProfile::zero() {
  return {[](double) { return 0.0; }, 0.0, "zero"};
}

double surface_measure(int n) {
  if (n < 1) throw ParamError("surface measure: dimension must be >= 1");
  return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

double assemble_norm(const CoefficientFamily& fam, const ZoneConfig& cfg,
                     const DataProfile& data0, const DataProfile& data1,
                     double t, double sigma, int n, double tol,
                     bool time_deriv) {
  if (!(sigma >= 0.0)) throw ParamError("norm assembly: sigma must be >= 0");
  double R = std::max(data0.support_radius, data1.support_radius);
  if (R <= 0.0) return 0.0;
  double p = 2.0 * sigma + n - 1;
  auto integrand = [&](double r) {
    if (r < 0.0) return 0.0;
    if (r == 0.0) {
      if (p > 0.0) return 0.0;
      // p = 0 (n = 1, sigma = 0): extend by continuity, the kernels are
      // smooth in |xi| and the endpoint value is |u(t, xi=0)|^2
      r = 1e-12 * R;
    }
    KernelValues kv = kernels(fam, cfg, t, r, tol);
    complexd val = time_deriv ? kv.dtK0 * data0.fhat(r) + kv.dtK1 * data1.fhat(r)
                              : kv.K0 * data0.fhat(r) + kv.K1 * data1.fhat(r);
    return std::pow(r, p) * std::norm(val);
  };
  std::vector<double> brk{omega_threshold(fam, cfg, t),
                          cfg.d0 * std::exp(-fam.log_F(t)),
                          data0.support_radius, data1.support_radius};
  QuadResult q = integrate(integrand, 0.0, R, std::max(tol, 1e-8), brk);
  if (!q.converged) {
    std::ostringstream os;
    os << "norm assembly quadrature did not converge at t=" << t
       << " (error " << q.error << ")";
    throw NumericError(os.str());
  }
  return surface_measure(n) * q.value;
}

KernelTable kernel_table(const CoefficientFamily& fam, const ZoneConfig& cfg,
                         const std::vector<double>& ts,
                         const std::vector<double>& rs, double tol,
                         double floor_log, int jobs) {
  KernelTable table;
  table.ts = ts;
  table.rs = rs;
  table.k.resize(ts.size() * rs.size());
  parallel_for(rs.size(), unsigned(std::max(jobs, 1)), [&](std::size_t ir) {
    auto col = kernels_at_times(fam, cfg, ts, rs[ir], tol, floor_log);
    for (std::size_t it = 0; it < ts.size(); ++it)
      table.k[it * rs.size() + ir] = col[it];
  });
  return table;
}

double norm_from_table(const KernelTable& table, std::size_t it,
                       const DataProfile& data0, const DataProfile& data1,
                       double sigma, int n, bool time_deriv) {
  const auto& rs = table.rs;
  if (rs.size() < 3 || rs.size() % 2 == 0)
    throw ParamError("norm from table: need an odd radial grid of size >= 3");
  auto f = [&](std::size_t ir) {
    double r = rs[ir];
    const KernelValues& kv = table.at(it, ir);
    complexd val = time_deriv ? kv.dtK0 * data0.fhat(r) + kv.dtK1 * data1.fhat(r)
                              : kv.K0 * data0.fhat(r) + kv.K1 * data1.fhat(r);
    // extra factor r from integrating in log r
    return std::pow(r, 2.0 * sigma + n - 1) * std::norm(val) * r;
  };
  double sum = 0.0;
  for (std::size_t i = 0; i + 2 < rs.size(); i += 2) {
    double h = 0.5 * (std::log(rs[i + 2]) - std::log(rs[i]));
    sum += h / 3.0 * (f(i) + 4.0 * f(i + 1) + f(i + 2));
  }
  return surface_measure(n) * sum;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi > lo && n >= 2))
    throw ParamError("log grid: need 0 < lo < hi and n >= 2");
  std::vector<double> g(static_cast<std::size_t>(n), 0.0);
  double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < n; ++i)
    g[std::size_t(i)] = std::exp(llo + (lhi - llo) * i / (n - 1));
  return g;
}

}  // namespace dwv
