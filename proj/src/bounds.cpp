#include "dwv/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "dwv/quad.hpp"

namespace dwv {

const char* bound_kind_name(BoundKind kind) {
  switch (kind) {
    case BoundKind::HypZone: return "hyp-zone";
    case BoundKind::OscZone: return "osc-zone";
    case BoundKind::RedZone: return "red-zone";
    case BoundKind::EllRefined: return "ell-refined";
    case BoundKind::EllUnrefined: return "ell-unrefined";
    case BoundKind::DissZone: return "diss-zone";
    case BoundKind::GluedCase11: return "glued-case-1.1";
    case BoundKind::GluedCase12: return "glued-case-1.2";
    case BoundKind::GluedCase13Ell: return "glued-case-1.3-ell";
    case BoundKind::GluedCase13Red: return "glued-case-1.3-red";
    case BoundKind::GluedCase2Large: return "glued-case-2.1";
    case BoundKind::GluedCase22: return "glued-case-2.2";
    case BoundKind::KernelLarge: return "kernel-large-freq";
    case BoundKind::KernelSmall: return "kernel-small-freq";
    case BoundKind::KernelDiss: return "kernel-diss-freq";
    case BoundKind::TheoremRate: return "theorem-rate";
  }
  return "?";
}

namespace {

constexpr double kQuadTol = 1e-10;

double log_abs(complexd z) {
  double a = std::abs(z);
  return a > 0.0 ? std::log(a) : kNegInf;
}

// -C xi^2 B, with B given in log scale; saturates to -inf instead of
// overflowing for fast-growing families.
double neg_cxi2(double C, double xi, double log_B) {
  if (log_B == kNegInf) return 0.0;
  double lt = std::log(C) + 2.0 * std::log(xi) + log_B;
  return lt > 700.0 ? kNegInf : -std::exp(lt);
}

// log int_s^t lambda^2 omega / rho (the elliptic-zone exponent integral)
double log_B_ell(const CoefficientFamily& fam, double s, double t) {
  if (t <= s) return kNegInf;
  return fam.log_integral(
      [&](double tau) {
        return 2.0 * fam.log_lambda(tau) + std::log(fam.omega(tau)) -
               fam.log_rho(tau);
      },
      s, t, kQuadTol);
}

// 1/2 int_s^t rho (no omega factor; oscillation-free reference damping)
double half_int_rho(const CoefficientFamily& fam, double s, double t) {
  if (t <= s) return 0.0;
  QuadResult q = integrate([&](double tau) { return fam.rho(tau); }, s, t,
                           kQuadTol);
  return 0.5 * q.value;
}

[[noreturn]] void applicability_error(BoundKind kind, const char* which,
                                      const char* test) {
  std::ostringstream os;
  os << "bound " << bound_kind_name(kind) << ": " << which
     << " point fails the applicability test (" << test << ")";
  throw ParamError(os.str());
}

void require_tag(const CoefficientFamily& fam, const ZoneConfig& cfg,
                 BoundKind kind, const char* which, double t, double xi,
                 ZoneTag want) {
  Zone z = classify(fam, cfg, t, xi);
  if (z.tag != want) applicability_error(kind, which, zone_tag_name(want));
}

void require_hyp_region(const CoefficientFamily& fam, const ZoneConfig& cfg,
                        BoundKind kind, const char* which, double t,
                        double xi) {
  if (classify(fam, cfg, t, xi).region != Region::hyperbolic)
    applicability_error(kind, which, "hyperbolic region");
}

void require_trend(const CoefficientFamily& fam, BoundKind kind, double t,
                   EtaTrend want) {
  if (eta_trend(fam, 0.0, std::max(t, 1.0)) != want)
    applicability_error(kind, "time",
                        want == EtaTrend::decreasing ? "eta decreasing"
                                                     : "eta increasing");
}

double t_xi_or_throw(const CoefficientFamily& fam, const ZoneConfig& cfg,
                     BoundKind kind, double xi, double horizon) {
  auto sep = separating_times(fam, cfg, xi, horizon);
  if (!sep.t_xi)
    applicability_error(kind, "frequency", "separating time t_xi exists");
  return *sep.t_xi;
}

LogMat fill(double v) { return {v, v, v, v}; }

LogMat add(const LogMat& a, const LogMat& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}

// log |S(t) E S(s)^{-1}| for the weight similarity S = diag(w, -i); extra
// is an additional common log factor (backward damping).
LogMat micro_log_abs(const Mat2& E, double lw_t, double lw_s,
                     double extra = 0.0) {
  return {lw_t - lw_s + log_abs(E[0]) + extra, lw_t + log_abs(E[1]) + extra,
          log_abs(E[2]) - lw_s + extra, log_abs(E[3]) + extra};
}

}  // namespace

EtaTrend eta_trend(const CoefficientFamily& fam, double t_lo, double t_hi) {
  const int n = 16;
  bool up = false, down = false;
  double prev = fam.log_eta(t_lo);
  for (int i = 1; i <= n; ++i) {
    double v = fam.log_eta(t_lo + (t_hi - t_lo) * double(i) / n);
    double tolr = 1e-12 * (std::abs(v) + std::abs(prev) + 1.0);
    if (v > prev + tolr) up = true;
    if (v < prev - tolr) down = true;
    prev = v;
  }
  if (up && !down) return EtaTrend::increasing;
  if (down && !up) return EtaTrend::decreasing;
  return EtaTrend::flat;
}

LogMat predicted_bound(const CoefficientFamily& fam, const ZoneConfig& cfg,
                       BoundKind kind, double s, double t, double xi_mag,
                       double C) {
  if (!(0.0 <= s && s <= t)) throw ParamError("bound: need 0 <= s <= t");
  if (!(xi_mag > 0.0)) throw ParamError("bound: |xi| must be positive");
  if (!(C > 0.0)) throw ParamError("bound: exponent constant must be positive");
  double llam_t = fam.log_lambda(t), llam_s = fam.log_lambda(s);
  double lxi = std::log(xi_mag);
  double horizon = 4.0 * std::max(t, 1.0);

  switch (kind) {
    case BoundKind::HypZone: {
      require_tag(fam, cfg, kind, "start", s, xi_mag, ZoneTag::Hyp);
      require_tag(fam, cfg, kind, "end", t, xi_mag, ZoneTag::Hyp);
      return fill(0.5 * (llam_t - llam_s) -
                  fam.integrate_delta_log(s, t, kQuadTol));
    }
    case BoundKind::OscZone: {
      require_tag(fam, cfg, kind, "start", s, xi_mag, ZoneTag::Osc);
      require_tag(fam, cfg, kind, "end", t, xi_mag, ZoneTag::Osc);
      return fill(0.5 * (llam_t - llam_s) - half_int_rho(fam, s, t));
    }
    case BoundKind::RedZone: {
      require_tag(fam, cfg, kind, "start", s, xi_mag, ZoneTag::Red);
      require_tag(fam, cfg, kind, "end", t, xi_mag, ZoneTag::Red);
      return fill((2.0 * cfg.eps - 1.0) * fam.integrate_delta_log(s, t, kQuadTol));
    }
    case BoundKind::EllUnrefined:
    case BoundKind::EllRefined: {
      require_tag(fam, cfg, kind, "start", s, xi_mag, ZoneTag::Ell);
      require_tag(fam, cfg, kind, "end", t, xi_mag, ZoneTag::Ell);
      double expo = neg_cxi2(1.0, xi_mag, log_B_ell(fam, s, t));
      double lrho_t = fam.log_rho(t), lrho_s = fam.log_rho(s);
      if (kind == BoundKind::EllUnrefined)
        return add(fill(expo), {llam_t - llam_s, llam_t + lxi - lrho_s,
                                lrho_t - llam_s - lxi, lrho_t - lrho_s});
      LogMat first = add(
          fill(expo),
          {llam_t - llam_s, llam_t + lxi - lrho_s,
           2.0 * llam_t + lxi - llam_s - lrho_t,
           2.0 * llam_t + 2.0 * lxi - lrho_s - lrho_t});
      double second = -2.0 * fam.integrate_delta_log(s, t, kQuadTol);
      first[3] = log_add(first[3], second);
      return first;
    }
    case BoundKind::DissZone: {
      require_tag(fam, cfg, kind, "start", s, xi_mag, ZoneTag::Diss);
      require_tag(fam, cfg, kind, "end", t, xi_mag, ZoneTag::Diss);
      double lead = llam_t - fam.log_F(t);
      double c1 = fam.log_F(s) - llam_s, c2 = fam.log_Lambda(s) - llam_s;
      return {lead + c1, lead + c2, lead + c1, lead + c2};
    }
    case BoundKind::GluedCase11: {
      if (s != 0.0) applicability_error(kind, "start", "s = 0");
      require_tag(fam, cfg, kind, "end", t, xi_mag, ZoneTag::Diss);
      return fill(llam_t - fam.log_F(t));
    }
    case BoundKind::GluedCase12: {
      if (s != 0.0) applicability_error(kind, "start", "s = 0");
      require_tag(fam, cfg, kind, "end", t, xi_mag, ZoneTag::Ell);
      double expo = neg_cxi2(C, xi_mag, fam.log_B_lambda(0.0, t, kQuadTol));
      double top = llam_t + lxi, bot = 2.0 * (llam_t + lxi) - fam.log_rho(t);
      return add(fill(expo), {top, top, bot, bot});
    }
    case BoundKind::GluedCase13Ell: {
      if (s != 0.0) applicability_error(kind, "start", "s = 0");
      require_trend(fam, kind, t, EtaTrend::decreasing);
      require_hyp_region(fam, cfg, kind, "end", t, xi_mag);
      if (lxi < std::log(cfg.d0) - fam.log_F(t))
        applicability_error(kind, "frequency", "|xi| >= d0/F");
      double expo = neg_cxi2(C, xi_mag, fam.log_B_lambda(0.0, t, kQuadTol));
      return add(fill(expo), {llam_t, llam_t + lxi, llam_t, llam_t + lxi});
    }
    case BoundKind::GluedCase13Red: {
      if (s != 0.0) applicability_error(kind, "start", "s = 0");
      require_trend(fam, kind, t, EtaTrend::decreasing);
      require_hyp_region(fam, cfg, kind, "end", t, xi_mag);
      double expo = neg_cxi2(C, xi_mag, fam.log_B_lambda(0.0, t, kQuadTol));
      return fill(expo + llam_t + lxi);
    }
    case BoundKind::GluedCase2Large: {
      if (s != 0.0) applicability_error(kind, "start", "s = 0");
      require_trend(fam, kind, t, EtaTrend::increasing);
      require_hyp_region(fam, cfg, kind, "end", t, xi_mag);
      return fill(-(1.0 - 2.0 * cfg.eps) *
                  fam.integrate_delta_log(0.0, t, kQuadTol));
    }
    case BoundKind::GluedCase22: {
      if (s != 0.0) applicability_error(kind, "start", "s = 0");
      require_trend(fam, kind, t, EtaTrend::increasing);
      require_tag(fam, cfg, kind, "end", t, xi_mag, ZoneTag::Ell);
      double txi = t_xi_or_throw(fam, cfg, kind, xi_mag, horizon);
      double expo = neg_cxi2(C, xi_mag, fam.log_B_lambda(0.0, t, kQuadTol));
      return fill(expo + llam_t - fam.log_lambda(txi));
    }
    case BoundKind::KernelLarge:
    case BoundKind::KernelSmall:
    case BoundKind::KernelDiss: {
      LogMat out{};
      for (int l = 0; l < 2; ++l)
        for (int j = 0; j < 2; ++j)
          out[std::size_t(2 * l + j)] = kernel_bound(fam, cfg, t, xi_mag, j, l, C);
      // regime consistency with the requested kind
      double lOm = std::log(omega_threshold(fam, cfg, t));
      double ldiss = std::log(cfg.d0) - fam.log_F(t);
      if (kind == BoundKind::KernelLarge && lxi < lOm)
        applicability_error(kind, "frequency", "|xi| >= Omega(0,t)");
      if (kind == BoundKind::KernelSmall && (lxi > lOm || lxi < ldiss))
        applicability_error(kind, "frequency", "d0/F <= |xi| <= Omega(0,t)");
      if (kind == BoundKind::KernelDiss && lxi > ldiss)
        applicability_error(kind, "frequency", "|xi| <= d0/F");
      return out;
    }
    case BoundKind::TheoremRate: {
      // headline configuration sigma = 0, n = 2, m = 1; rows are l = 0, 1
      double r0 = theorem_rate(fam, t, 0.0, 2, 1.0, 0);
      double r1 = theorem_rate(fam, t, 0.0, 2, 1.0, 1);
      return {r0, r0, r1, r1};
    }
  }
  throw ParamError("bound: unknown kind");
}

LogMat observed_log_abs(const CoefficientFamily& fam, const ZoneConfig& cfg,
                        BoundKind kind, double s, double t, double xi_mag,
                        double tol) {
  switch (kind) {
    case BoundKind::HypZone:
    case BoundKind::OscZone:
    case BoundKind::EllRefined:
    case BoundKind::EllUnrefined:
    case BoundKind::GluedCase12:
    case BoundKind::GluedCase13Ell:
    case BoundKind::GluedCase13Red:
    case BoundKind::GluedCase2Large:
    case BoundKind::GluedCase22: {
      auto fm = fundamental_matrix(fam, cfg, SystemKind::RawScalar, s, t,
                                   xi_mag, tol);
      double lxi = std::log(xi_mag);
      return micro_log_abs(fm.E, fam.log_lambda(t) + lxi,
                           fam.log_lambda(s) + lxi);
    }
    case BoundKind::DissZone:
    case BoundKind::GluedCase11: {
      auto fm = fundamental_matrix(fam, cfg, SystemKind::RawScalar, s, t,
                                   xi_mag, tol);
      return micro_log_abs(fm.E, fam.log_lambda(t) - fam.log_F(t),
                           fam.log_lambda(s) - fam.log_F(s));
    }
    case BoundKind::RedZone: {
      auto fm = fundamental_matrix(fam, cfg, SystemKind::VScalar, s, t,
                                   xi_mag, tol);
      auto lw = [&](double tau) {
        return std::log(0.5 * cfg.eps) + fam.log_rho(tau) +
               std::log(fam.omega(tau));
      };
      return micro_log_abs(fm.E, lw(t), lw(s), -fm.log_damping);
    }
    case BoundKind::KernelLarge:
    case BoundKind::KernelSmall:
    case BoundKind::KernelDiss: {
      if (s != 0.0) throw ParamError("kernel bounds are stated from s = 0");
      KernelValues kv = kernels(fam, cfg, t, xi_mag, tol);
      return {log_abs(kv.K0), log_abs(kv.K1), log_abs(kv.dtK0),
              log_abs(kv.dtK1)};
    }
    case BoundKind::TheoremRate:
      throw ParamError(
          "theorem-rate has no pointwise observation; use verify_bound");
  }
  throw ParamError("bound: unknown kind");
}

namespace {

struct RayContext {
  double xi = 0.0;
  EtaTrend trend = EtaTrend::flat;
  std::optional<double> t_xi;
};

bool point_ok(const CoefficientFamily& fam, const ZoneConfig& cfg,
              BoundKind kind, const RayContext& ray, double t) {
  Zone z = classify(fam, cfg, t, ray.xi);
  switch (kind) {
    case BoundKind::HypZone: return z.tag == ZoneTag::Hyp;
    case BoundKind::OscZone: return z.tag == ZoneTag::Osc;
    case BoundKind::RedZone: return z.tag == ZoneTag::Red;
    case BoundKind::EllRefined:
    case BoundKind::EllUnrefined:
    case BoundKind::GluedCase12: return z.tag == ZoneTag::Ell;
    case BoundKind::DissZone:
    case BoundKind::GluedCase11: return z.tag == ZoneTag::Diss;
    case BoundKind::GluedCase13Ell:
      return ray.trend == EtaTrend::decreasing &&
             z.region == Region::hyperbolic &&
             std::log(ray.xi) >= std::log(cfg.d0) - fam.log_F(t);
    case BoundKind::GluedCase13Red:
      return ray.trend == EtaTrend::decreasing &&
             z.region == Region::hyperbolic;
    case BoundKind::GluedCase2Large:
      return ray.trend == EtaTrend::increasing &&
             z.region == Region::hyperbolic;
    case BoundKind::GluedCase22:
      return ray.trend == EtaTrend::increasing && ray.t_xi.has_value() &&
             z.tag == ZoneTag::Ell;
    case BoundKind::KernelLarge:
      return std::log(ray.xi) >= std::log(omega_threshold(fam, cfg, t));
    case BoundKind::KernelSmall:
      return std::log(ray.xi) <= std::log(omega_threshold(fam, cfg, t)) &&
             std::log(ray.xi) >= std::log(cfg.d0) - fam.log_F(t);
    case BoundKind::KernelDiss:
      return std::log(ray.xi) <= std::log(cfg.d0) - fam.log_F(t);
    case BoundKind::TheoremRate: return t > 0.0;
  }
  return false;
}

bool two_point_kind(BoundKind kind) {
  switch (kind) {
    case BoundKind::HypZone:
    case BoundKind::OscZone:
    case BoundKind::RedZone:
    case BoundKind::EllRefined:
    case BoundKind::EllUnrefined:
    case BoundKind::DissZone: return true;
    default: return false;
  }
}

std::vector<BoundSample> draw_samples(const CoefficientFamily& fam,
                                      const ZoneConfig& cfg, BoundKind kind,
                                      const SampleSpec& spec, int want) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> uxi(spec.log_xi_lo, spec.log_xi_hi);
  const int nt = 256;
  std::vector<double> tg(nt);
  double l0 = std::log(spec.t_lo), l1 = std::log(spec.t_hi);
  for (int i = 0; i < nt; ++i)
    tg[std::size_t(i)] = std::exp(l0 + (l1 - l0) * double(i) / (nt - 1));

  std::vector<BoundSample> out;
  long attempts = 0, limit = 500L * want;
  while (int(out.size()) < want && attempts++ < limit) {
    RayContext ray;
    ray.xi = std::exp(uxi(rng));
    ray.trend = eta_trend(fam, spec.t_lo, spec.t_hi);
    if (kind == BoundKind::GluedCase22)
      ray.t_xi = separating_times(fam, cfg, ray.xi, 4.0 * spec.t_hi).t_xi;
    std::vector<double> hits;
    for (double tv : tg)
      if (point_ok(fam, cfg, kind, ray, tv)) hits.push_back(tv);
    BoundSample smp;
    smp.xi = ray.xi;
    if (two_point_kind(kind)) {
      if (hits.size() < 2) continue;
      std::uniform_int_distribution<std::size_t> pick(0, hits.size() - 1);
      std::size_t a = pick(rng), b = pick(rng);
      if (a == b) continue;
      smp.s = hits[std::min(a, b)];
      smp.t = hits[std::max(a, b)];
    } else {
      if (hits.empty()) continue;
      std::uniform_int_distribution<std::size_t> pick(0, hits.size() - 1);
      smp.s = 0.0;
      smp.t = hits[pick(rng)];
    }
    out.push_back(smp);
  }
  if (int(out.size()) < want) {
    std::ostringstream os;
    os << "verify " << bound_kind_name(kind) << ": only " << out.size()
       << " of " << want << " samples found in the configured window";
    throw NumericError(os.str());
  }
  return out;
}

BoundReport verify_theorem_rate(const CoefficientFamily& fam,
                                const ZoneConfig& cfg,
                                const SampleSpec& spec) {
  BoundReport rep;
  rep.kind = BoundKind::TheoremRate;
  int n = 2 * spec.count;
  double l0 = std::log(std::max(spec.t_lo, 1.0)), l1 = std::log(spec.t_hi);
  std::vector<double> ts(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i)
    ts[std::size_t(i)] = std::exp(l0 + (l1 - l0) * double(i) / (n - 1));
  auto rs = log_grid(1e-3, 12.0, 201);
  auto table = kernel_table(fam, cfg, ts, rs, spec.tol, std::log(1e-70),
                            spec.jobs);
  auto g = DataProfile::gaussian();
  rep.samples.resize(std::size_t(n));
  for (int i = 0; i < n; ++i) {
    double t = ts[std::size_t(i)];
    double nu = std::sqrt(norm_from_table(table, std::size_t(i), g, g, 0.0, 2));
    double nut = std::sqrt(
        norm_from_table(table, std::size_t(i), g, g, 0.0, 2, true));
    BoundSample& smp = rep.samples[std::size_t(i)];
    smp.t = t;
    smp.observed = {std::log(nu), std::log(nu), std::log(nut), std::log(nut)};
    smp.predicted = predicted_bound(fam, cfg, BoundKind::TheoremRate, 0.0, t,
                                    1.0, spec.C);
    smp.log_ratio = std::max(smp.observed[0] - smp.predicted[0],
                             smp.observed[2] - smp.predicted[2]);
    // coarse half = even indices; doubling refines the time sampling
    if (i % 2 == 0) rep.log_sup_half = std::max(rep.log_sup_half, smp.log_ratio);
    rep.log_sup_full = std::max(rep.log_sup_full, smp.log_ratio);
  }
  rep.pass = std::isfinite(rep.log_sup_full) &&
             rep.log_sup_full <= rep.log_sup_half + std::log(1.1);
  return rep;
}

}  // namespace

BoundReport verify_bound(const CoefficientFamily& fam, const ZoneConfig& cfg,
                         BoundKind kind, const SampleSpec& spec) {
  if (spec.count < 1) throw ParamError("verify bound: count must be >= 1");
  if (kind == BoundKind::TheoremRate)
    return verify_theorem_rate(fam, cfg, spec);
  BoundReport rep;
  rep.kind = kind;
  rep.samples = draw_samples(fam, cfg, kind, spec, 2 * spec.count);
  parallel_for(rep.samples.size(), unsigned(std::max(spec.jobs, 1)),
               [&](std::size_t i) {
                 BoundSample& smp = rep.samples[i];
                 smp.observed = observed_log_abs(fam, cfg, kind, smp.s, smp.t,
                                                 smp.xi, spec.tol);
                 smp.predicted = predicted_bound(fam, cfg, kind, smp.s, smp.t,
                                                 smp.xi, spec.C);
                 double lr = kNegInf;
                 for (std::size_t e = 0; e < 4; ++e) {
                   if (smp.observed[e] == kNegInf) continue;
                   lr = std::max(lr, smp.observed[e] - smp.predicted[e]);
                 }
                 smp.log_ratio = lr;
               });
  for (std::size_t i = 0; i < rep.samples.size(); ++i) {
    if (i < std::size_t(spec.count))
      rep.log_sup_half = std::max(rep.log_sup_half, rep.samples[i].log_ratio);
    rep.log_sup_full = std::max(rep.log_sup_full, rep.samples[i].log_ratio);
  }
  rep.pass = std::isfinite(rep.log_sup_full) &&
             rep.log_sup_full <= rep.log_sup_half + std::log(1.1);
  return rep;
}

double s_function(const CoefficientFamily& fam, const ZoneConfig& cfg,
                  double t, double xi_mag, double C) {
  if (!(xi_mag > 0.0)) throw ParamError("S function: |xi| must be positive");
  double horizon = 4.0 * std::max(t, 1.0);
  auto sep = separating_times(fam, cfg, xi_mag, horizon);
  if (!sep.t_xi)
    throw ParamError("S function: eta not strictly monotone or no crossing");
  double txi = *sep.t_xi;
  if (t < txi * (1.0 - 1e-9))
    throw RangeError("S function: t below the separating time t_xi");
  double head = neg_cxi2(C, xi_mag, log_B_ell(fam, 0.0, txi));
  double tail = t > txi ? -fam.integrate_delta_log(txi, t, kQuadTol) : 0.0;
  return head + tail;
}

double s_sup_bound(const CoefficientFamily& fam, const ZoneConfig& cfg,
                   double t, double C, const std::vector<double>& xi_grid) {
  (void)cfg;
  if (xi_grid.empty()) throw ParamError("S bound: empty frequency grid");
  double lB = log_B_ell(fam, 0.0, t);
  double best = kNegInf;
  for (double xi : xi_grid) best = std::max(best, neg_cxi2(C, xi, lB));
  return best;
}

double kernel_bound(const CoefficientFamily& fam, const ZoneConfig& cfg,
                    double t, double xi_mag, int j, int l, double C) {
  if (j < 0 || j > 1 || l < 0 || l > 1)
    throw ParamError("kernel bound: j, l must be 0 or 1");
  if (!(xi_mag > 0.0)) throw ParamError("kernel bound: |xi| must be positive");
  double lxi = std::log(xi_mag);
  double llam = fam.log_lambda(t);
  if (lxi >= std::log(omega_threshold(fam, cfg, t)))
    return (l - 1) * llam + (l - j) * lxi -
           (1.0 - 2.0 * cfg.eps) * fam.integrate_delta_log(0.0, t, kQuadTol);
  if (lxi >= std::log(cfg.d0) - fam.log_F(t))
    return l * (llam + lxi) +
           neg_cxi2(C, xi_mag, fam.log_B_lambda(0.0, t, kQuadTol));
  return l * (llam - fam.log_F(t));
}

double theorem_rate(const CoefficientFamily& fam, double t, double sigma,
                    int n, double m, int l, double tol) {
  if (!(m >= 1.0 && m < 2.0)) throw ParamError("rate: m must lie in [1,2)");
  if (l < 0 || l > 1) throw ParamError("rate: l must be 0 or 1");
  if (!(sigma >= 0.0)) throw ParamError("rate: sigma must be >= 0");
  double lB = t > 0.0 ? fam.log_B_lambda(0.0, t, tol) : kNegInf;
  double log1pB = lB > 40.0 ? lB : std::log1p(std::exp(lB));
  double expo = -0.5 * sigma - 0.5 * n * (1.0 / m - 0.5) - 0.5 * l;
  return l * fam.log_lambda(t) + expo * log1pB;
}

double polynomial_rate_exponent(const CoefficientFamily& fam, double sigma,
                                int n, double m, int l) {
  if (fam.kind() != FamilyKind::polynomial)
    throw ParamError("closed-form exponent needs the polynomial family");
  double Cs = 0.5 * sigma + 0.5 * n * (1.0 / m - 0.5);
  return -(2.0 * fam.alpha() - fam.beta() + 1.0) * Cs +
         l * 0.5 * (fam.beta() - 1.0);
}

bool ell_aux_holds(const CoefficientFamily& fam, double t, double xi_mag) {
  double lhs = fam.bracket(t, xi_mag) - 0.5 * fam.rho_omega(t);
  double rhs = -sqr(fam.lambda(t)) * fam.omega(t) * sqr(xi_mag) / fam.rho(t);
  return lhs <= rhs + 1e-12 * (std::abs(lhs) + std::abs(rhs));
}

double diss_lemma_ratio(const CoefficientFamily& fam, double t, double tol) {
  auto log_f = [&](double tau) {
    return fam.log_lambda(tau) - 2.0 * fam.integrate_delta_log(0.0, tau, tol);
  };
  double log_tail = log_tail_integral(log_f, t, std::max(tol, 1e-8));
  double log_ref =
      fam.log_Lambda(t) - 2.0 * fam.integrate_delta_log(0.0, t, tol);
  return std::exp(log_tail - log_ref);
}

double gluing_aux_log(const CoefficientFamily& fam, const ZoneConfig& cfg,
                      double xi_mag, double C, double horizon) {
  auto sep = separating_times(fam, cfg, xi_mag, horizon);
  if (!sep.t_diss)
    throw ParamError("gluing auxiliary: no dissipative boundary on the ray");
  return neg_cxi2(C, xi_mag, fam.log_B_lambda(0.0, *sep.t_diss, kQuadTol));
}

DecayReport fit_decay(const std::vector<double>& ts,
                      const std::vector<double>& values, FitAxes axes,
                      double t_lo, double t_hi) {
  if (ts.size() != values.size())
    throw ParamError("decay fit: mismatched series lengths");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts[i] < t_lo || ts[i] > t_hi) continue;
    if (!(values[i] > 0.0))
      throw ParamError("decay fit: non-positive value in the fit window");
    xs.push_back(axes == FitAxes::LogLog ? std::log1p(ts[i]) : ts[i]);
    ys.push_back(std::log(values[i]));
  }
  if (xs.size() < 8)
    throw ParamError("decay fit: need at least 8 samples in the window");
  double n = double(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  DecayReport rep;
  rep.n_used = int(xs.size());
  double denom = n * sxx - sx * sx;
  if (!(denom > 0.0)) throw NumericError("decay fit: degenerate abscissae");
  rep.slope = (n * sxy - sx * sy) / denom;
  rep.intercept = (sy - rep.slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    ss += sqr(ys[i] - rep.slope * xs[i] - rep.intercept);
  rep.residual = std::sqrt(ss / n);
  return rep;
}

}  // namespace dwv
