#include "dwv/assumptions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dwv/quad.hpp"

namespace dwv {

const char* condition_name(ConditionId id) {
  switch (id) {
    case ConditionId::A1: return "A1";
    case ConditionId::A2: return "A2";
    case ConditionId::A3: return "A3";
    case ConditionId::A4: return "A4";
    case ConditionId::A5: return "A5";
    case ConditionId::B1: return "B1";
    case ConditionId::B2: return "B2";
    case ConditionId::B3: return "B3";
    case ConditionId::B4: return "B4";
    case ConditionId::B5: return "B5";
    case ConditionId::B6: return "B6";
  }
  return "?";
}

const ConditionRecord& AssumptionReport::get(ConditionId id) const {
  for (const auto& r : records)
    if (r.id == id) return r;
  throw ConsistencyError("assumption report is missing a condition record");
}

bool AssumptionReport::all_pass() const {
  return std::all_of(records.begin(), records.end(),
                     [](const ConditionRecord& r) { return r.pass; });
}

std::string AssumptionReport::to_text() const {
  std::ostringstream os;
  os << "assumption report, horizon " << horizon << ", " << grid_size
     << " grid points\n";
  for (const auto& r : records) {
    os << condition_name(r.id) << "  " << (r.pass ? "pass" : "FAIL");
    for (const auto& [name, value] : r.constants)
      os << "  " << name << "=" << value;
    os << "  witness_t=" << r.witness_t;
    if (!r.note.empty()) os << "  (" << r.note << ")";
    os << "\n";
  }
  return os.str();
}

std::vector<double> build_grid(const CoefficientFamily& fam, double T,
                               const GridSpec& spec) {
  if (!(T > 0.0)) throw ParamError("assumption grid: horizon must be positive");
  std::vector<double> g;
  g.reserve(std::size_t(spec.n) + 1);
  for (int i = 0; i <= spec.n; ++i) g.push_back(T * double(i) / spec.n);
  double spacing = T / spec.n;
  if (const Oscillator* osc = fam.oscillator()) {
    for (std::size_t j = 0; j < osc->size(); ++j) {
      double lo = osc->center(j);
      if (lo >= T) break;
      double w = osc->width(j);
      if (spacing > w / spec.samples_per_bump) {
        if (!spec.refine_bumps) {
          std::ostringstream os;
          os << "assumption grid: base grid cannot resolve bump " << j
             << " (width " << w << ", spacing " << spacing << ")";
          throw NumericError(os.str());
        }
        int m = 2 * spec.samples_per_bump;
        for (int i = 0; i <= m; ++i) {
          double t = lo + w * double(i) / m;
          if (t < T) g.push_back(t);
        }
      }
    }
  }
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

namespace {

struct Worst {
  double value = kNegInf;
  double at = 0.0;
  void offer(double v, double t) {
    if (v > value) {
      value = v;
      at = t;
    }
  }
};

// log of int_0^t lambda |omega - 1|, summed bump by bump so each quadrature
// panel stays inside one bump support.
double log_stab_integral(const CoefficientFamily& fam, double t, double tol) {
  const Oscillator* osc = fam.oscillator();
  if (!osc) return kNegInf;
  double acc = kNegInf;
  for (std::size_t j = 0; j < osc->size(); ++j) {
    double lo = osc->center(j);
    if (lo >= t) break;
    double hi = std::min(lo + osc->width(j), t);
    // factor the scale of lambda out; |omega-1| has interior zeros so the
    // integrand itself is used in linear scale relative to that factor
    double lscale = fam.log_lambda(hi);
    auto f = [&](double tau) {
      return std::exp(fam.log_lambda(tau) - lscale) *
             std::abs(fam.omega(tau) - 1.0);
    };
    QuadResult q = integrate(f, lo, hi, tol,
                             {lo + 0.25 * (hi - lo), lo + 0.5 * (hi - lo),
                              lo + 0.75 * (hi - lo)});
    if (!q.converged)
      throw NumericError("stabilization quadrature did not converge");
    if (q.value > 0.0) acc = log_add(acc, lscale + std::log(q.value));
  }
  return acc;
}

// mu(t) derivative jet via mu = rho Lambda / lambda; Lambda' = lambda.
JetR mu_jet(const CoefficientFamily& fam, double t) {
  JetR L;
  L.d[0] = fam.Lambda(t);
  for (std::size_t k = 1; k <= kJetOrder; ++k) L.d[k] = fam.lambda(t, int(k) - 1);
  return fam.rho_jet(t) * L / fam.lambda_jet(t);
}

}  // namespace

double log_stabilization_integral(const CoefficientFamily& fam, double t,
                                  double tol) {
  return log_stab_integral(fam, t, tol);
}

double stabilization_ratio(const CoefficientFamily& fam, double t,
                           double tol) {
  if (!fam.has_oscillator()) return 0.0;
  double li = log_stab_integral(fam, t, tol);
  if (li == kNegInf) return 0.0;
  return std::exp(li - fam.log_Theta(t));
}

double detect_t0(const CoefficientFamily& fam, double eps, double T,
                 const GridSpec& spec) {
  std::vector<double> grid = build_grid(fam, T, spec);
  double t0 = -1.0;
  for (double t : grid) {
    if (t <= 0.0) continue;
    double ratio = std::abs(fam.rho_omega(t, 1)) / sqr(fam.rho_omega(t, 0));
    if (ratio <= eps / 4.0) {
      if (t0 < 0.0) t0 = t;
    } else {
      t0 = -1.0;
    }
  }
  return t0;
}

AssumptionReport check_all(const CoefficientFamily& fam, double T,
                           const GridSpec& spec) {
  std::vector<double> grid = build_grid(fam, T, spec);
  const int M = fam.smoothness();
  const double tol = spec.tol;
  AssumptionReport rep;
  rep.horizon = T;
  rep.grid_size = grid.size();

  // A1: positivity, comparison of lambda'/lambda with lambda/Lambda, and
  // higher-derivative control.
  {
    ConditionRecord r{ConditionId::A1};
    bool positive = true;
    double lam0 = kInf, lam1 = kNegInf;
    Worst worst;
    std::vector<double> lam_k(std::size_t(M) + 1, 0.0);
    for (double t : grid) {
      if (t == 0.0) continue;
      double l = fam.lambda(t), dl = fam.lambda(t, 1);
      if (!(l > 0.0) || !(dl > 0.0)) positive = false;
      double ratio = (dl / l) / std::exp(fam.log_lambda(t) - fam.log_Lambda(t));
      lam0 = std::min(lam0, ratio);
      lam1 = std::max(lam1, ratio);
      worst.offer(ratio, t);
      for (int k = 1; k <= M; ++k) {
        double cap = std::abs(fam.lambda(t, k)) /
                     (l * std::exp(double(k) * (fam.log_lambda(t) - fam.log_Lambda(t))));
        lam_k[std::size_t(k)] = std::max(lam_k[std::size_t(k)], cap);
      }
    }
    r.pass = positive && lam0 > 0.0 && std::isfinite(lam1);
    r.constants.emplace_back("lambda0", lam0);
    r.constants.emplace_back("lambda1", lam1);
    for (int k = 1; k <= M; ++k)
      r.constants.emplace_back("lambda_" + std::to_string(k), lam_k[std::size_t(k)]);
    r.witness_t = worst.at;
    rep.records.push_back(std::move(r));
  }

  // A2: omega range, derivative control against Xi, and the compatibility
  // C1 Theta <= lambda Xi <= C2 Lambda together with the Theta axioms.
  {
    ConditionRecord r{ConditionId::A2};
    double omin = kInf, omax = kNegInf;
    std::vector<double> om_k(std::size_t(M) + 1, 0.0);
    double C1 = kInf, C2 = kNegInf;
    bool theta_ok = true;
    double prev_theta = kNegInf;
    Worst worst;
    for (double t : grid) {
      double w = fam.omega(t);
      omin = std::min(omin, w);
      omax = std::max(omax, w);
      for (int k = 1; k <= M; ++k)
        om_k[std::size_t(k)] =
            std::max(om_k[std::size_t(k)],
                     std::abs(fam.omega(t, k)) * std::exp(double(k) * fam.log_Xi(t)));
      double lxi = fam.log_lambda(t) + fam.log_Xi(t);
      C1 = std::min(C1, std::exp(lxi - fam.log_Theta(t)));
      double c2 = std::exp(lxi - fam.log_Lambda(t));
      C2 = std::max(C2, c2);
      worst.offer(c2, t);
      double th = fam.log_Theta(t);
      if (th <= prev_theta) theta_ok = false;
      if (t > 0.0 && th > fam.log_Lambda(t)) theta_ok = false;
      prev_theta = th;
    }
    // Theta = o(Lambda): trend on the ratio
    double late = fam.log_Theta(T) - fam.log_Lambda(T);
    double mid = fam.log_Theta(0.5 * T) - fam.log_Lambda(0.5 * T);
    bool small_o = late <= mid + 1e-12;
    r.pass = omin > 0.0 && std::isfinite(omax) && C1 > 0.0 &&
             std::isfinite(C2) && theta_ok && small_o;
    r.constants.emplace_back("c0", omin);
    r.constants.emplace_back("c1", omax);
    for (int k = 1; k <= M; ++k)
      r.constants.emplace_back("omega_" + std::to_string(k), om_k[std::size_t(k)]);
    r.constants.emplace_back("C1", C1);
    r.constants.emplace_back("C2", C2);
    r.witness_t = worst.at;
    if (!small_o) r.note = "Theta/Lambda ratio not decreasing";
    rep.records.push_back(std::move(r));
  }

  // A3: stabilization. The cumulative integral only grows inside bumps, so
  // the supremum of the ratio is scanned per bump plus the bump ends.
  {
    ConditionRecord r{ConditionId::A3};
    Worst worst;
    double C3 = 0.0;
    if (const Oscillator* osc = fam.oscillator()) {
      for (std::size_t j = 0; j < osc->size(); ++j) {
        double lo = osc->center(j);
        if (lo >= T) break;
        double w = osc->width(j);
        for (int i = 1; i <= 8; ++i) {
          double t = std::min(lo + w * double(i) / 8.0, T);
          double ratio = stabilization_ratio(fam, t, tol);
          C3 = std::max(C3, ratio);
          worst.offer(ratio, t);
        }
      }
      double end = stabilization_ratio(fam, T, tol);
      C3 = std::max(C3, end);
      worst.offer(end, T);
      r.note = "supremum scanned inside bumps";
    } else {
      r.note = "trivial oscillation, ratio identically 0";
    }
    r.pass = std::isfinite(C3);
    r.constants.emplace_back("C3", C3);
    r.witness_t = worst.value == kNegInf ? 0.0 : worst.at;
    rep.records.push_back(std::move(r));
  }

  // A4: tail integral of lambda^{-M} Xi^{-M-1} against Theta^{-M}.
  {
    ConditionRecord r{ConditionId::A4};
    auto log_g = [&](double tau) {
      return -double(M) * fam.log_lambda(tau) -
             double(M + 1) * fam.log_Xi(tau);
    };
    Worst worst;
    std::vector<double> ratios;
    for (int i = 0; i <= 8; ++i) {
      double t = T * (0.1 + 0.9 * double(i) / 8.0);
      double lr = log_tail_integral(log_g, t, tol) +
                  double(M) * fam.log_Theta(t);
      ratios.push_back(std::exp(lr));
      worst.offer(ratios.back(), t);
    }
    double C4 = worst.value;
    // trend: the latest ratio must not dominate the earlier ones
    bool stable = ratios.back() <= spec.trend_factor *
                                       *std::max_element(ratios.begin(),
                                                         ratios.end() - 1);
    r.pass = std::isfinite(C4) && stable;
    r.constants.emplace_back("C4", C4);
    r.witness_t = worst.at;
    if (!stable) r.note = "ratio still growing at the horizon";
    rep.records.push_back(std::move(r));
  }

  // A5: reciprocal-tail identity of F and divergence of F.
  {
    ConditionRecord r{ConditionId::A5};
    Worst worst;
    for (int i = 0; i <= 6; ++i) {
      double t = T * (0.05 + 0.9 * double(i) / 6.0);
      double res = fam.F_identity_residual(t, tol);
      worst.offer(res, t);
    }
    bool grows = fam.log_F(T) > fam.log_F(0.0) + std::log(spec.trend_factor);
    r.pass = worst.value < 1e-4 && grows;
    r.constants.emplace_back("max_residual", worst.value);
    r.witness_t = worst.at;
    rep.records.push_back(std::move(r));
  }

  // B1: positivity of rho (the identity rho = mu lambda / Lambda is the
  // definition of mu and holds by construction).
  {
    ConditionRecord r{ConditionId::B1};
    bool positive = true;
    Worst worst;
    for (double t : grid) {
      double v = fam.rho(t);
      if (!(v > 0.0)) {
        positive = false;
        worst.offer(-v, t);
      }
    }
    r.pass = positive;
    r.witness_t = worst.value == kNegInf ? 0.0 : worst.at;
    rep.records.push_back(std::move(r));
  }

  // B2: |d^k mu| <= mu_k mu (lambda/Lambda)^k.
  {
    ConditionRecord r{ConditionId::B2};
    std::vector<double> mu_k(std::size_t(M) + 1, 0.0);
    Worst worst;
    for (double t : grid) {
      if (t == 0.0) continue;
      JetR mj = mu_jet(fam, t);
      double lratio = fam.log_lambda(t) - fam.log_Lambda(t);
      for (int k = 1; k <= M; ++k) {
        double cap = std::abs(mj.d[std::size_t(k)]) /
                     (mj.value() * std::exp(double(k) * lratio));
        mu_k[std::size_t(k)] = std::max(mu_k[std::size_t(k)], cap);
        worst.offer(cap, t);
      }
    }
    r.pass = std::all_of(mu_k.begin(), mu_k.end(),
                         [](double v) { return std::isfinite(v); });
    for (int k = 1; k <= M; ++k)
      r.constants.emplace_back("mu_" + std::to_string(k), mu_k[std::size_t(k)]);
    r.witness_t = worst.at;
    rep.records.push_back(std::move(r));
  }

  // B3: mu/Lambda monotonic, mu divergent (trend test).
  {
    ConditionRecord r{ConditionId::B3};
    int sign = 0;
    bool monotone = true;
    double prev = kNegInf;
    Worst worst;
    for (double t : grid) {
      double v = fam.log_mu(t) - fam.log_Lambda(t);
      if (prev != kNegInf) {
        double d = v - prev;
        if (std::abs(d) > 1e-13) {
          int s = d > 0 ? 1 : -1;
          if (sign == 0) sign = s;
          if (s != sign) {
            monotone = false;
            worst.offer(std::abs(d), t);
          }
        }
      }
      prev = v;
    }
    bool diverges =
        fam.log_mu(T) > fam.log_mu(0.5 * T) + std::log(spec.trend_factor);
    r.pass = monotone && diverges;
    r.constants.emplace_back("mu_growth_factor",
                             std::exp(fam.log_mu(T) - fam.log_mu(0.5 * T)));
    r.witness_t = worst.value == kNegInf ? 0.0 : worst.at;
    if (!monotone) r.note = "mu/Lambda changes direction";
    if (!diverges) r.note += "mu growth below trend factor";
    rep.records.push_back(std::move(r));
  }

  // B4: lambda^2 / rho not integrable; evidenced by the growth of its
  // primitive between T/2 and T.
  {
    ConditionRecord r{ConditionId::B4};
    double half = fam.log_B_lambda(0.0, 0.5 * T, tol);
    double full = fam.log_B_lambda(0.0, T, tol);
    double factor = std::exp(full - half);
    r.pass = factor >= spec.trend_factor;
    r.constants.emplace_back("growth_factor", factor);
    r.witness_t = T;
    if (!r.pass) r.note = "primitive nearly saturated: over-damping evidence";
    rep.records.push_back(std::move(r));
  }

  // B5: |(rho omega)'| = o((rho omega)^2) and mu Theta / Lambda -> infinity.
  {
    ConditionRecord r{ConditionId::B5};
    auto ratio = [&](double t) {
      return std::abs(fam.rho_omega(t, 1)) / sqr(fam.rho_omega(t, 0));
    };
    // supremum over the tail half of the grid vs the first half
    double early = 0.0, late = 0.0;
    Worst worst;
    for (double t : grid) {
      if (t <= 0.0) continue;
      double v = ratio(t);
      if (t <= 0.5 * T)
        early = std::max(early, v);
      else {
        late = std::max(late, v);
        worst.offer(v, t);
      }
    }
    bool decays = late <= early / spec.trend_factor || late < 1e-3;
    // wider window than the other trends: mu Theta / Lambda may diverge
    // arbitrarily slowly, so a single doubling can undershoot the factor
    bool aux = fam.log_mu(T) + fam.log_Theta(T) - fam.log_Lambda(T) >
               fam.log_mu(0.25 * T) + fam.log_Theta(0.25 * T) -
                   fam.log_Lambda(0.25 * T) + std::log(spec.trend_factor) - 1e-12;
    r.pass = decays && aux;
    r.constants.emplace_back("late_sup", late);
    r.constants.emplace_back("early_sup", early);
    r.witness_t = worst.value == kNegInf ? 0.0 : worst.at;
    if (!decays) r.note = "derivative ratio not vanishing";
    if (!aux) r.note += " muTheta/Lambda not growing";
    rep.records.push_back(std::move(r));
  }

  // B6: B_lambda(0,t) <= C5 F^2(Lambda(t)).
  {
    ConditionRecord r{ConditionId::B6};
    Worst worst;
    for (int i = 1; i <= 8; ++i) {
      double t = T * double(i) / 8.0;
      double lr = fam.log_B_lambda(0.0, t, tol) - 2.0 * fam.log_F(t);
      worst.offer(std::exp(lr), t);
    }
    r.pass = std::isfinite(worst.value);
    r.constants.emplace_back("C5", worst.value);
    r.witness_t = worst.at;
    rep.records.push_back(std::move(r));
  }

  return rep;
}

}  // namespace dwv
