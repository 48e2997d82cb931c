#pragma once

// Adaptive Simpson quadrature with caller-supplied breakpoints (oscillator
// bump edges, zone boundaries) so panels never straddle a kink of the
// integrand, plus a decay-rate tail estimator for integrals to infinity.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "dwv/common.hpp"

namespace dwv {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;   // accumulated error estimate
  bool converged = true;
  int evals = 0;
};

namespace detail {

template <class F>
void adaptive_simpson(const F& f, double a, double fa, double b, double fb,
                      double m, double fm, double whole, double tol, int depth,
                      QuadResult& out) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  out.evals += 2;
  double h = b - a;
  double left = h / 12.0 * (fa + 4.0 * flm + fm);
  double right = h / 12.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  // Terminate on: tolerance met; roundoff floor relative to the local panel
  // magnitude; panel at machine resolution. The last case matters: once
  // 0.5*(a+b) rounds, the children's widths no longer sum bit-exactly to h
  // and delta saturates at ~|f|*ulp(t) independent of depth, while tol keeps
  // halving, so without the guard the recursion bottoms out spuriously.
  double ulp_floor =
      32.0 * std::numeric_limits<double>::epsilon() *
      std::max(std::abs(a), std::abs(b));
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol ||
      std::abs(delta) <= 1e-12 * (std::abs(left) + std::abs(right)) ||
      h <= ulp_floor) {
    out.value += left + right + delta / 15.0;
    out.error += std::abs(delta) / 15.0;
    if (depth <= 0 && std::abs(delta) > 15.0 * tol) out.converged = false;
    return;
  }
  adaptive_simpson(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1, out);
  adaptive_simpson(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1, out);
}

}  // namespace detail

// Integrate f over [a,b] to absolute tolerance scaled by rel_tol * |I|,
// splitting first at the supplied breakpoints.
template <class F>
QuadResult integrate(const F& f, double a, double b, double rel_tol,
                     const std::vector<double>& breakpoints = {}) {
  QuadResult out;
  if (!(b > a)) return out;
  std::vector<double> knots{a, b};
  for (double x : breakpoints)
    if (x > a && x < b) knots.push_back(x);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  // Coarse magnitude estimate, then adaptive passes; the absolute budget is
  // re-derived from the computed value and the pass repeated if the coarse
  // estimate was badly off (steeply decaying integrands over long panels).
  double scale = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    double lo = knots[i], hi = knots[i + 1];
    double m = 0.5 * (lo + hi);
    scale += std::abs(hi - lo) / 6.0 *
             (std::abs(f(lo)) + 4.0 * std::abs(f(m)) + std::abs(f(hi)));
    out.evals += 3;
  }
  for (int pass = 0; pass < 4; ++pass) {
    double abs_tol = std::max(rel_tol * scale, 1e-300);
    int evals = out.evals;
    out = QuadResult{};
    out.evals = evals;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
      double lo = knots[i], hi = knots[i + 1];
      double m = 0.5 * (lo + hi);
      double flo = f(lo), fhi = f(hi), fm = f(m);
      out.evals += 3;
      double whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
      detail::adaptive_simpson(f, lo, flo, hi, fhi, m, fm, whole,
                               abs_tol / double(knots.size() - 1), 48, out);
    }
    double better = std::abs(out.value);
    if (better >= scale / 4.0 || better == 0.0) break;
    scale = better;
  }
  return out;
}

// log of int_t^infinity exp(log_f) for a decaying integrand given in log
// scale. The head is integrated up to an adaptively chosen horizon T where
// log_f has dropped by 30; the remaining tail is mapped onto [0,1] by
// tau = T/w^4 (smooth at w = 0 for any decay exponent > 1) unless it is
// provably below e^{-30} of the head.
inline double log_tail_integral(const std::function<double(double)>& log_f,
                                double t, double rel_tol) {
  auto lf = [&](double tau) {
    double v = log_f(tau);
    return std::isnan(v) ? kNegInf : v;
  };
  double T = t + 1.0;
  while (lf(t) - lf(T) < 30.0 && T < 1e8 * (t + 1.0)) T = t + 2.0 * (T - t);
  // head in log scale: factor out the running maximum
  double m_head = kNegInf;
  const int n = 128;
  for (int i = 0; i <= n; ++i)
    m_head = std::max(m_head, lf(t + (T - t) * double(i) / n));
  double log_head = kNegInf;
  if (m_head > kNegInf) {
    QuadResult qh = integrate(
        [&](double tau) { return std::exp(lf(tau) - m_head); }, t, T, rel_tol);
    if (!qh.converged)
      throw NumericError("tail integral: head quadrature did not converge");
    log_head = m_head + std::log(qh.value);
  }
  double m = lf(T);
  if (m + std::log(4.0 * T + 4.0) < log_head - 30.0) return log_head;
  auto tail_f = [&](double w) {
    if (w < 1e-8) return 0.0;
    double u = w * w * w * w;
    double lg = lf(T / u);
    if (lg == kNegInf) return 0.0;
    return std::exp(lg - m) * 4.0 * T / (u * w);
  };
  QuadResult q = integrate(tail_f, 0.0, 1.0, rel_tol);
  if (!q.converged)
    throw NumericError("tail integral: tail quadrature did not converge");
  return log_add(log_head, m + std::log(q.value));
}

// Estimate the tail integral of a positive decaying integrand from T to
// infinity using its local logarithmic decay rate r = -g'(T)/g(T):
//   tail ≈ g(T) / (r - 1/T),
// exact for pure power laws t^{-p} (gives g·T/(p-1)) and asymptotically
// exact for exponential decay. Requires r > 1/T, i.e. decay faster than 1/t.
inline double decay_tail_estimate(double gT, double dgT, double T) {
  double r = -dgT / gT;
  double denom = r - 1.0 / T;
  if (!(denom > 0.0)) throw NumericError("tail integrand decays too slowly for the tail estimate");
  return gT / denom;
}

}  // namespace dwv
