#pragma once

// Embedded Dormand-Prince 5(4) integrator with PI step control for small
// complex linear systems (fundamental matrices, diagonalized remainders).
// Right-hand sides are analytic; a caller-supplied step cap keeps the step
// below a fraction of the local oscillation period and below oscillator
// bump widths.

#include <array>
#include <cmath>
#include <functional>
#include <sstream>

#include "dwv/common.hpp"

namespace dwv {

using Vec2 = std::array<complexd, 2>;
using Mat2 = std::array<complexd, 4>;  // row-major [a00 a01 a10 a11]

inline Mat2 mat_mul(const Mat2& A, const Mat2& B) {
  return {A[0] * B[0] + A[1] * B[2], A[0] * B[1] + A[1] * B[3],
          A[2] * B[0] + A[3] * B[2], A[2] * B[1] + A[3] * B[3]};
}
inline Vec2 mat_vec(const Mat2& A, const Vec2& v) {
  return {A[0] * v[0] + A[1] * v[1], A[2] * v[0] + A[3] * v[1]};
}
inline complexd mat_det(const Mat2& A) { return A[0] * A[3] - A[1] * A[2]; }
inline Mat2 mat_identity() { return {1.0, 0.0, 0.0, 1.0}; }

template <std::size_t N>
double inf_norm(const std::array<complexd, N>& y) {
  double m = 0.0;
  for (const auto& c : y) m = std::max(m, std::abs(c));
  return m;
}

template <std::size_t N>
std::array<complexd, N> axpy(const std::array<complexd, N>& y, double a,
                             const std::array<complexd, N>& x) {
  std::array<complexd, N> r = y;
  for (std::size_t i = 0; i < N; ++i) r[i] += a * x[i];
  return r;
}

struct OdeStats {
  int accepted = 0;
  int rejected = 0;
  bool floored = false;  // terminated early at the solution floor
};

// Integrate y' = f(t, y) from t0 to t1.
//   f         : (double t, const State&) -> State
//   max_step  : (double t) -> double, local step cap (analytic scales)
//   observe   : called after every accepted step with (t, y); may be empty
//   floor_log : stop early and zero the state when log(inf_norm(y)) drops
//               below floor_log + log(peak norm); -inf disables
template <std::size_t N, class RHS, class MaxStep, class Observer>
std::array<complexd, N> integrate_ode(const RHS& f,
                                      std::array<complexd, N> y, double t0,
                                      double t1, double tol,
                                      const MaxStep& max_step,
                                      const Observer& observe, OdeStats& stats,
                                      double floor_log = kNegInf) {
  using State = std::array<complexd, N>;
  // Dormand-Prince 5(4) tableau
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // error weights (5th order minus embedded 4th order)
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  if (!(t1 >= t0)) throw ParamError("ode: integration interval is reversed");
  if (t1 == t0) return y;
  double t = t0;
  double h = std::min(max_step(t0), (t1 - t0) / 16.0);
  h = std::max(h, 1e-14 * (t1 - t0));
  double prev_err = 1.0;
  double peak = inf_norm(y);
  State k1 = f(t, y);
  while (t < t1) {
    h = std::min({h, max_step(t), t1 - t});
    if (h < 1e-14 * (1.0 + std::abs(t))) {
      std::ostringstream os;
      os << "ode: step underflow at t=" << t << " (h=" << h << ")";
      throw NumericError(os.str());
    }
    State k2 = f(t + c2 * h, axpy(y, h * a21, k1));
    State y3 = axpy(axpy(y, h * a31, k1), h * a32, k2);
    State k3 = f(t + c3 * h, y3);
    State y4 = axpy(axpy(axpy(y, h * a41, k1), h * a42, k2), h * a43, k3);
    State k4 = f(t + c4 * h, y4);
    State y5 = axpy(
        axpy(axpy(axpy(y, h * a51, k1), h * a52, k2), h * a53, k3), h * a54,
        k4);
    State k5 = f(t + c5 * h, y5);
    State y6 = axpy(
        axpy(axpy(axpy(axpy(y, h * a61, k1), h * a62, k2), h * a63, k3),
             h * a64, k4),
        h * a65, k5);
    State k6 = f(t + h, y6);
    State ynew = axpy(
        axpy(axpy(axpy(axpy(y, h * b1, k1), h * b3, k3), h * b4, k4), h * b5,
             k5),
        h * b6, k6);
    State k7 = f(t + h, ynew);
    State err = axpy(
        axpy(axpy(axpy(axpy(axpy(State{}, h * e1, k1), h * e3, k3), h * e4,
                       k4),
                  h * e5, k5),
             h * e6, k6),
        h * e7, k7);
    double scale = tol * std::max({1e-30, inf_norm(y), inf_norm(ynew)});
    double ratio = inf_norm(err) / scale;
    if (ratio <= 1.0) {
      t += h;
      y = ynew;
      k1 = k7;  // FSAL
      ++stats.accepted;
      observe(t, y);
      double n = inf_norm(y);
      peak = std::max(peak, n);
      if (floor_log > kNegInf && n > 0.0 &&
          std::log(n) < floor_log + std::log(peak)) {
        y = State{};
        stats.floored = true;
        observe(t1, y);
        return y;
      }
      // PI controller
      double fac = 0.9 * std::pow(std::max(ratio, 1e-10), -0.7 / 5.0) *
                   std::pow(prev_err, 0.4 / 5.0);
      prev_err = std::max(ratio, 1e-10);
      h *= std::clamp(fac, 0.2, 5.0);
    } else {
      ++stats.rejected;
      h *= std::clamp(0.9 * std::pow(ratio, -0.2), 0.1, 1.0);
    }
  }
  return y;
}

template <std::size_t N, class RHS, class MaxStep>
std::array<complexd, N> integrate_ode(const RHS& f, std::array<complexd, N> y,
                                      double t0, double t1, double tol,
                                      const MaxStep& max_step, OdeStats& stats,
                                      double floor_log = kNegInf) {
  return integrate_ode(
      f, y, t0, t1, tol, max_step,
      [](double, const std::array<complexd, N>&) {}, stats, floor_log);
}

}  // namespace dwv
