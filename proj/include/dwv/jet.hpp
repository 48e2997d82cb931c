#pragma once

// Truncated Taylor arithmetic: Jet<T, K> carries a value and its first K
// time derivatives and propagates them through arithmetic via the Leibniz
// rule. This is how every D_t of a matrix entry is realized analytically;
// finite differences appear only in validation cross-checks.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

#include "dwv/common.hpp"

namespace dwv {

template <class T, std::size_t K>
struct Jet {
  // d[k] = k-th derivative (not divided by k!).
  std::array<T, K + 1> d{};

  Jet() = default;
  explicit Jet(T value) { d[0] = value; }

  static Jet variable(T value) {
    Jet j(value);
    if constexpr (K >= 1) j.d[1] = T(1);
    return j;
  }

  T value() const { return d[0]; }
  T deriv(std::size_t k) const { return d[k]; }
};

namespace detail {
inline constexpr std::size_t kMaxJetOrder = 8;
// binom(n, k) for n <= kMaxJetOrder, precomputed once.
inline const std::array<std::array<double, kMaxJetOrder + 1>,
                        kMaxJetOrder + 1>&
binom_table() {
  static const auto table = [] {
    std::array<std::array<double, kMaxJetOrder + 1>, kMaxJetOrder + 1> c{};
    for (std::size_t n = 0; n <= kMaxJetOrder; ++n) {
      c[n][0] = 1.0;
      for (std::size_t k = 1; k <= n; ++k)
        c[n][k] = c[n - 1][k - 1] + (k <= n - 1 ? c[n - 1][k] : 0.0);
    }
    return c;
  }();
  return table;
}
}  // namespace detail

template <class T, std::size_t K>
Jet<T, K> operator+(const Jet<T, K>& a, const Jet<T, K>& b) {
  Jet<T, K> r;
  for (std::size_t k = 0; k <= K; ++k) r.d[k] = a.d[k] + b.d[k];
  return r;
}

template <class T, std::size_t K>
Jet<T, K> operator-(const Jet<T, K>& a, const Jet<T, K>& b) {
  Jet<T, K> r;
  for (std::size_t k = 0; k <= K; ++k) r.d[k] = a.d[k] - b.d[k];
  return r;
}

template <class T, std::size_t K>
Jet<T, K> operator-(const Jet<T, K>& a) {
  Jet<T, K> r;
  for (std::size_t k = 0; k <= K; ++k) r.d[k] = -a.d[k];
  return r;
}

template <class T, std::size_t K>
Jet<T, K> operator*(const Jet<T, K>& a, const Jet<T, K>& b) {
  static_assert(K <= detail::kMaxJetOrder);
  const auto& c = detail::binom_table();
  Jet<T, K> r;
  for (std::size_t k = 0; k <= K; ++k) {
    T acc{};
    for (std::size_t i = 0; i <= k; ++i) acc += c[k][i] * a.d[i] * b.d[k - i];
    r.d[k] = acc;
  }
  return r;
}

template <class T, std::size_t K>
Jet<T, K> operator*(T s, const Jet<T, K>& a) {
  Jet<T, K> r;
  for (std::size_t k = 0; k <= K; ++k) r.d[k] = s * a.d[k];
  return r;
}

template <class T, std::size_t K>
Jet<T, K> operator*(const Jet<T, K>& a, T s) {
  return s * a;
}

// Division via recursive Leibniz solve of a = q * b.
template <class T, std::size_t K>
Jet<T, K> operator/(const Jet<T, K>& a, const Jet<T, K>& b) {
  static_assert(K <= detail::kMaxJetOrder);
  const auto& c = detail::binom_table();
  Jet<T, K> q;
  for (std::size_t k = 0; k <= K; ++k) {
    T acc = a.d[k];
    for (std::size_t i = 0; i < k; ++i) acc -= c[k][i] * q.d[i] * b.d[k - i];
    q.d[k] = acc / b.d[0];
  }
  return q;
}

template <class T, std::size_t K>
Jet<T, K> operator/(const Jet<T, K>& a, T s) {
  Jet<T, K> r;
  for (std::size_t k = 0; k <= K; ++k) r.d[k] = a.d[k] / s;
  return r;
}

// Composition with a univariate analytic g given its derivatives at a.d[0].
// Uses Faa di Bruno via the exponential-of-series trick specialized per
// function below; orders up to K=4 are what the toolkit needs.
template <class T, std::size_t K, class DerivFn>
Jet<T, K> compose(const Jet<T, K>& a, DerivFn g_derivs) {
  // g_derivs(k) = g^{(k)}(a.d[0]).
  // Build via repeated differentiation of h(t) = g(a(t)):
  // maintain jets of g'(a(t)) recursively. Simple approach: Taylor
  // coefficients. Convert derivative arrays to Taylor coefficients, compose
  // power series, convert back.
  std::array<T, K + 1> ac{}, gc{}, hc{};
  double fact = 1.0;
  for (std::size_t k = 0; k <= K; ++k) {
    if (k > 0) fact *= double(k);
    ac[k] = a.d[k] / fact;
    gc[k] = g_derivs(k) / fact;
  }
  // h = sum_k gc[k] * (a - a0)^k as truncated series.
  std::array<T, K + 1> pw{};  // (a - a0)^k, pw starts as 1
  pw[0] = T(1);
  hc[0] = gc[0];
  std::array<T, K + 1> da = ac;
  da[0] = T{};
  for (std::size_t k = 1; k <= K; ++k) {
    // pw *= da (truncated convolution; da[0] = 0 so degrees only rise)
    std::array<T, K + 1> np{};
    for (std::size_t i = 0; i <= K; ++i)
      for (std::size_t j = 1; i + j <= K; ++j) np[i + j] += pw[i] * da[j];
    pw = np;
    for (std::size_t i = 0; i <= K; ++i) hc[i] += gc[k] * pw[i];
  }
  Jet<T, K> r;
  fact = 1.0;
  for (std::size_t k = 0; k <= K; ++k) {
    if (k > 0) fact *= double(k);
    r.d[k] = hc[k] * fact;
  }
  return r;
}

template <class T, std::size_t K>
Jet<T, K> sqrt(const Jet<T, K>& a) {
  using std::sqrt;
  T r0 = sqrt(a.d[0]);
  return compose(a, [&](std::size_t k) {
    // d^k/dx^k sqrt(x) = prod_{i<k}(1/2 - i) * x^{1/2 - k}
    T v = r0;
    double coef = 1.0;
    for (std::size_t i = 0; i < k; ++i) coef *= (0.5 - double(i));
    for (std::size_t i = 0; i < k; ++i) v = v / a.d[0];
    return coef * v;
  });
}

template <class T, std::size_t K>
Jet<T, K> exp(const Jet<T, K>& a) {
  using std::exp;
  T e = exp(a.d[0]);
  return compose(a, [&](std::size_t) { return e; });
}

template <class T, std::size_t K>
Jet<T, K> log(const Jet<T, K>& a) {
  using std::log;
  return compose(a, [&](std::size_t k) -> T {
    if (k == 0) return log(a.d[0]);
    T v = T(1);
    double coef = (k % 2 == 0) ? -1.0 : 1.0;
    for (std::size_t i = 1; i + 1 < k + 1; ++i) coef *= double(i);
    for (std::size_t i = 0; i < k; ++i) v = v / a.d[0];
    return coef * v;
  });
}

template <class T, std::size_t K>
Jet<T, K> pow(const Jet<T, K>& a, double p) {
  using std::pow;
  return compose(a, [&](std::size_t k) {
    double coef = 1.0;
    for (std::size_t i = 0; i < k; ++i) coef *= (p - double(i));
    return coef * pow(a.d[0], p - double(k));
  });
}

template <class T, std::size_t K>
Jet<T, K> cos(const Jet<T, K>& a) {
  using std::cos;
  using std::sin;
  T c = cos(a.d[0]), s = sin(a.d[0]);
  return compose(a, [&](std::size_t k) -> T {
    switch (k % 4) {
      case 0: return c;
      case 1: return -s;
      case 2: return -c;
      default: return s;
    }
  });
}

template <class T, std::size_t K>
Jet<T, K> sin(const Jet<T, K>& a) {
  using std::cos;
  using std::sin;
  T c = cos(a.d[0]), s = sin(a.d[0]);
  return compose(a, [&](std::size_t k) -> T {
    switch (k % 4) {
      case 0: return s;
      case 1: return c;
      case 2: return -s;
      default: return -c;
    }
  });
}

// Default derivative order used across the toolkit: enough to take two
// explicit derivatives of expressions that already contain one derivative.
inline constexpr std::size_t kJetOrder = 4;
using JetR = Jet<double, kJetOrder>;
using JetC = Jet<complexd, kJetOrder>;

// Promote a real jet to a complex jet.
inline JetC to_complex(const JetR& a) {
  JetC r;
  for (std::size_t k = 0; k <= kJetOrder; ++k) r.d[k] = complexd(a.d[k], 0.0);
  return r;
}

// D_t = -i d/dt applied k times: D_t^k f = (-i)^k f^{(k)}.
inline complexd Dt_pow(const JetC& f, std::size_t k) {
  complexd ik(1.0, 0.0);
  const complexd mi(0.0, -1.0);
  for (std::size_t i = 0; i < k; ++i) ik *= mi;
  return ik * f.d[k];
}

}  // namespace dwv
