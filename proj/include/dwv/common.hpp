#pragma once

// Shared small utilities: error types, log-scale helpers, deterministic
// parallel sweeps, and a stable config hash.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace dwv {

using complexd = std::complex<double>;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;
constexpr double kLog2 = 0.69314718055994530942;

// Parameter outside its admissible window; message names the violated bound.
struct ParamError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Evaluation outside the representable range (e.g. linear-scale request for a
// quantity that only exists in log scale past its overflow horizon).
struct RangeError : std::range_error {
  using std::range_error::range_error;
};

// Quadrature or ODE solve failed to reach the requested tolerance.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Internal cross-check mismatch; indicates a solver or transform bug.
struct ConsistencyError : std::logic_error {
  using std::logic_error::logic_error;
};

// log(exp(a) + exp(b)) without overflow; -inf is the additive identity.
inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

// log|exp(a) - exp(b)| assuming a >= b; returns -inf when equal.
inline double log_sub(double a, double b) {
  if (b == kNegInf) return a;
  if (a <= b) return kNegInf;
  return a + std::log1p(-std::exp(b - a));
}

inline double sqr(double x) { return x * x; }

// FNV-1a 64-bit over a canonicalized string; stamps every output file so a
// CSV can be traced back to the exact config that produced it.
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v);

// Index-sharded parallel loop with a deterministic result layout: worker w
// handles indices w, w+jobs, w+2*jobs, ... and writes into caller-owned
// slots, so the output does not depend on scheduling.
inline void parallel_for(std::size_t n, unsigned jobs,
                         const std::function<void(std::size_t)>& body) {
  if (jobs <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  unsigned w = std::min<std::size_t>(jobs, n);
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex err_mu;
  pool.reserve(w);
  for (unsigned k = 0; k < w; ++k) {
    pool.emplace_back([&, k] {
      try {
        for (std::size_t i = k; i < n; i += w) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace dwv
