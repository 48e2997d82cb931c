#pragma once

// Numerical certification of a coefficient family against the admissibility
// conditions A1..A5 (shape and oscillation) and B1..B6 (damping), producing
// a machine-readable report of empirical constants. Limit conditions are
// evidenced by trend tests (value at T vs T/2), never proven.

#include <string>
#include <vector>

#include "dwv/coeffs.hpp"

namespace dwv {

enum class ConditionId { A1, A2, A3, A4, A5, B1, B2, B3, B4, B5, B6 };

const char* condition_name(ConditionId id);

struct ConditionRecord {
  ConditionId id;
  bool pass = false;
  // Named empirical constants (e.g. "lambda0", "C3").
  std::vector<std::pair<std::string, double>> constants;
  double witness_t = 0.0;  // sample where the worst ratio was attained
  std::string note;
};

struct AssumptionReport {
  std::vector<ConditionRecord> records;  // exactly one per ConditionId
  double horizon = 0.0;
  std::size_t grid_size = 0;

  const ConditionRecord& get(ConditionId id) const;
  bool all_pass() const;
  std::string to_text() const;
};

struct GridSpec {
  int n = 1200;              // base uniform samples over [0, T]
  bool refine_bumps = true;  // add samples inside each oscillator bump
  // Required resolution: at least this many samples per bump width.
  int samples_per_bump = 8;
  double trend_factor = 1.5;  // growth factor required by divergence trends
  double tol = 1e-8;          // quadrature tolerance
};

// Sample grid over [0, T]; throws when a bump cannot be resolved and
// refinement is disabled.
std::vector<double> build_grid(const CoefficientFamily& fam, double T,
                               const GridSpec& spec);

AssumptionReport check_all(const CoefficientFamily& fam, double T,
                           const GridSpec& spec = {});

// (int_0^t lambda |omega - 1|) / Theta(t), computed bump by bump in log
// scale; identically 0 for trivial omega.
double stabilization_ratio(const CoefficientFamily& fam, double t,
                           double tol = 1e-8);

// log of int_0^t lambda |omega - 1|; -inf for trivial omega.
double log_stabilization_integral(const CoefficientFamily& fam, double t,
                                  double tol = 1e-8);

// Smallest grid time after which |(rho omega)'| / (rho omega)^2 <= eps/4 on
// all subsequent samples; negative when no such time exists on the horizon.
double detect_t0(const CoefficientFamily& fam, double eps, double T,
                 const GridSpec& spec = {});

}  // namespace dwv
