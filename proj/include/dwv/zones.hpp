#pragma once

// Division of the extended phase space (t, |xi|) into the five zones used by
// the WKB analysis: dissipative, elliptic, reduced, oscillation and
// hyperbolic, split along the separating curve Gamma: |xi| = eta(t).
// Classification is done in log scale so it works past the linear-scale
// overflow horizon of fast-growing families.

#include <optional>
#include <vector>

#include "dwv/coeffs.hpp"

namespace dwv {

struct ZoneConfig {
  double N = 4.0;    // large zone constant
  double eps = 0.2;  // small zone constant, must stay below 1/2
  double d0 = 1.0;   // dissipative-zone constant
  double t0 = 0.0;   // large-time threshold (detect_t0), informational here

  void validate() const;  // throws ParamError on violated invariants
};

enum class ZoneTag { Hyp, Osc, Red, Ell, Diss, Uncovered };
enum class Region { hyperbolic, elliptic, boundary };

const char* zone_tag_name(ZoneTag tag);

struct Zone {
  ZoneTag tag = ZoneTag::Uncovered;
  Region region = Region::boundary;
};

// Deterministic classification; boundary ties resolve by the fixed
// precedence Diss > Ell > Red > Osc > Hyp. Points satisfying no definition
// are reported as Uncovered, never silently defaulted.
Zone classify(const CoefficientFamily& fam, const ZoneConfig& cfg, double t,
              double xi_mag);

// True iff the point fails classification only because of the side
// conditions attached to the hyperbolic-region zones (Theta|xi| vs N,
// Lambda|xi| vs N); the only structural gap the definitions leave open.
bool in_osc_side_gap(const CoefficientFamily& fam, const ZoneConfig& cfg,
                     double t, double xi_mag);

// True iff some defining equality of a zone boundary holds at the point to
// within relative tolerance tol (in log scale).
bool near_zone_boundary(const CoefficientFamily& fam, const ZoneConfig& cfg,
                        double t, double xi_mag, double tol);

struct SeparatingTimes {
  std::optional<double> t_diss;  // |xi| F(Lambda(t)) = d0, elliptic side
  std::optional<double> t_ell;   // <xi> = eps rho omega / 2, elliptic side
  std::optional<double> t_red;   // <xi> = eps rho omega / 2, hyperbolic side
  std::optional<double> t_osc;   // <xi> = N rho omega / 2, hyperbolic side
  std::optional<double> t_xi;    // eta(t) = |xi| / sqrt(1 - eps^2)
};

// Bracketing on a sample grid followed by bisection on the defining
// equalities; absent optional when no sign change occurs on [0, horizon].
// t_xi is only computed when eta is strictly monotone on the grid.
SeparatingTimes separating_times(const CoefficientFamily& fam,
                                 const ZoneConfig& cfg, double xi_mag,
                                 double horizon, double tol = 1e-10);

// C-infinity cutoff: 1 on [0,1/2], 0 on [1,inf), glued from e^{-1/x} bumps.
double smooth_step(double s);
double smooth_step_deriv(double s);

struct WeightValue {
  double value = 0.0;
  double dt = 0.0;  // time derivative
};

// h1 = chi(|xi| F) lambda/F + (1 - chi) lambda |xi|
double h1(const CoefficientFamily& fam, const ZoneConfig& cfg, double t,
          double xi_mag);
WeightValue h1_with_deriv(const CoefficientFamily& fam, const ZoneConfig& cfg,
                          double t, double xi_mag);

// h2 = chi(<xi> / (eps rho omega / 2)) eps rho omega / 2 + (1 - chi) <xi>
double h2(const CoefficientFamily& fam, const ZoneConfig& cfg, double t,
          double xi_mag);
WeightValue h2_with_deriv(const CoefficientFamily& fam, const ZoneConfig& cfg,
                          double t, double xi_mag);

// Small/large-frequency threshold Omega(0,t) = max{eta(0), eta(t)} sqrt(1-eps^2).
double omega_threshold(const CoefficientFamily& fam, const ZoneConfig& cfg,
                       double t);

}  // namespace dwv
