#pragma once

// Fundamental solutions of the first-order systems attached to the Fourier
// modes of the damped wave model, the solution kernels and their time
// derivatives, and Sobolev-norm assembly by radial frequency quadrature.
//
// Convention: D_t = -i d/dt. Systems are stated as D_t Y = A Y and
// integrated as Y' = iA Y.

#include <functional>
#include <vector>

#include "dwv/coeffs.hpp"
#include "dwv/rk.hpp"
#include "dwv/zones.hpp"

namespace dwv {

enum class SystemKind {
  RawScalar,  // companion of u_tt + lambda^2 omega^2 xi^2 u + rho omega u_t = 0
              // in the state (u, u_t)
  USystem,    // micro-energy (h1 u, D_t u)
  VSystem,    // micro-energy (h2 v, D_t v) of the dissipation-free transform
  VScalar     // companion of v_tt + m v = 0 in the state (v, v_t)
};

const char* system_kind_name(SystemKind k);

struct FundamentalMatrix {
  Mat2 E = mat_identity();
  double s = 0.0, t = 0.0, xi_mag = 0.0;
  SystemKind kind = SystemKind::RawScalar;
  double tol = 0.0;
  OdeStats stats;
  // 1/2 int_s^t rho omega, carried analytically for the V-representations
  // (u = v / exp(log_damping) when s = 0).
  double log_damping = 0.0;
};

FundamentalMatrix fundamental_matrix(const CoefficientFamily& fam,
                                     const ZoneConfig& cfg, SystemKind kind,
                                     double s, double t, double xi_mag,
                                     double tol);

// Solution kernels: u(t) = K0 u0 + K1 u1 in Fourier space. Derivatives are
// plain d/dt. Computed from direct companion solves and cross-checked
// against the micro-energy identities (throws ConsistencyError past
// 100 * tol mismatch).
struct KernelValues {
  complexd K0, dtK0, K1, dtK1;
};

KernelValues kernels(const CoefficientFamily& fam, const ZoneConfig& cfg,
                     double t, double xi_mag, double tol);

// One companion solve per frequency with dense output at the sorted times
// ts; when floor_log > -inf the solve stops once the state has decayed by
// that many log units below its running peak and the remaining samples are
// zero. No cross-check (bulk path for norm sweeps).
std::vector<KernelValues> kernels_at_times(const CoefficientFamily& fam,
                                           const ZoneConfig& cfg,
                                           const std::vector<double>& ts,
                                           double xi_mag, double tol,
                                           double floor_log = kNegInf);

// Entrywise relative residual of the elliptic backward representation
//   E(t,s,xi) = T(t,xi) E_V(t,s,xi) T^{-1}(s,xi)
// with E realized on the micro-energy (lambda |xi| u, D_t u) and E_V through
// the scalar v-equation; the delta factors of T are carried in log scale.
double backward_transform_check(const CoefficientFamily& fam,
                                const ZoneConfig& cfg, double s, double t,
                                double xi_mag, double tol);

// Radial data profile with analytically known Fourier transform.
struct DataProfile {
  std::function<double(double)> fhat;  // \hat u as a function of r = |xi|
  double support_radius;               // integration may stop here
  std::string name;

  static DataProfile gaussian();          // e^{-r^2/2}
  static DataProfile indicator(double R); // 1 on [0, R] (L^m-flavored data)
  static DataProfile zero();
};

// || u(t,.) ||_{H-dot^sigma}^2 = c_n int_0^inf r^{2 sigma + n - 1}
//   |K0(t,r) uhat0(r) + K1(t,r) uhat1(r)|^2 dr,
// c_n = surface measure of S^{n-1} (normalization documented; it cancels in
// decay-exponent fits). time_deriv switches to the d/dt kernels.
double assemble_norm(const CoefficientFamily& fam, const ZoneConfig& cfg,
                     const DataProfile& data0, const DataProfile& data1,
                     double t, double sigma, int n, double tol,
                     bool time_deriv = false);

double surface_measure(int n);  // c_n

// Bulk path: kernel table over a fixed (times x radial grid) lattice, one
// floored companion solve per radius, parallel over radii with
// deterministic layout.
struct KernelTable {
  std::vector<double> ts;
  std::vector<double> rs;
  std::vector<KernelValues> k;  // row-major [i_t * rs.size() + i_r]
  const KernelValues& at(std::size_t it, std::size_t ir) const {
    return k[it * rs.size() + ir];
  }
};

KernelTable kernel_table(const CoefficientFamily& fam, const ZoneConfig& cfg,
                         const std::vector<double>& ts,
                         const std::vector<double>& rs, double tol,
                         double floor_log = std::log(1e-70), int jobs = 1);

// Composite Simpson in log r over the table's radial grid.
double norm_from_table(const KernelTable& table, std::size_t it,
                       const DataProfile& data0, const DataProfile& data1,
                       double sigma, int n, bool time_deriv = false);

// log-spaced radial grid helper
std::vector<double> log_grid(double lo, double hi, int n);

}  // namespace dwv
