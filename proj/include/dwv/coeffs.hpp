#pragma once

// Coefficient families for the damped wave model
//   u_tt - lambda^2(t) omega^2(t) Delta u + rho(t) omega(t) u_t = 0.
//
// lambda and rho are monotone shape factors with closed-form primitives and
// derivatives; omega is a bounded bump-train oscillation around 1. Derived
// scales: Lambda = primitive of lambda, Theta = stabilization scale,
// Xi = derivative-control scale, F = effective dissipative-threshold scale,
// mu = rho Lambda / lambda, eta = mu / (2 Lambda).

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dwv/common.hpp"
#include "dwv/jet.hpp"

namespace dwv {

// C^M bump profile on [0,1]: polynomial smooth-step plateau times cos(2*pi*s),
// scaled so the integral of |psi| is exactly 1/2 while max|psi| < 1.
class BumpProfile {
 public:
  explicit BumpProfile(int M, double edge_width = 0.1);

  // k-th derivative of psi at s; identically 0 outside (0,1).
  double eval(double s, int k = 0) const;

  double min_value() const { return c0_; }
  double max_value() const { return c1_; }
  double amplitude() const { return amp_; }
  int smoothness() const { return M_; }
  double edge_width() const { return edge_; }

 private:
  double plateau(double s, int k) const;

  int M_;
  double edge_;
  double amp_;
  double c0_, c1_;
  // Coefficients of x^M (1-x)^M / B in the monomial basis; its primitive is
  // the smooth-step edge ramp.
  std::vector<double> ramp_;
};

// Bump train omega(t) = 1 + sum_j eta_j psi((t - t_j)/delta_j) with disjoint
// supports [t_j, t_j + delta_j].
class Oscillator {
 public:
  Oscillator(std::vector<double> centers, std::vector<double> widths,
             std::vector<double> amplitudes, BumpProfile profile);

  double eval(double t, int k = 0) const;
  // Index of the bump whose support contains t, or -1.
  int active_bump(double t) const;
  std::size_t size() const { return centers_.size(); }
  double center(std::size_t j) const { return centers_[j]; }
  double width(std::size_t j) const { return widths_[j]; }
  double amplitude(std::size_t j) const { return amps_[j]; }
  const BumpProfile& profile() const { return profile_; }
  // Range offsets of omega - 1: the largest amplitude scales the profile
  // extrema (min_value is negative).
  double c0() const { return max_amp_ * profile_.min_value(); }
  double c1() const { return max_amp_ * profile_.max_value(); }
  // Support endpoints intersecting [a,b]; quadrature panels split here.
  std::vector<double> edges_in(double a, double b) const;

 private:
  std::vector<double> centers_, widths_, amps_;
  BumpProfile profile_;
  double min_amp_, max_amp_;
};

enum class FamilyKind { polynomial, exponential, super_exponential, custom };

// Hooks for hand-built test families that bypass the admissibility
// preconditions (degenerate or deliberately inadmissible configurations).
struct CustomHooks {
  std::function<double(double, int)> lambda;   // k-th derivative
  std::function<double(double, int)> rho;
  std::function<double(double)> Lambda;
  std::function<double(double)> Theta;
  std::function<double(double)> Xi;
  std::function<double(double)> F;             // F(Lambda(t))
};

class CoefficientFamily {
 public:
  static CoefficientFamily polynomial(double alpha, double beta, double gamma,
                                      double kappa, int M, int J);
  static CoefficientFamily exponential(double q, double r, double kappa, int M,
                                       int J);
  static CoefficientFamily super_exponential(double q, double r, double kappa,
                                             int M, int J);
  // Like polynomial() but skipping parameter-window validation and with an
  // explicit rho coefficient; used to build inadmissible configurations on
  // purpose (e.g. over-damping beta >= 2 alpha + 1).
  static CoefficientFamily polynomial_unchecked(double alpha, double beta,
                                                double gamma, double kappa,
                                                int M, double rho_coeff);
  static CoefficientFamily custom(CustomHooks hooks, int M);

  FamilyKind kind() const { return kind_; }
  int smoothness() const { return M_; }
  bool log_scale() const { return kind_ == FamilyKind::super_exponential; }
  bool has_oscillator() const { return osc_ != nullptr; }
  const Oscillator* oscillator() const { return osc_.get(); }
  // Family parameters (NaN where not applicable).
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double gamma() const { return gamma_; }
  double kappa() const { return kappa_; }
  double q() const { return q_; }
  double r() const { return r_; }
  std::string describe() const;

  // Shape evaluators; k is the derivative order. Linear-scale evaluators
  // throw RangeError past the overflow horizon; log evaluators never do.
  double lambda(double t, int k = 0) const;
  double rho(double t, int k = 0) const;
  double log_lambda(double t) const;
  double log_rho(double t) const;
  double Lambda(double t) const;
  double log_Lambda(double t) const;
  double Theta(double t) const;
  double log_Theta(double t) const;
  double Xi(double t) const;
  double log_Xi(double t) const;
  double F(double t) const;          // F(Lambda(t)), closed form
  double log_F(double t) const;
  double mu(double t) const;
  double log_mu(double t) const;
  double eta(double t) const;        // mu / (2 Lambda)
  double log_eta(double t) const;

  // Oscillation factor and combined damping coefficient rho*omega.
  double omega(double t, int k = 0) const;
  double rho_omega(double t, int k = 0) const;
  double c0() const { return osc_ ? osc_->c0() : 0.0; }
  double c1() const { return osc_ ? osc_->c1() : 0.0; }

  // Derivative jets (value + first kJetOrder derivatives).
  JetR lambda_jet(double t) const;
  JetR rho_jet(double t) const;
  JetR omega_jet(double t) const;
  JetR rho_omega_jet(double t) const;

  // Mass term of the transformed scalar equation v'' + m v = 0:
  //   m = lambda^2 omega^2 |xi|^2 - (rho omega)^2/4 - (rho omega)'/2.
  double mass(double t, double xi) const;
  // Weight <xi> = sqrt(|lambda^2 omega^2 xi^2 - rho^2 omega^2 / 4|).
  double bracket(double t, double xi) const;
  // Jet of <xi> away from the separating curve; sign_out (+1 hyperbolic
  // side, -1 elliptic side) reports which branch was taken.
  JetR bracket_jet(double t, double xi, int* sign_out = nullptr) const;
  // log <xi> from log xi, stable for log-scale families; also exposes the
  // sign of lambda omega xi - rho omega / 2.
  double log_bracket(double t, double log_xi, int* sign_out = nullptr) const;

  // Quadratures over the family (panels split at bump edges).
  // B_lambda(s,t) = int_s^t lambda^2 / rho.
  double integrate_B_lambda(double s, double t, double tol) const;
  // int_s^t lambda^2 omega / rho (elliptic-bound exponent).
  double integrate_B_lambda_omega(double s, double t, double tol) const;
  // log(delta(t)/delta(s)) = 1/2 int_s^t rho omega.
  double integrate_delta_log(double s, double t, double tol) const;
  // log of the above quantities, usable past the overflow horizon.
  double log_integral(const std::function<double(double)>& log_f, double s,
                      double t, double tol) const;
  double log_B_lambda(double s, double t, double tol) const;

  // Residual of the defining identity of F:
  //   |1/F(t) - int_t^inf 1/(lambda Xi^2)| / (1/F(t)),
  // with the tail beyond the quadrature horizon estimated from the local
  // decay rate of the integrand.
  double F_identity_residual(double t, double tol) const;

  std::vector<double> bump_edges(double a, double b) const {
    return osc_ ? osc_->edges_in(a, b) : std::vector<double>{};
  }

 private:
  CoefficientFamily() = default;

  FamilyKind kind_ = FamilyKind::custom;
  int M_ = 2;
  double alpha_ = 0, beta_ = 0, gamma_ = 0, kappa_ = 0, q_ = 0, r_ = 0;
  double rho_coeff_ = 0;  // multiplicative constant in rho
  // Super-exponential derivative recursions: lambda^{(k)} = e^{t+e^t} P_k(e^t)
  // and similarly for rho with the inner exponent q; coefficients of P_k.
  std::vector<std::vector<double>> se_lambda_poly_, se_rho_poly_;
  std::shared_ptr<const Oscillator> osc_;
  CustomHooks hooks_;

  void build_se_polys();
};

// Free-function spellings used across modules.
inline double eval_omega(const Oscillator& osc, double t, int k) {
  return osc.eval(t, k);
}
inline double eval_mass(const CoefficientFamily& f, double t, double xi) {
  return f.mass(t, xi);
}
inline double eval_bracket(const CoefficientFamily& f, double t, double xi) {
  return f.bracket(t, xi);
}
inline double integrate_B_lambda(const CoefficientFamily& f, double s,
                                 double t, double tol) {
  return f.integrate_B_lambda(s, t, tol);
}
inline double integrate_delta_log(const CoefficientFamily& f, double s,
                                  double t, double tol) {
  return f.integrate_delta_log(s, t, tol);
}

}  // namespace dwv
