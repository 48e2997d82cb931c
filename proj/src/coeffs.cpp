#include "dwv/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dwv/quad.hpp"

namespace dwv {

namespace {

double checked_exp(double x, const char* what) {
  if (x > 709.0) throw RangeError(std::string(what) + ": linear-scale value overflows, use the log evaluator");
  return std::exp(x);
}

// Falling-factorial prefactor of d^k/dt^k (1+t)^p.
double falling(double p, int k) {
  double c = 1.0;
  for (int i = 0; i < k; ++i) c *= (p - double(i));
  return c;
}

double binom(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * double(n - k + i) / double(i);
  return c;
}

double poly_eval(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
  return v;
}

std::vector<double> poly_derive(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t i = 1; i < c.size(); ++i) d.push_back(double(i) * c[i]);
  if (d.empty()) d.push_back(0.0);
  return d;
}

}  // namespace

// ---------------------------------------------------------------------------
// BumpProfile

BumpProfile::BumpProfile(int M, double edge_width) : M_(M), edge_(edge_width) {
  if (M < 1) throw ParamError("BumpProfile: smoothness order must be >= 1");
  if (!(edge_width > 0.0 && edge_width < 0.25))
    throw ParamError("BumpProfile: edge width must lie in (0, 1/4)");
  // ramp = x^M (1-x)^M normalized to unit integral over [0,1]; its primitive
  // is the C^M smooth step used for both plateau edges.
  ramp_.assign(2 * M + 1, 0.0);
  for (int i = 0; i <= M; ++i)
    ramp_[M + i] = binom(M, i) * ((i % 2) ? -1.0 : 1.0);
  double B = 0.0;  // int_0^1 x^M (1-x)^M = (M!)^2 / (2M+1)!
  for (std::size_t i = 0; i < ramp_.size(); ++i)
    B += ramp_[i] / double(i + 1);
  for (double& c : ramp_) c /= B;

  amp_ = 1.0;  // provisional; eval() below uses amp_
  auto envelope_abs = [&](double s) {
    return plateau(s, 0) * std::abs(std::cos(2.0 * kPi * s));
  };
  QuadResult q = integrate(envelope_abs, 0.0, 1.0, 1e-12,
                           {edge_, 0.25, 0.75, 1.0 - edge_});
  amp_ = 0.5 / q.value;
  if (!(amp_ < 1.0))
    throw ParamError("BumpProfile: normalization exceeds the unit amplitude bound");

  c0_ = 0.0;
  c1_ = 0.0;
  const int n = 8000;
  for (int i = 0; i <= n; ++i) {
    double v = eval(double(i) / n, 0);
    c0_ = std::min(c0_, v);
    c1_ = std::max(c1_, v);
  }
}

double BumpProfile::plateau(double s, int k) const {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  if (s >= edge_ && s <= 1.0 - edge_) return k == 0 ? 1.0 : 0.0;
  bool left = s < edge_;
  double x = left ? s / edge_ : (1.0 - s) / edge_;
  if (k == 0) {
    // primitive of the ramp polynomial
    double v = 0.0;
    for (std::size_t i = ramp_.size(); i-- > 0;)
      v = v * x + ramp_[i] / double(i + 1);
    return v * x;
  }
  std::vector<double> c = ramp_;
  for (int i = 1; i < k; ++i) c = poly_derive(c);
  // d/ds x = 1/edge on the left edge, -1/edge on the right edge.
  double chain = std::pow(1.0 / edge_, k);
  double sign = left ? 1.0 : ((k % 2) ? -1.0 : 1.0);
  return sign * chain * poly_eval(c, x);
}

double BumpProfile::eval(double s, int k) const {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  // Leibniz product of plateau and cos(2 pi s).
  double acc = 0.0;
  for (int i = 0; i <= k; ++i) {
    double p = plateau(s, i);
    if (p == 0.0) continue;
    int j = k - i;
    double w = std::pow(2.0 * kPi, j);
    double trig;
    switch (j % 4) {
      case 0: trig = std::cos(2.0 * kPi * s); break;
      case 1: trig = -std::sin(2.0 * kPi * s); break;
      case 2: trig = -std::cos(2.0 * kPi * s); break;
      default: trig = std::sin(2.0 * kPi * s); break;
    }
    acc += binom(k, i) * p * w * trig;
  }
  return amp_ * acc;
}

// ---------------------------------------------------------------------------
// Oscillator

Oscillator::Oscillator(std::vector<double> centers, std::vector<double> widths,
                       std::vector<double> amplitudes, BumpProfile profile)
    : centers_(std::move(centers)),
      widths_(std::move(widths)),
      amps_(std::move(amplitudes)),
      profile_(std::move(profile)) {
  if (centers_.size() != widths_.size() || centers_.size() != amps_.size())
    throw ParamError("Oscillator: sequence lengths differ");
  if (centers_.empty()) throw ParamError("Oscillator: no bumps");
  for (std::size_t j = 0; j < centers_.size(); ++j) {
    if (centers_[j] <= 0.0) throw ParamError("Oscillator: centers must be positive");
    if (widths_[j] <= 0.0) throw ParamError("Oscillator: widths must be positive");
    if (!(amps_[j] > 0.0 && amps_[j] <= 1.0))
      throw ParamError("Oscillator: amplitudes must lie in (0, 1]");
    if (j + 1 < centers_.size()) {
      if (centers_[j + 1] <= centers_[j])
        throw ParamError("Oscillator: centers must increase");
      if (widths_[j] > centers_[j + 1] - centers_[j])
        throw ParamError("Oscillator: width exceeds the gap to the next bump");
    }
  }
  min_amp_ = *std::min_element(amps_.begin(), amps_.end());
  max_amp_ = *std::max_element(amps_.begin(), amps_.end());
}

int Oscillator::active_bump(double t) const {
  auto it = std::upper_bound(centers_.begin(), centers_.end(), t);
  if (it == centers_.begin()) return -1;
  std::size_t j = std::size_t(it - centers_.begin()) - 1;
  return (t < centers_[j] + widths_[j]) ? int(j) : -1;
}

double Oscillator::eval(double t, int k) const {
  double base = (k == 0) ? 1.0 : 0.0;
  int j = active_bump(t);
  if (j < 0) return base;
  double s = (t - centers_[j]) / widths_[j];
  return base + amps_[j] * profile_.eval(s, k) / std::pow(widths_[j], k);
}

std::vector<double> Oscillator::edges_in(double a, double b) const {
  std::vector<double> e;
  for (std::size_t j = 0; j < centers_.size(); ++j) {
    if (centers_[j] > b) break;
    if (centers_[j] > a && centers_[j] < b) e.push_back(centers_[j]);
    double hi = centers_[j] + widths_[j];
    if (hi > a && hi < b) e.push_back(hi);
  }
  return e;
}

// ---------------------------------------------------------------------------
// CoefficientFamily factories

namespace {
Oscillator make_train(int J, const std::function<double(int)>& t_j,
                      const std::function<double(int)>& delta_j,
                      const std::function<double(int)>& eta_j, int M) {
  std::vector<double> c, w, a;
  for (int j = 1; j <= J; ++j) {
    c.push_back(t_j(j));
    w.push_back(delta_j(j));
    a.push_back(eta_j(j));
  }
  return Oscillator(std::move(c), std::move(w), std::move(a), BumpProfile(M));
}
}  // namespace

CoefficientFamily CoefficientFamily::polynomial(double alpha, double beta,
                                                double gamma, double kappa,
                                                int M, int J) {
  if (!(alpha > 0.0)) throw ParamError("polynomial family: requires alpha > 0");
  if (!(gamma > -1.0 && gamma < alpha))
    throw ParamError("polynomial family: requires -1 < gamma < alpha");
  if (!(beta > alpha - gamma - 1.0 && beta < 2.0 * alpha + 1.0))
    throw ParamError("polynomial family: requires alpha - gamma - 1 < beta < 2 alpha + 1");
  if (kappa < (3.0 - beta) / 4.0 - 1e-12)
    throw ParamError("polynomial family: requires kappa >= (3 - beta)/4");
  if (!(kappa <= 1.0)) throw ParamError("polynomial family: requires kappa <= 1");
  if (M < 2) throw ParamError("polynomial family: requires M >= 2");
  CoefficientFamily f;
  f.kind_ = FamilyKind::polynomial;
  f.M_ = M;
  f.alpha_ = alpha;
  f.beta_ = beta;
  f.gamma_ = gamma;
  f.kappa_ = kappa;
  f.rho_coeff_ = sqr(alpha + 1.0) / (2.0 * alpha - beta + 1.0);
  if (J > 0) {
    f.osc_ = std::make_shared<Oscillator>(make_train(
        J, [](int j) { return std::pow(2.0, j); },
        [kappa](int j) { return std::pow(2.0, kappa * j); },
        [=](int j) { return std::pow(2.0, j * (1.0 + gamma - alpha - kappa)); },
        M));
  }
  return f;
}

CoefficientFamily CoefficientFamily::polynomial_unchecked(double alpha,
                                                          double beta,
                                                          double gamma,
                                                          double kappa, int M,
                                                          double rho_coeff) {
  CoefficientFamily f;
  f.kind_ = FamilyKind::polynomial;
  f.M_ = M;
  f.alpha_ = alpha;
  f.beta_ = beta;
  f.gamma_ = gamma;
  f.kappa_ = kappa;
  f.rho_coeff_ = rho_coeff;
  return f;
}

CoefficientFamily CoefficientFamily::exponential(double q, double r,
                                                 double kappa, int M, int J) {
  if (!(r > 0.0 && r < 1.0)) throw ParamError("exponential family: requires 0 < r < 1");
  if (!(q > 1.0 - r && q < 2.0))
    throw ParamError("exponential family: requires 1 - r < q < 2");
  if (kappa < -q / 4.0 - 1e-12)
    throw ParamError("exponential family: requires kappa >= -q/4");
  if (!(kappa <= 0.0)) throw ParamError("exponential family: requires kappa <= 0");
  if (M < 2) throw ParamError("exponential family: requires M >= 2");
  CoefficientFamily f;
  f.kind_ = FamilyKind::exponential;
  f.M_ = M;
  f.q_ = q;
  f.r_ = r;
  f.kappa_ = kappa;
  f.rho_coeff_ = 1.0 / (2.0 - q);
  if (J > 0) {
    f.osc_ = std::make_shared<Oscillator>(make_train(
        J, [](int j) { return double(j); },
        [kappa](int j) { return std::exp(kappa * j); },
        [=](int j) { return std::exp(j * (r - kappa - 1.0)); }, M));
  }
  return f;
}

CoefficientFamily CoefficientFamily::super_exponential(double q, double r,
                                                       double kappa, int M,
                                                       int J) {
  if (!(r > 0.0 && r < 1.0))
    throw ParamError("super-exponential family: requires 0 < r < 1");
  if (!(q > 1.0 - r && q < 2.0))
    throw ParamError("super-exponential family: requires 1 - r < q < 2");
  if (kappa < -q / 4.0 - 1e-12)
    throw ParamError("super-exponential family: requires kappa >= -q/4");
  if (M < 2) throw ParamError("super-exponential family: requires M >= 2");
  CoefficientFamily f;
  f.kind_ = FamilyKind::super_exponential;
  f.M_ = M;
  f.q_ = q;
  f.r_ = r;
  f.kappa_ = kappa;
  f.rho_coeff_ = 1.0 / (2.0 - q);
  f.build_se_polys();
  if (J > 0) {
    f.osc_ = std::make_shared<Oscillator>(make_train(
        J, [](int j) { return std::exp(double(j)); },
        [kappa](int j) { return std::exp(-double(j) + kappa * std::exp(double(j))); },
        [=](int j) { return std::exp((r - kappa - 1.0) * std::exp(double(j))); },
        M));
  }
  return f;
}

CoefficientFamily CoefficientFamily::custom(CustomHooks hooks, int M) {
  CoefficientFamily f;
  f.kind_ = FamilyKind::custom;
  f.M_ = M;
  f.hooks_ = std::move(hooks);
  return f;
}

void CoefficientFamily::build_se_polys() {
  // lambda = e^{t + e^t}: lambda^{(k)} = e^{t + e^t} P_k(e^t) with
  //   P_0 = 1, P_{k+1}(x) = x P_k'(x) + (1 + x) P_k(x);
  // rho = e^{t + q e^t}/(2-q): same recursion with (1 + q x).
  auto build = [&](double c) {
    std::vector<std::vector<double>> polys;
    polys.push_back({1.0});
    for (std::size_t k = 0; k < kJetOrder; ++k) {
      const auto& p = polys.back();
      std::vector<double> nx(p.size() + 1, 0.0);
      for (std::size_t i = 0; i < p.size(); ++i) {
        nx[i] += (1.0 + double(i)) * p[i];  // 1 * P_k  +  x * P_k'
        nx[i + 1] += c * p[i];              // c x * P_k
      }
      polys.push_back(std::move(nx));
    }
    return polys;
  };
  se_lambda_poly_ = build(1.0);
  se_rho_poly_ = build(q_);
}

// ---------------------------------------------------------------------------
// Shape evaluators

double CoefficientFamily::lambda(double t, int k) const {
  switch (kind_) {
    case FamilyKind::polynomial:
      return (alpha_ + 1.0) * falling(alpha_, k) * std::pow(1.0 + t, alpha_ - k);
    case FamilyKind::exponential:
      return std::exp(t);
    case FamilyKind::super_exponential: {
      double e = checked_exp(t + std::exp(t), "lambda");
      return e * poly_eval(se_lambda_poly_[std::size_t(k)], std::exp(t));
    }
    case FamilyKind::custom:
      return hooks_.lambda(t, k);
  }
  throw ConsistencyError("unreachable family kind");
}

double CoefficientFamily::rho(double t, int k) const {
  switch (kind_) {
    case FamilyKind::polynomial:
      return rho_coeff_ * falling(beta_, k) * std::pow(1.0 + t, beta_ - k);
    case FamilyKind::exponential:
      return rho_coeff_ * std::pow(q_, k) * std::exp(q_ * t);
    case FamilyKind::super_exponential: {
      double e = checked_exp(t + q_ * std::exp(t), "rho");
      return rho_coeff_ * e * poly_eval(se_rho_poly_[std::size_t(k)], std::exp(t));
    }
    case FamilyKind::custom:
      return hooks_.rho(t, k);
  }
  throw ConsistencyError("unreachable family kind");
}

double CoefficientFamily::log_lambda(double t) const {
  switch (kind_) {
    case FamilyKind::polynomial:
      return std::log(alpha_ + 1.0) + alpha_ * std::log1p(t);
    case FamilyKind::exponential:
      return t;
    case FamilyKind::super_exponential:
      return t + std::exp(t);
    case FamilyKind::custom:
      return std::log(hooks_.lambda(t, 0));
  }
  throw ConsistencyError("unreachable family kind");
}

double CoefficientFamily::log_rho(double t) const {
  switch (kind_) {
    case FamilyKind::polynomial:
      return std::log(rho_coeff_) + beta_ * std::log1p(t);
    case FamilyKind::exponential:
      return std::log(rho_coeff_) + q_ * t;
    case FamilyKind::super_exponential:
      return std::log(rho_coeff_) + t + q_ * std::exp(t);
    case FamilyKind::custom:
      return std::log(hooks_.rho(t, 0));
  }
  throw ConsistencyError("unreachable family kind");
}

double CoefficientFamily::Lambda(double t) const {
  if (kind_ == FamilyKind::custom) return hooks_.Lambda(t);
  return checked_exp(log_Lambda(t), "Lambda");
}

double CoefficientFamily::log_Lambda(double t) const {
  switch (kind_) {
    case FamilyKind::polynomial:
      return (alpha_ + 1.0) * std::log1p(t);
    case FamilyKind::exponential:
      return t;
    case FamilyKind::super_exponential:
      return std::exp(t);
    case FamilyKind::custom:
      return std::log(hooks_.Lambda(t));
  }
  throw ConsistencyError("unreachable family kind");
}

double CoefficientFamily::Theta(double t) const {
  if (kind_ == FamilyKind::custom) return hooks_.Theta(t);
  return checked_exp(log_Theta(t), "Theta");
}

double CoefficientFamily::log_Theta(double t) const {
  switch (kind_) {
    case FamilyKind::polynomial:
      return (gamma_ + 1.0) * std::log1p(t);
    case FamilyKind::exponential:
      return r_ * t;
    case FamilyKind::super_exponential:
      return r_ * std::exp(t);
    case FamilyKind::custom:
      return std::log(hooks_.Theta(t));
  }
  throw ConsistencyError("unreachable family kind");
}

double CoefficientFamily::Xi(double t) const {
  if (kind_ == FamilyKind::custom) return hooks_.Xi(t);
  return checked_exp(log_Xi(t), "Xi");
}

double CoefficientFamily::log_Xi(double t) const {
  switch (kind_) {
    case FamilyKind::polynomial:
      return kappa_ * std::log1p(t);
    case FamilyKind::exponential:
      return kappa_ * t;
    case FamilyKind::super_exponential:
      return -t + kappa_ * std::exp(t);
    case FamilyKind::custom:
      return std::log(hooks_.Xi(t));
  }
  throw ConsistencyError("unreachable family kind");
}

double CoefficientFamily::F(double t) const {
  if (kind_ == FamilyKind::custom) {
    if (!hooks_.F) throw ParamError("custom family: no F hook");
    return hooks_.F(t);
  }
  return checked_exp(log_F(t), "F");
}

double CoefficientFamily::log_F(double t) const {
  // Closed forms of 1 / int_t^inf dtau / (lambda Xi^2) per family.
  switch (kind_) {
    case FamilyKind::polynomial: {
      double p = alpha_ + 2.0 * kappa_ - 1.0;
      return std::log((alpha_ + 1.0) * p) + p * std::log1p(t);
    }
    case FamilyKind::exponential: {
      double p = 1.0 + 2.0 * kappa_;
      return std::log(p) + p * t;
    }
    case FamilyKind::super_exponential: {
      double p = 1.0 + 2.0 * kappa_;
      return std::log(p) + p * std::exp(t);
    }
    case FamilyKind::custom:
      return std::log(F(t));
  }
  throw ConsistencyError("unreachable family kind");
}

double CoefficientFamily::mu(double t) const {
  if (kind_ == FamilyKind::custom)
    return rho(t) * Lambda(t) / lambda(t);
  return checked_exp(log_mu(t), "mu");
}

double CoefficientFamily::log_mu(double t) const {
  return log_rho(t) + log_Lambda(t) - log_lambda(t);
}

double CoefficientFamily::eta(double t) const {
  if (kind_ == FamilyKind::custom) return mu(t) / (2.0 * Lambda(t));
  return checked_exp(log_eta(t), "eta");
}

double CoefficientFamily::log_eta(double t) const {
  return log_mu(t) - std::log(2.0) - log_Lambda(t);
}

double CoefficientFamily::omega(double t, int k) const {
  if (k > M_) throw ParamError("omega: derivative order exceeds the smoothness order M");
  if (!osc_) return k == 0 ? 1.0 : 0.0;
  return osc_->eval(t, k);
}

double CoefficientFamily::rho_omega(double t, int k) const {
  if (!osc_) return rho(t, k);
  double acc = 0.0;
  for (int i = 0; i <= k; ++i)
    acc += binom(k, i) * rho(t, i) * osc_->eval(t, k - i);
  return acc;
}

JetR CoefficientFamily::lambda_jet(double t) const {
  JetR j;
  for (std::size_t k = 0; k <= kJetOrder; ++k) j.d[k] = lambda(t, int(k));
  return j;
}

JetR CoefficientFamily::rho_jet(double t) const {
  JetR j;
  for (std::size_t k = 0; k <= kJetOrder; ++k) j.d[k] = rho(t, int(k));
  return j;
}

JetR CoefficientFamily::omega_jet(double t) const {
  JetR j;
  if (!osc_) {
    j.d[0] = 1.0;
    return j;
  }
  for (std::size_t k = 0; k <= kJetOrder; ++k) j.d[k] = osc_->eval(t, int(k));
  return j;
}

JetR CoefficientFamily::rho_omega_jet(double t) const {
  return rho_jet(t) * omega_jet(t);
}

double CoefficientFamily::mass(double t, double xi) const {
  double lw = lambda(t) * omega(t);
  double rw = rho_omega(t, 0);
  double drw = rho_omega(t, 1);
  return sqr(lw * xi) - 0.25 * sqr(rw) - 0.5 * drw;
}

double CoefficientFamily::bracket(double t, double xi) const {
  double lw = lambda(t) * omega(t);
  double rw = rho_omega(t, 0);
  return std::sqrt(std::abs(sqr(lw * xi) - 0.25 * sqr(rw)));
}

JetR CoefficientFamily::bracket_jet(double t, double xi, int* sign_out) const {
  JetR a = lambda_jet(t) * omega_jet(t) * xi;
  JetR b = rho_omega_jet(t) / 2.0;
  JetR arg = a * a - b * b;
  int sign = arg.value() >= 0.0 ? 1 : -1;
  if (sign_out) *sign_out = sign;
  return sqrt(sign > 0 ? arg : -arg);
}

double CoefficientFamily::log_bracket(double t, double log_xi,
                                      int* sign_out) const {
  double lw = std::log(omega(t));
  double A = log_lambda(t) + lw + log_xi;
  double B = log_rho(t) + lw - std::log(2.0);
  int sign = A >= B ? 1 : -1;
  if (sign_out) *sign_out = sign;
  return 0.5 * (sign > 0 ? log_sub(2.0 * A, 2.0 * B)
                         : log_sub(2.0 * B, 2.0 * A));
}

// ---------------------------------------------------------------------------
// Quadratures

double CoefficientFamily::integrate_B_lambda(double s, double t,
                                             double tol) const {
  if (!(t > s)) return 0.0;
  auto f = [&](double tau) { return sqr(lambda(tau)) / rho(tau); };
  QuadResult q = integrate(f, s, t, tol);
  if (!q.converged)
    throw NumericError("B_lambda quadrature did not converge");
  return q.value;
}

double CoefficientFamily::integrate_B_lambda_omega(double s, double t,
                                                   double tol) const {
  if (!(t > s)) return 0.0;
  auto f = [&](double tau) {
    return sqr(lambda(tau)) * omega(tau) / rho(tau);
  };
  QuadResult q = integrate(f, s, t, tol, bump_edges(s, t));
  if (!q.converged)
    throw NumericError("B_lambda(omega) quadrature did not converge");
  return q.value;
}

double CoefficientFamily::integrate_delta_log(double s, double t,
                                              double tol) const {
  if (!(t > s)) return 0.0;
  auto f = [&](double tau) { return rho_omega(tau, 0); };
  QuadResult q = integrate(f, s, t, tol, bump_edges(s, t));
  if (!q.converged)
    throw NumericError("delta-log quadrature did not converge");
  return 0.5 * q.value;
}

double CoefficientFamily::log_integral(
    const std::function<double(double)>& log_f, double s, double t,
    double tol) const {
  if (!(t > s)) return kNegInf;
  std::vector<double> knots = bump_edges(s, t);
  // Scan for the magnitude scale; monotone integrands peak at an endpoint
  // but bump trains can shift the maximum inside.
  double m = kNegInf;
  const int n = 128;
  for (int i = 0; i <= n; ++i)
    m = std::max(m, log_f(s + (t - s) * double(i) / n));
  for (double x : knots) m = std::max(m, log_f(x));
  if (m == kNegInf) return kNegInf;
  auto f = [&](double tau) { return std::exp(log_f(tau) - m); };
  QuadResult q = integrate(f, s, t, tol, knots);
  if (!q.converged) throw NumericError("log-scale quadrature did not converge");
  return m + std::log(q.value);
}

double CoefficientFamily::log_B_lambda(double s, double t, double tol) const {
  return log_integral(
      [&](double tau) { return 2.0 * log_lambda(tau) - log_rho(tau); }, s, t,
      tol);
}

double CoefficientFamily::F_identity_residual(double t, double tol) const {
  double log_total = log_tail_integral(
      [&](double tau) { return -log_lambda(tau) - 2.0 * log_Xi(tau); }, t,
      tol);
  return std::abs(std::expm1(log_total + log_F(t)));
}

std::string CoefficientFamily::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case FamilyKind::polynomial:
      os << "polynomial alpha=" << alpha_ << " beta=" << beta_
         << " gamma=" << gamma_ << " kappa=" << kappa_;
      break;
    case FamilyKind::exponential:
      os << "exponential q=" << q_ << " r=" << r_ << " kappa=" << kappa_;
      break;
    case FamilyKind::super_exponential:
      os << "super-exponential q=" << q_ << " r=" << r_ << " kappa=" << kappa_;
      break;
    case FamilyKind::custom:
      os << "custom";
      break;
  }
  os << " M=" << M_ << " J=" << (osc_ ? osc_->size() : 0);
  return os.str();
}

}  // namespace dwv
