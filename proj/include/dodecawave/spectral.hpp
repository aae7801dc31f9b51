#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "errors.hpp"
#include "evolution.hpp"

namespace dodecawave {

// Eigenvalue -q^2 of the Laplacian on K with q^2 = beta^2 - 1.
struct EigenLabel {
  int beta = 1;
  double q2() const { return static_cast<double>(beta) * beta - 1.0; }
  double q() const { return std::sqrt(q2()); }
  bool is_zero() const { return beta == 1; }
  // sin(beta pi / 2) for odd beta.
  double sign() const { return ((beta - 1) / 2) % 2 == 0 ? 1.0 : -1.0; }
};

inline std::vector<EigenLabel> eigen_betas(int beta_max) {
  static constexpr int sporadic[] = {1, 13, 21, 25, 31, 33, 37, 41, 43, 45, 49, 51, 53, 55, 57};
  std::vector<EigenLabel> out;
  for (int b : sporadic)
    if (b <= beta_max) out.push_back({b});
  for (int b = 61; b <= beta_max; b += 2) out.push_back({b});
  return out;
}

inline bool is_admissible_beta(int beta) {
  auto v = eigen_betas(std::max(beta, 1));
  return !v.empty() && v.back().beta == beta;
}

// ---- Ferrers functions of half-odd degree -------------------------------------------------
// With x = cos(theta), s = sin(theta) and beta = nu + 1/2 the functions reduce to elementary ones.

struct FerrersValue {
  double value, derivative;  // d/dx
};

namespace detail {

inline FerrersValue ferrers_p32(double beta, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  const double cb = std::cos(beta * theta), sb = std::sin(beta * theta);
  const double k = std::sqrt(2.0 / M_PI);
  double h = -(c / s) * cb - beta * sb;
  double dh = cb / (s * s) + (c / s) * beta * sb - beta * beta * cb;
  double v = k * h / std::sqrt(s);
  double dtheta = k * (-0.5 * c * h / (s * std::sqrt(s)) + dh / std::sqrt(s));
  return {v, -dtheta / s};
}

inline FerrersValue ferrers_q32(double beta, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  const double cb = std::cos(beta * theta), sb = std::sin(beta * theta);
  const double k = std::sqrt(M_PI / 2.0);
  double h = (c / s) * sb - beta * cb;
  double dh = -sb / (s * s) + (c / s) * beta * cb + beta * beta * sb;
  double v = k * h / std::sqrt(s);
  double dtheta = k * (-0.5 * c * h / (s * std::sqrt(s)) + dh / std::sqrt(s));
  return {v, -dtheta / s};
}

inline FerrersValue ferrers_pm32_half(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  const double k = 1.0 / std::sqrt(2.0 * M_PI);
  double m = theta - s * c;
  double s32 = s * std::sqrt(s);
  double v = k * m / s32;
  double dtheta = k * (2.0 * s * s / s32 - 1.5 * m * c / (s32 * s));
  return {v, -dtheta / s};
}

inline double checked_theta(double x) {
  if (!(x > -1.0 && x < 1.0)) throw DomainError("Ferrers functions need |x| < 1");
  return std::acos(x);
}

inline double beta_of(double nu) { return nu + 0.5; }

}  // namespace detail

// P^mu_nu(x) for mu = 3/2 and nu = beta - 1/2, or mu = -3/2 and nu = 1/2.
inline FerrersValue ferrers_P_full(double mu, double nu, double x) {
  double theta = detail::checked_theta(x);
  if (mu == 1.5) return detail::ferrers_p32(detail::beta_of(nu), theta);
  if (mu == -1.5 && nu == 0.5) return detail::ferrers_pm32_half(theta);
  throw DomainError("ferrers_P: only mu = 3/2, or mu = -3/2 with nu = 1/2");
}

inline FerrersValue ferrers_Q_full(double mu, double nu, double x) {
  double theta = detail::checked_theta(x);
  if (mu == 1.5) return detail::ferrers_q32(detail::beta_of(nu), theta);
  throw DomainError("ferrers_Q: only mu = 3/2");
}

inline double ferrers_P(double mu, double nu, double x) { return ferrers_P_full(mu, nu, x).value; }
inline double ferrers_Q(double mu, double nu, double x) { return ferrers_Q_full(mu, nu, x).value; }

namespace detail {

// sum_s (nu+1)_s (-nu)_s / (Gamma(a+s) s!) ((1-x)/2)^s
inline double regularized_hypergeometric(double nu, double a, double x) {
  const double z = 0.5 * (1.0 - x);
  double term = 1.0 / std::tgamma(a);
  double sum = term;
  for (int s = 0; s < 200; ++s) {
    term *= (nu + 1.0 + s) * (-nu + s) / ((a + s) * (s + 1.0)) * z;
    sum += term;
    if (std::fabs(term) < 1e-16 * std::fabs(sum)) return sum;
  }
  throw NumericalError("hypergeometric series did not converge in 200 terms");
}

}  // namespace detail

// The hypergeometric representations in powers of (1-x). Well conditioned only for x near 1;
// at x = 0 and large beta the terms cancel catastrophically.
inline double ferrers_P_series(double mu, double nu, double x) {
  if (!(x > -1.0 && x < 1.0)) throw DomainError("Ferrers functions need |x| < 1");
  return std::pow((1.0 + x) / (1.0 - x), mu / 2.0) * detail::regularized_hypergeometric(nu, 1.0 - mu, x);
}

inline double ferrers_Q_series(double mu, double nu, double x) {
  if (!(x > -1.0 && x < 1.0)) throw DomainError("Ferrers functions need |x| < 1");
  if (mu != 1.5) throw DomainError("ferrers_Q_series: only mu = 3/2");
  double beta = detail::beta_of(nu);
  double gamma_ratio = (beta + 1.0) * beta * (beta - 1.0);  // Gamma(nu+5/2) / Gamma(nu-1/2)
  return M_PI / 2.0 * gamma_ratio * std::pow((1.0 - x) / (1.0 + x), 0.75) *
         detail::regularized_hypergeometric(nu, 2.5, x);
}

// ---- Bessel functions of order 1/2 and 3/2 ------------------------------------------------

enum class BesselKind { J, Y };

inline double bessel_half(BesselKind kind, double order, double x) {
  if (!(x > 0)) throw DomainError("bessel_half needs x > 0");
  const double k = std::sqrt(2.0 / (M_PI * x));
  const double s = std::sin(x), c = std::cos(x);
  if (order == 0.5) return kind == BesselKind::J ? k * s : -k * c;
  if (order == 1.5) return kind == BesselKind::J ? k * (s / x - c) : k * (-c / x - s);
  throw DomainError("bessel_half: order must be 1/2 or 3/2");
}

// ---- Mode solutions -----------------------------------------------------------------------

struct ModeState {
  double u = 0, du = 0;
};

struct ModeCoefficients {
  double plus = 0, minus = 0;
};

// Closed-form solution of u'' + 3(a'/a)u' + (q^2/a^2)u = 0 for the two named models.
inline ModeState mode_closed(const ScaleFactorModel& model, EigenLabel label, ModeCoefficients A, double t) {
  const double q2 = label.q2();
  if (model.kind == ModelKind::de_sitter) {
    const double H = model.H, Ht = H * t;
    const double x = std::tanh(Ht), s = 1.0 / std::cosh(Ht);
    const double theta = 2.0 * std::atan(std::exp(-Ht));
    const double kp = std::sqrt(2.0 / M_PI), kq = std::sqrt(M_PI / 2.0);
    if (label.is_zero()) {
      double u = -kp * A.plus + A.minus * (theta - s * x) / std::sqrt(2.0 * M_PI);
      double du = -H * kp * s * s * s * A.minus;
      return {u, du};
    }
    const double b = label.beta, cb = std::cos(b * theta), sb = std::sin(b * theta);
    double u = A.plus * kp * (-x * cb - b * s * sb) + A.minus * kq * (x * sb - b * s * cb);
    double du = H * q2 * s * s * (kp * cb * A.plus - kq * sb * A.minus);
    return {u, du};
  }
  if (model.kind == ModelKind::inflating) {
    if (label.is_zero()) {
      double e = std::exp(-3.0 * t);
      return {A.minus * e + A.plus, -3.0 * A.minus * e};
    }
    const double q = label.q(), z = q * std::exp(-t);
    double u = std::exp(-1.5 * t) *
               (A.minus * bessel_half(BesselKind::J, 1.5, z) + A.plus * bessel_half(BesselKind::Y, 1.5, z));
    double du = -std::exp(-2.5 * t) * q *
                (A.minus * bessel_half(BesselKind::J, 0.5, z) + A.plus * bessel_half(BesselKind::Y, 0.5, z));
    return {u, du};
  }
  throw UsageError("closed-form modes exist for the de Sitter and inflating models only");
}

// Coefficients from mode data at time t0. At t0 = 0 the explicit formulas are used; otherwise
// the 2x2 system built from the two closed-form solutions is solved.
inline ModeCoefficients coeffs_from_data(const ScaleFactorModel& model, EigenLabel label, double u0, double du0,
                                         double t0 = 0.0) {
  if (t0 == 0.0) {
    const double rp = std::sqrt(M_PI / 2.0);
    if (model.kind == ModelKind::de_sitter) {
      const double H = model.H;
      if (label.is_zero()) return {-rp * (u0 + M_PI / 4.0 * du0 / H), -rp * du0 / H};
      const double b = label.beta, sg = label.sign();
      return {-rp * sg / b * u0, -std::sqrt(2.0 / M_PI) * sg / label.q2() * du0 / H};
    }
    if (model.kind == ModelKind::inflating) {
      // u0 = A- + A+, u0' = -3 A-.
      if (label.is_zero()) return {u0 + du0 / 3.0, -du0 / 3.0};
      const double q = label.q(), sq = std::sqrt(q), s = std::sin(q), c = std::cos(q);
      return {-rp * (sq * s * u0 + (s - q * c) / (q * sq) * du0),
              -rp * (sq * c * u0 + (c + q * s) / (q * sq) * du0)};
    }
  }
  ModeState p = mode_closed(model, label, {1.0, 0.0}, t0);
  ModeState m = mode_closed(model, label, {0.0, 1.0}, t0);
  double det = p.u * m.du - m.u * p.du;
  if (det == 0.0) throw NumericalError("degenerate Wronskian");
  return {(u0 * m.du - m.u * du0) / det, (p.u * du0 - u0 * p.du) / det};
}

// The q = 0 inflating formulas exactly as printed in the source material; they do not reproduce
// u0'(0) (see the tests), so coeffs_from_data does not use them.
inline ModeCoefficients printed_inflating_zero_mode_coeffs(double u0, double du0) {
  return {0.25 * (3.0 * u0 + du0), 0.25 * (u0 - du0)};
}

struct ModeSample {
  double t, u, du;
};

// Classical RK4 for u'' + 3(a'/a)u' + (q^2/a^2)u = 0; keeps every sample_every-th step.
inline std::vector<ModeSample> mode_ode_rk4(const ScaleFactorModel& model, EigenLabel label, double u0, double du0,
                                            double t0, double t1, double dt, int sample_every = 1) {
  if (!(dt > 0)) throw UsageError("rk4 needs dt > 0");
  const double q2 = label.q2();
  auto rhs = [&](double t, double u, double v) {
    return std::array<double, 2>{v, -3.0 * model.hubble(t) * v - q2 * model.inv_a2(t) * u};
  };
  long n = std::lround(std::ceil((t1 - t0) / dt - 1e-9));
  double h = (t1 - t0) / static_cast<double>(std::max(n, 1L));
  std::vector<ModeSample> out{{t0, u0, du0}};
  double u = u0, v = du0;
  for (long k = 0; k < n; ++k) {
    double t = t0 + static_cast<double>(k) * h;
    auto k1 = rhs(t, u, v);
    auto k2 = rhs(t + h / 2, u + h / 2 * k1[0], v + h / 2 * k1[1]);
    auto k3 = rhs(t + h / 2, u + h / 2 * k2[0], v + h / 2 * k2[1]);
    auto k4 = rhs(t + h, u + h * k3[0], v + h * k3[1]);
    u += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
    v += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
    if ((k + 1) % sample_every == 0 || k + 1 == n) out.push_back({t0 + static_cast<double>(k + 1) * h, u, v});
  }
  return out;
}

// ---- Asymptotic profiles ------------------------------------------------------------------

// Limit of u_q(t) as t -> infinity.
inline double asymptotic_profile(const ScaleFactorModel& model, EigenLabel label, ModeCoefficients A) {
  const double kp = std::sqrt(2.0 / M_PI);
  if (model.kind == ModelKind::de_sitter) return -kp * A.plus;
  if (model.kind == ModelKind::inflating)
    return label.is_zero() ? A.plus : -kp * std::pow(label.q(), -1.5) * A.plus;
  throw UsageError("asymptotic profiles exist for the de Sitter and inflating models only");
}

// Leading term of u_q(t) - u_q(infinity).
inline double first_correction(const ScaleFactorModel& model, EigenLabel label, ModeCoefficients A, double t) {
  const double kp = std::sqrt(2.0 / M_PI);
  if (model.kind == ModelKind::de_sitter) {
    const double Ht = model.H * t;
    const double one_minus_tanh = 2.0 / (1.0 + std::exp(2.0 * Ht));
    if (label.is_zero()) return A.minus * std::pow(one_minus_tanh, 1.5) / std::tgamma(2.5);
    return -kp * label.q2() * A.plus * one_minus_tanh;
  }
  if (model.kind == ModelKind::inflating) {
    if (label.is_zero()) return A.minus * std::exp(-3.0 * t);
    return -std::exp(-2.0 * t) * 0.5 * kp * std::sqrt(label.q()) * A.plus;
  }
  throw UsageError("asymptotic profiles exist for the de Sitter and inflating models only");
}

struct ModeSplit {
  ModeState plus, minus;  // data at t = 0 of the two branches
};

// Psi = Psi+ + Psi-, where Psi+ carries the A+ part (tends to the profile) and Psi- the A- part.
inline ModeSplit split_plus_minus(const ScaleFactorModel& model, EigenLabel label, double u0, double du0) {
  ModeCoefficients A = coeffs_from_data(model, label, u0, du0);
  ModeSplit s;
  if (model.kind == ModelKind::de_sitter) {
    // Psi+(0) = Psi(0) + (pi/4) <d_t Psi(0), Psi_0> Psi_0,  d_t Psi+(0) = 0.
    double shift = label.is_zero() ? M_PI / (4.0 * model.H) * du0 : 0.0;
    s.plus = {u0 + shift, 0.0};
    s.minus = {-shift, du0};
    return s;
  }
  s.plus = mode_closed(model, label, {A.plus, 0.0}, 0.0);
  s.minus = mode_closed(model, label, {0.0, A.minus}, 0.0);
  return s;
}

struct ModeDatum {
  EigenLabel label;
  double u0 = 0, du0 = 0;
};

// Both sides of the de Sitter identities
//   ||Psi_inf||^2 = ||Psi+(0)||^2_{H^-1},   ||grad Psi_inf||^2_{H^m} = ||grad Psi(0)||^2_{H^{m-1}}.
struct DeSitterIdentities {
  double profile_l2 = 0, plus_hminus1 = 0;
  double profile_grad = 0, data_grad = 0;
};

inline DeSitterIdentities desitter_norm_identities(const std::vector<ModeDatum>& data, int m = 0) {
  auto model = ScaleFactorModel::de_sitter(1.0);
  DeSitterIdentities r;
  for (const auto& d : data) {
    double q2 = d.label.q2();
    double inf = asymptotic_profile(model, d.label, coeffs_from_data(model, d.label, d.u0, d.du0));
    double plus = split_plus_minus(model, d.label, d.u0, d.du0).plus.u;
    r.profile_l2 += inf * inf;
    r.plus_hminus1 += plus * plus / (q2 + 1.0);
    r.profile_grad += std::pow(q2 + 1.0, m) * q2 * inf * inf;
    r.data_grad += std::pow(q2 + 1.0, m - 1) * q2 * d.u0 * d.u0;
  }
  return r;
}

// Per-mode energy density of the inflating Psi+ at t = 0, in units of (2/pi)|A+|^2.
inline double inflating_energy_factor(double q) { return q + std::sin(2.0 * q) + std::cos(q) * std::cos(q) / q; }
inline double printed_energy_factor(double q) { return q - std::sin(2.0 * q) + std::cos(q) / q; }

struct ProfileNormCheck {
  // Values at t = 0 of the generalized energies of Psi+, from the mode data.
  double e_minus1 = 0, e_0 = 0;
  // The same energies from the printed series.
  double e_minus1_printed = 0, e_0_printed = 0;
  double grad_profile = 0, lap_profile = 0;           // ||grad Psi_inf||^2, ||Delta Psi_inf||^2
  double grad_profile_series = 0;                     // (2/pi) sum q^{-1} |A+|^2
  double l2_profile = 0, l2_plus0 = 0;                // ||Psi_inf||^2, ||Psi+(0)||^2 (reported only)
  double ratio_minus1 = 0, ratio_0 = 0;               // E / profile norm, realized
  double c_minus1 = 0, c_0 = 0;                       // bracket constants over the label range
  bool inside = true;
};

// Bracket constant c = max(max r, 1/min r) of a per-mode ratio r over admissible q != 0 up to beta_max.
template <class Ratio>
double bracket_constant(Ratio&& r, int beta_max = 201) {
  double lo = 1e300, hi = 0;
  for (auto l : eigen_betas(beta_max)) {
    if (l.is_zero()) continue;
    double v = r(l.q());
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return std::max(hi, 1.0 / lo);
}

// Evaluates the sandwich inequalities between ||grad Psi_inf||^2, ||Delta Psi_inf||^2 and the
// energies E_{-1}(Psi+,0), E_0(Psi+,0) for inflating data.
inline ProfileNormCheck profile_norm_check(const std::vector<ModeDatum>& data) {
  auto model = ScaleFactorModel::inflating();
  ProfileNormCheck r;
  const double k = 2.0 / M_PI;
  for (const auto& d : data) {
    ModeCoefficients A = coeffs_from_data(model, d.label, d.u0, d.du0);
    if (d.label.is_zero()) {
      r.l2_profile += A.plus * A.plus;
      r.l2_plus0 += A.plus * A.plus;
      continue;
    }
    double q = d.label.q(), q2 = d.label.q2();
    ModeState plus = mode_closed(model, d.label, {A.plus, 0.0}, 0.0);
    double dens = q2 * plus.u * plus.u + plus.du * plus.du;
    r.e_minus1 += dens / (q2 + 1.0);
    r.e_0 += dens;
    double a2 = A.plus * A.plus;
    r.e_minus1_printed += k * printed_energy_factor(q) * a2 / (q2 + 1.0);
    r.e_0_printed += k * printed_energy_factor(q) * a2;
    double inf = asymptotic_profile(model, d.label, A);
    r.l2_profile += inf * inf;
    r.l2_plus0 += plus.u * plus.u;
    r.grad_profile += q2 * inf * inf;
    r.lap_profile += q2 * q2 * inf * inf;
    r.grad_profile_series += k * a2 / q;
  }
  r.c_minus1 = bracket_constant([](double q) { return q * inflating_energy_factor(q) / (q * q + 1.0); });
  r.c_0 = bracket_constant([](double q) { return inflating_energy_factor(q) / q; });
  if (r.grad_profile > 0) {
    r.ratio_minus1 = r.e_minus1 / r.grad_profile;
    r.ratio_0 = r.e_0 / r.lap_profile;
    r.inside = r.ratio_minus1 >= 1.0 / r.c_minus1 && r.ratio_minus1 <= r.c_minus1 &&
               r.ratio_0 >= 1.0 / r.c_0 && r.ratio_0 <= r.c_0;
  }
  return r;
}

}  // namespace dodecawave
