#pragma once

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

#include "domain.hpp"
#include "errors.hpp"
#include "evolution.hpp"

namespace dodecawave {

// Conformal time elapsed between t0 and t1: the integral of 1/a.
inline double conformal_interval(const ScaleFactorModel& model, double t0, double t1) {
  switch (model.kind) {
    case ModelKind::de_sitter:
      return 2.0 * std::atan(std::exp(model.H * t1)) - 2.0 * std::atan(std::exp(model.H * t0));
    case ModelKind::inflating: return std::exp(-t0) - std::exp(-t1);
    default: break;
  }
  if (t1 == t0) return 0.0;
  auto f = [&](double s) { return 1.0 / model.a(s); };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, t0, t1, 15, 1e-13);
}

// Conformal time from t0 to infinity; throws DomainError when it diverges.
inline double conformal_tail(const ScaleFactorModel& model, double t0) {
  switch (model.kind) {
    case ModelKind::de_sitter: return M_PI - 2.0 * std::atan(std::exp(model.H * t0));
    case ModelKind::inflating: return std::exp(-t0);
    default: break;
  }
  boost::math::quadrature::exp_sinh<double> integrator;
  double err = 0, l1 = 0, v = std::numeric_limits<double>::infinity();
  try {
    v = integrator.integrate([&](double s) { return 1.0 / model.a(s); }, t0, std::numeric_limits<double>::infinity(),
                             1e-10, &err, &l1);
  } catch (const std::exception&) {
  }
  if (!std::isfinite(v) || err > 1e-6 * (1.0 + std::fabs(v))) throw DomainError("no future horizon");
  return v;
}

struct ComovingRadius {
  double value;    // sin(angle)
  double angle;    // arcsin(R) + conformal interval
  bool wrapped;    // angle > pi/2: the sine no longer grows with the geodesic radius
};

inline ComovingRadius make_radius(double R, double interval) {
  if (!(R >= 0 && R <= 1)) throw DomainError("radius must lie in [0, 1]");
  double angle = std::asin(R) + interval;
  return {std::sin(angle), angle, angle > M_PI / 2};
}

// Radius at time t of the causal domain of data supported in the ball of radius R at t*.
inline ComovingRadius comoving_radius(const ScaleFactorModel& model, double t_star, double R, double t) {
  return make_radius(R, conformal_interval(model, t_star, t));
}

// Future horizon: the t -> infinity limit of comoving_radius.
inline ComovingRadius horizon_radius(const ScaleFactorModel& model, double t_star, double R) {
  return make_radius(R, conformal_tail(model, t_star));
}

struct CirclesCondition {
  double radius;    // R of the horizon sphere, sin of the conformal distance
  double distance;  // conformal distance between last scattering and observation
  bool multiple_images;
};

// Strict inequality: a sphere of conformal radius exactly d_max does not self-intersect.
inline CirclesCondition circles_from_distance(double distance) {
  return {std::sin(distance), distance, distance > d_max()};
}

inline CirclesCondition circles_condition(const ScaleFactorModel& model, double t_ls, double t_obs) {
  if (!(t_obs > t_ls)) throw UsageError("circles condition needs t_obs > t_ls");
  return circles_from_distance(conformal_interval(model, t_ls, t_obs));
}

}  // namespace dodecawave
