#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "assembly.hpp"
#include "domain.hpp"
#include "errors.hpp"
#include "mesh.hpp"
#include "sparse.hpp"

namespace dodecawave {

enum class ModelKind { de_sitter, inflating, custom };

struct ScaleFactorModel {
  ModelKind kind = ModelKind::inflating;
  double H = 1.0;
  std::function<double(double)> a_fn, a_prime_fn;  // custom model only

  static ScaleFactorModel de_sitter(double H = 1.0) {
    if (!(H > 0)) throw DomainError("de Sitter model needs H > 0");
    return {ModelKind::de_sitter, H, {}, {}};
  }
  static ScaleFactorModel inflating() { return {ModelKind::inflating, 1.0, {}, {}}; }
  static ScaleFactorModel custom(std::function<double(double)> a, std::function<double(double)> a_prime) {
    return {ModelKind::custom, 1.0, std::move(a), std::move(a_prime)};
  }

  std::string name() const {
    switch (kind) {
      case ModelKind::de_sitter: return "desitter";
      case ModelKind::inflating: return "inflating";
      default: return "custom";
    }
  }

  double a(double t) const {
    double v = 0;
    switch (kind) {
      case ModelKind::de_sitter: v = std::cosh(H * t) / H; break;
      case ModelKind::inflating: v = std::exp(t); break;
      default: v = a_fn(t);
    }
    if (!(v > 0)) throw DomainError("scale factor must be positive");
    return v;
  }

  // a'(t) / a(t)
  double hubble(double t) const {
    switch (kind) {
      case ModelKind::de_sitter: return H * std::tanh(H * t);
      case ModelKind::inflating: return 1.0;
      default: return a_prime_fn(t) / a(t);
    }
  }

  double inv_a2(double t) const {
    switch (kind) {
      case ModelKind::de_sitter: {
        double c = std::cosh(H * t);
        return H * H / (c * c);
      }
      case ModelKind::inflating: return std::exp(-2.0 * t);
      default: {
        double v = a(t);
        return 1.0 / (v * v);
      }
    }
  }

  // Growth factor A(t) with Delta Psi - A(t) d_t Psi -> 0.
  double asymptotic_weight(double t) const {
    switch (kind) {
      case ModelKind::de_sitter:
        // (1 - tanh Ht)^{-1} = (1 + e^{2Ht}) / 2
        return (1.0 + std::exp(2.0 * H * t)) / (4.0 * H);
      case ModelKind::inflating: return std::exp(2.0 * t);
      default: throw UsageError("Norm diagnostic is defined for the de Sitter and inflating models only");
    }
  }
};

struct ScaleFactorValue {
  double a, hubble;
};

inline ScaleFactorValue scale_factor(const ScaleFactorModel& m, double t) { return {m.a(t), m.hubble(t)}; }

struct Bump {
  Vec3 center;
  double radius = 0.1;
  double amplitude = 100.0;
};

struct InitSpec {
  std::vector<Bump> position;  // u0
  std::vector<Bump> velocity;  // u1
};

// Distance on the quotient: smallest great-circle distance between the orbits of x and y.
inline double quotient_distance(const Quaternion& x, const Quaternion& y) {
  double best = -2;
  const GroupElement* arg = nullptr;
  for (const auto& g : enumerate_group()) {
    double d = x.dot(g.q * y);
    if (d > best) {
      best = d;
      arg = &g;
    }
  }
  return geodesic_distance(x, arg->q * y);
}

inline double bump_value(const Bump& b, double d) {
  if (d >= b.radius) return 0.0;
  double d2 = d * d, r2 = b.radius * b.radius;
  return b.amplitude * std::exp(d2 / (d2 - r2));
}

inline Vector init_bump(const TetMeshP2& mesh, const std::vector<Bump>& bumps) {
  for (const auto& b : bumps)
    if (!(b.radius > 0 && b.radius < d_max())) throw UsageError("bump radius must lie in (0, d_max)");
  std::vector<Quaternion> centers;
  for (const auto& b : bumps) centers.push_back(lift(b.center));
  return interpolate(mesh, [&](const Vec3& X) {
    Quaternion x = lift(X);
    double v = 0;
    for (std::size_t k = 0; k < bumps.size(); ++k) v += bump_value(bumps[k], quotient_distance(x, centers[k]));
    return v;
  });
}

// Random superposition of bumps: A0 uniform in [-100,100], R0 in (0,0.1], centers uniform in the
// ball |X| <= 0.25 and rejected to F_v.
inline std::vector<Bump> random_bumps(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(-100.0, 100.0), rad(0.0, 0.1), box(-0.25, 0.25);
  std::vector<Bump> out;
  while (static_cast<int>(out.size()) < count) {
    Vec3 c{box(rng), box(rng), box(rng)};
    double A = amp(rng), R = 0.1 - rad(rng);
    if (c.norm() > 0.25) continue;
    if (fundamental_domain().contains(lift(c)).where == Location::outside) continue;
    out.push_back({c, R, A});
  }
  return out;
}

struct SolverOptions {
  double cg_tol = 1e-12;
  int cg_max_iter = 2000;
};

// Explicit two-level scheme
//   M(U+ - 2U + U-) + 3h dt M (U+ - U-)/2 + dt^2 s (K+D) U = 0,  h = a'/a, s = 1/a^2 at t_n.
// Each step solves M z = (K+D) U^n by CG started from the linear extrapolation of the last two z.
class Evolution {
 public:
  Evolution(const TetMeshP2& mesh, const SystemMatrices& mats, ScaleFactorModel model, double t_star, double dt,
            SolverOptions opt = {})
      : mesh_(mesh), mats_(mats), model_(std::move(model)), t_star_(t_star), dt_(dt), opt_(opt) {
    if (!(dt > 0)) throw UsageError("dt must be positive");
    inv_diag_ = mats.M.diagonal();
    for (auto& v : inv_diag_) v = 1.0 / v;
  }

  // U^0 = u0, U^1 = u0 + dt u1, plus (dt^2/2) u'' from the equation when second_order is set.
  void start(const Vector& u0, const Vector& u1, bool second_order = false) {
    const std::size_t n = mats_.size();
    if (u0.size() != n || u1.size() != n) throw UsageError("initial data size does not match the mesh");
    prev_ = u0;
    curr_ = u0;
    for (std::size_t i = 0; i < n; ++i) curr_[i] += dt_ * u1[i];
    z_.assign(n, 0.0);
    z_old_.clear();
    solves_ = 0;
    if (second_order) {
      solve_mass(u0);
      double h = model_.hubble(t_star_), s = model_.inv_a2(t_star_);
      for (std::size_t i = 0; i < n; ++i) curr_[i] += 0.5 * dt_ * dt_ * (-3.0 * h * u1[i] - s * z_[i]);
    }
    n_ = 1;
  }

  void step() {
    const double t = time();
    const double h = model_.hubble(t), s = model_.inv_a2(t);
    solve_mass(curr_);
    const double c = 1.5 * h * dt_;
    const double inv = 1.0 / (1.0 + c);
    const std::size_t n = curr_.size();
    for (std::size_t i = 0; i < n; ++i) {
      double next = (2.0 * curr_[i] + (c - 1.0) * prev_[i] - dt_ * dt_ * s * z_[i]) * inv;
      prev_[i] = curr_[i];
      curr_[i] = next;
    }
    ++n_;
  }

  double time() const { return t_star_ + static_cast<double>(n_) * dt_; }
  long steps() const { return n_; }
  double dt() const { return dt_; }
  double t_star() const { return t_star_; }
  const Vector& current() const { return curr_; }
  const Vector& previous() const { return prev_; }
  const ScaleFactorModel& model() const { return model_; }
  int last_cg_iterations() const { return last_iterations_; }

  Vector velocity() const {
    Vector v(curr_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = (curr_[i] - prev_[i]) / dt_;
    return v;
  }

  // E_d(t_n) = <M V, V> + a(t_n)^{-2} <(K+D) U^{n-1}, U^n>,  V = (U^n - U^{n-1}) / dt.
  double energy() const {
    Vector v = velocity();
    return dot(mats_.M * v, v) + model_.inv_a2(time()) * dot(mats_.S * prev_, curr_);
  }

  // Weighted L2 distance between Delta_{F_v} u_h and A(t) d_t u_h, both taken at tet centroids.
  double norm_diagnostic() const {
    const double A = model_.asymptotic_weight(time());
    Vector v = velocity();
    double sum = 0;
    for (std::size_t t = 0; t < mesh_.tets.size(); ++t) {
      auto cls = mesh_.tet_classes(t);
      // P2 basis at the centroid: -1/8 on vertices, 1/4 on edges.
      double vt = 0;
      for (int k = 0; k < 4; ++k) vt -= 0.125 * v[cls[k]];
      for (int k = 4; k < 10; ++k) vt += 0.25 * v[cls[k]];
      double r = eval_delav(mesh_, curr_, t) - A * vt;
      sum += mats_.tet_weight[t] * r * r;
    }
    return std::sqrt(sum);
  }

 private:
  void solve_mass(const Vector& u) {
    Vector b = mats_.S * u;
    if (solves_ >= 2) {
      for (std::size_t i = 0; i < z_.size(); ++i) {
        double z = z_[i];
        z_[i] = 2.0 * z - z_old_[i];
        z_old_[i] = z;
      }
    } else {
      z_old_ = z_;
    }
    ++solves_;
    last_iterations_ = conjugate_gradient(mats_.M, inv_diag_, b, z_, opt_.cg_tol, opt_.cg_max_iter).iterations;
  }

  const TetMeshP2& mesh_;
  const SystemMatrices& mats_;
  ScaleFactorModel model_;
  double t_star_, dt_;
  SolverOptions opt_;
  Vector inv_diag_, prev_, curr_, z_, z_old_;
  long n_ = 0;
  long solves_ = 0;
  int last_iterations_ = 0;
};

// Largest eigenvalue of M^{-1}(K+D) by power iteration.
inline double max_generalized_eigenvalue(const SystemMatrices& mats, int iterations = 60) {
  const std::size_t n = mats.size();
  Vector inv = mats.M.diagonal();
  for (auto& v : inv) v = 1.0 / v;
  Vector x(n), z(n, 0.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto& v : x) v = u(rng);
  double lambda = 0;
  for (int it = 0; it < iterations; ++it) {
    Vector b = mats.S * x;
    conjugate_gradient(mats.M, inv, b, z, 1e-10);
    double num = dot(z, mats.M * z), den = dot(x, mats.M * x);
    lambda = std::sqrt(num / den);
    double nz = std::sqrt(num);
    for (std::size_t i = 0; i < n; ++i) x[i] = z[i] / nz;
  }
  return lambda;
}

// Leapfrog stability needs dt^2 lambda_max / a^2 < 4; returns the bound at time t.
inline double stable_dt(const SystemMatrices& mats, const ScaleFactorModel& model, double t) {
  return 2.0 * model.a(t) / std::sqrt(max_generalized_eigenvalue(mats));
}

}  // namespace dodecawave
