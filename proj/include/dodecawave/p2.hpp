#pragma once

#include <array>
#include <cmath>

#include "domain.hpp"
#include "mesh.hpp"

namespace dodecawave {

// Affine map of one straight tetrahedron and the gradients of its barycentric coordinates.
struct TetGeometry {
  std::array<Vec3, 4> P;
  std::array<Vec3, 4> grad_lambda;
  double det = 0;  // 6 * signed volume

  TetGeometry() = default;
  TetGeometry(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3) : P{p0, p1, p2, p3} {
    Vec3 e1 = p1 - p0, e2 = p2 - p0, e3 = p3 - p0;
    det = cross(e1, e2).dot(e3);
    // Rows of the inverse Jacobian.
    grad_lambda[1] = cross(e2, e3) * (1.0 / det);
    grad_lambda[2] = cross(e3, e1) * (1.0 / det);
    grad_lambda[3] = cross(e1, e2) * (1.0 / det);
    grad_lambda[0] = (grad_lambda[1] + grad_lambda[2] + grad_lambda[3]) * -1.0;
  }

  static TetGeometry of(const TetMeshP2& m, std::size_t t) {
    const auto& v = m.tets[t];
    return TetGeometry(m.vertices[v[0]], m.vertices[v[1]], m.vertices[v[2]], m.vertices[v[3]]);
  }

  double volume() const { return std::fabs(det) / 6.0; }

  Vec3 point(const std::array<double, 4>& l) const {
    return P[0] * l[0] + P[1] * l[1] + P[2] * l[2] + P[3] * l[3];
  }

  std::array<double, 4> barycentric(const Vec3& X) const {
    Vec3 d = X - P[0];
    std::array<double, 4> l{0, grad_lambda[1].dot(d), grad_lambda[2].dot(d), grad_lambda[3].dot(d)};
    l[0] = 1.0 - l[1] - l[2] - l[3];
    return l;
  }

  Vec3 centroid() const { return (P[0] + P[1] + P[2] + P[3]) * 0.25; }
};

struct ShapeValues {
  std::array<double, 10> phi;
  std::array<Vec3, 10> grad;
};

inline std::array<double, 10> shape_values(const std::array<double, 4>& l) {
  std::array<double, 10> phi{};
  for (int k = 0; k < 4; ++k) phi[k] = l[k] * (2.0 * l[k] - 1.0);
  for (int e = 0; e < 6; ++e) phi[4 + e] = 4.0 * l[kTetEdges[e][0]] * l[kTetEdges[e][1]];
  return phi;
}

inline ShapeValues shape_eval(const TetGeometry& g, const std::array<double, 4>& l) {
  ShapeValues s;
  s.phi = shape_values(l);
  for (int k = 0; k < 4; ++k) s.grad[k] = g.grad_lambda[k] * (4.0 * l[k] - 1.0);
  for (int e = 0; e < 6; ++e) {
    int a = kTetEdges[e][0], b = kTetEdges[e][1];
    s.grad[4 + e] = (g.grad_lambda[a] * l[b] + g.grad_lambda[b] * l[a]) * 4.0;
  }
  return s;
}

using Mat3 = std::array<std::array<double, 3>, 3>;

// Constant Hessian of the quadratic with the given nodal coefficients.
inline Mat3 p2_hessian(const TetGeometry& g, const std::array<double, 10>& c) {
  Mat3 H{};
  auto add = [&](const Vec3& a, const Vec3& b, double s) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) H[i][j] += s * (a[i] * b[j] + b[i] * a[j]);
  };
  for (int k = 0; k < 4; ++k) add(g.grad_lambda[k], g.grad_lambda[k], 2.0 * c[k]);
  for (int e = 0; e < 6; ++e) add(g.grad_lambda[kTetEdges[e][0]], g.grad_lambda[kTetEdges[e][1]], 4.0 * c[4 + e]);
  return H;
}

// (1-|X|^2)^{-1/2}, the density of the round metric in the projected chart.
inline double chart_weight(const Vec3& X) {
  double r2 = X.dot(X);
  if (!(r2 < 1.0)) throw DomainError("chart weight is singular for |X| >= 1");
  return 1.0 / std::sqrt(1.0 - r2);
}

}  // namespace dodecawave
