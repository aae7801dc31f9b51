#pragma once

#include <algorithm>
#include <array>
#include <vector>

#include "mesh.hpp"
#include "p2.hpp"
#include "quadrature.hpp"
#include "sparse.hpp"

namespace dodecawave {

// Weighted mass M, stiffness K and radial correction D over node classes.
// K + D is the Galerkin form of -Laplacian in the projected chart of S^3.
struct SystemMatrices {
  CsrMatrix M, K, D;
  CsrMatrix S;              // K + D
  Vector tet_weight;        // integral of (1-|X|^2)^{-1/2} over each tet

  std::size_t size() const { return M.n; }
};

using LocalMatrix = std::array<std::array<double, 10>, 10>;

struct LocalMatrices {
  LocalMatrix M{}, K{}, D{};
  double weight = 0;
};

inline LocalMatrices local_matrices(const TetGeometry& g) {
  LocalMatrices L;
  const double jac = std::fabs(g.det);
  for (const auto& qp : quadrature_31().points) {
    Vec3 X = g.point(qp.bary);
    double rho = chart_weight(X);
    double w = qp.weight * jac * rho;
    L.weight += w;
    ShapeValues s = shape_eval(g, qp.bary);
    std::array<double, 10> radial;
    for (int a = 0; a < 10; ++a) radial[a] = X.dot(s.grad[a]);
    for (int a = 0; a < 10; ++a)
      for (int b = 0; b < 10; ++b) {
        L.M[a][b] += w * s.phi[a] * s.phi[b];
        L.K[a][b] += w * s.grad[a].dot(s.grad[b]);
        L.D[a][b] -= w * radial[a] * radial[b];
      }
  }
  return L;
}

// Sparsity pattern coupling every pair of classes that meet in a tet.
inline CsrMatrix class_pattern(const TetMeshP2& m) {
  std::vector<std::vector<int>> rows(m.n_classes());
  for (std::size_t t = 0; t < m.tets.size(); ++t) {
    auto c = m.tet_classes(t);
    for (int a : c)
      for (int b : c) rows[a].push_back(b);
  }
  CsrMatrix A;
  A.n = rows.size();
  A.row_ptr.assign(A.n + 1, 0);
  for (std::size_t i = 0; i < A.n; ++i) {
    auto& r = rows[i];
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    A.row_ptr[i + 1] = A.row_ptr[i] + r.size();
  }
  A.col.reserve(A.row_ptr.back());
  for (auto& r : rows) A.col.insert(A.col.end(), r.begin(), r.end());
  A.val.assign(A.col.size(), 0.0);
  return A;
}

inline SystemMatrices assemble(const TetMeshP2& m) {
  SystemMatrices S;
  S.M = class_pattern(m);
  S.K = S.M;
  S.D = S.M;
  S.tet_weight.resize(m.tets.size());
  for (std::size_t t = 0; t < m.tets.size(); ++t) {
    TetGeometry g = TetGeometry::of(m, t);
    LocalMatrices L;
    try {
      L = local_matrices(g);
    } catch (const DomainError&) {
      throw AssemblyError("quadrature point with |X| >= 1 in tet " + std::to_string(t));
    }
    S.tet_weight[t] = L.weight;
    auto c = m.tet_classes(t);
    for (int a = 0; a < 10; ++a)
      for (int b = 0; b < 10; ++b) {
        S.M.at(c[a], c[b]) += L.M[a][b];
        S.K.at(c[a], c[b]) += L.K[a][b];
        S.D.at(c[a], c[b]) += L.D[a][b];
      }
  }
  S.S = S.K.combine(1.0, S.D, 1.0);
  return S;
}

// Nodal interpolation of f onto the classes (value taken at the first node of each class).
template <class Fn>
Vector interpolate(const TetMeshP2& m, Fn&& f) {
  Vector U(m.n_classes());
  for (std::size_t c = 0; c < m.n_classes(); ++c) U[c] = f(m.node(m.class_nodes[c].front()));
  return U;
}

// Delta_{F_v} u_h on tet t at its centroid: second derivatives of the local quadratic are
// constant, first derivatives and the metric coefficients are taken at the centroid.
inline double eval_delav(const TetMeshP2& m, const Vector& U, std::size_t t) {
  TetGeometry g = TetGeometry::of(m, t);
  auto cls = m.tet_classes(t);
  std::array<double, 10> c;
  for (int k = 0; k < 10; ++k) c[k] = U[cls[k]];
  Mat3 H = p2_hessian(g, c);
  ShapeValues s = shape_eval(g, {0.25, 0.25, 0.25, 0.25});
  Vec3 grad{};
  for (int k = 0; k < 10; ++k) grad = grad + s.grad[k] * c[k];
  Vec3 G = g.centroid();
  double lap = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) lap += ((i == j ? 1.0 : 0.0) - G[i] * G[j]) * H[i][j];
  return lap - 3.0 * G.dot(grad);
}

}  // namespace dodecawave
