#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "domain.hpp"
#include "mesh.hpp"
#include "p2.hpp"
#include "sparse.hpp"

namespace dodecawave {

struct TetLocation {
  std::size_t tet = 0;
  std::array<double, 4> bary{};
};

// Uniform bucket grid over the tets of a mesh.
class PointLocator {
 public:
  explicit PointLocator(const TetMeshP2& mesh) : mesh_(mesh) {
    geom_.reserve(mesh.tets.size());
    for (std::size_t t = 0; t < mesh.tets.size(); ++t) geom_.push_back(TetGeometry::of(mesh, t));
    double h = mesh.max_edge_length();
    cells_ = std::max(1, static_cast<int>(std::ceil(2.0 * kExtent / (0.5 * h))));
    cell_ = 2.0 * kExtent / cells_;
    // Margin covers the sliver between the chordal boundary and the curved faces.
    const double margin = 0.25 * h;
    buckets_.assign(static_cast<std::size_t>(cells_) * cells_ * cells_, {});
    for (std::size_t t = 0; t < geom_.size(); ++t) {
      Vec3 lo{1e9, 1e9, 1e9}, hi{-1e9, -1e9, -1e9};
      for (const auto& p : geom_[t].P)
        for (int k = 0; k < 3; ++k) {
          lo[k] = std::min(lo[k], p[k] - margin);
          hi[k] = std::max(hi[k], p[k] + margin);
        }
      std::array<int, 3> a = cell_of(lo), b = cell_of(hi);
      for (int i = a[0]; i <= b[0]; ++i)
        for (int j = a[1]; j <= b[1]; ++j)
          for (int k = a[2]; k <= b[2]; ++k) buckets_[index(i, j, k)].push_back(static_cast<int>(t));
    }
  }

  // Containing tet. Points of F_v in the thin gap outside the straight-sided mesh fall back to
  // the nearby tet with the largest minimal barycentric coordinate (P2 extrapolation).
  TetLocation locate(const Vec3& X, double tol = 1e-10) const {
    if (X.dot(X) > 1.0) throw LocationError("point outside the unit ball");
    auto c = cell_of(X);
    const auto& bucket = buckets_[index(c[0], c[1], c[2])];
    TetLocation best;
    double best_min = -1e300;
    for (int t : bucket) {
      auto l = geom_[t].barycentric(X);
      double mn = *std::min_element(l.begin(), l.end());
      if (mn >= -tol) return {static_cast<std::size_t>(t), l};
      if (mn > best_min) {
        best_min = mn;
        best = {static_cast<std::size_t>(t), l};
      }
    }
    if (fundamental_domain().contains(lift(X), 1e-9).where == Location::outside)
      throw LocationError("point outside F_v");
    if (best_min < -0.25) throw LocationError("no tet near a point of F_v");
    return best;
  }

  double eval(const Vector& U, const Vec3& X) const {
    TetLocation loc = locate(X);
    auto phi = shape_values(loc.bary);
    auto cls = mesh_.tet_classes(loc.tet);
    double v = 0;
    for (int k = 0; k < 10; ++k) v += U[cls[k]] * phi[k];
    return v;
  }

  const TetGeometry& geometry(std::size_t t) const { return geom_[t]; }

 private:
  static constexpr double kExtent = 0.4;  // > R_max
  std::array<int, 3> cell_of(const Vec3& p) const {
    std::array<int, 3> c;
    for (int k = 0; k < 3; ++k)
      c[k] = std::clamp(static_cast<int>(std::floor((p[k] + kExtent) / cell_)), 0, cells_ - 1);
    return c;
  }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * cells_ + j) * cells_ + k;
  }

  const TetMeshP2& mesh_;
  std::vector<TetGeometry> geom_;
  int cells_ = 1;
  double cell_ = 1;
  std::vector<std::vector<int>> buckets_;
};

inline double locate_and_eval(const TetMeshP2& mesh, const Vector& U, const Vec3& X) {
  return PointLocator(mesh).eval(U, X);
}

}  // namespace dodecawave
