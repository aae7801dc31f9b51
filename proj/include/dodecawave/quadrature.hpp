#pragma once

#include <array>
#include <vector>

namespace dodecawave {

struct QuadraturePoint {
  std::array<double, 4> bary;  // barycentric coordinates, sum 1
  double weight;               // for the reference tet of volume 1/6
};

struct QuadratureRule {
  std::vector<QuadraturePoint> points;
  int degree = 0;
};

namespace detail {

inline void add_orbit_s31(QuadratureRule& r, double a, double w) {
  const double b = 1.0 - 3.0 * a;
  for (int k = 0; k < 4; ++k) {
    std::array<double, 4> p{a, a, a, a};
    p[k] = b;
    r.points.push_back({p, w});
  }
}

inline void add_orbit_s22(QuadratureRule& r, double a, double w) {
  const double b = 0.5 - a;
  static constexpr int pairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  for (const auto& pr : pairs) {
    std::array<double, 4> p{b, b, b, b};
    p[pr[0]] = a;
    p[pr[1]] = a;
    r.points.push_back({p, w});
  }
}

// Two coordinates equal to a, the remaining two are b and c in both orders.
inline void add_orbit_s211(QuadratureRule& r, double a, double b, double c, double w) {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (j == i) continue;
      std::array<double, 4> p{a, a, a, a};
      p[i] = b;
      p[j] = c;
      r.points.push_back({p, w});
    }
}

}  // namespace detail

// Keast's 31-point rule, exact for polynomials of total degree 7 (one negative weight).
inline const QuadratureRule& quadrature_31() {
  static const QuadratureRule rule = [] {
    QuadratureRule r;
    r.degree = 7;
    r.points.push_back({{0.25, 0.25, 0.25, 0.25}, 0.01826422346610882029120157});
    detail::add_orbit_s31(r, 0.07821319233031806437399425, 0.01059994152441368691641387);
    detail::add_orbit_s31(r, 0.1218432166639051746521564, -0.06251774011433185169147035);
    detail::add_orbit_s31(r, 0.3325391644464206241529238, 0.004891425263073499384795763);
    detail::add_orbit_s22(r, 0.0, 11.0 / 11340.0);
    detail::add_orbit_s211(r, 0.1, 0.2, 0.6, 125.0 / 4536.0);
    return r;
  }();
  return rule;
}

}  // namespace dodecawave
