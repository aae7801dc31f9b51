#pragma once

#include <array>
#include <cmath>

#include "errors.hpp"

namespace dodecawave {

// Point of R^4 with the Hamilton product; (w,x,y,z) are the (x0,x1,x2,x3) coordinates.
struct Quaternion {
  double w = 0, x = 0, y = 0, z = 0;

  constexpr Quaternion() = default;
  constexpr Quaternion(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

  constexpr Quaternion conj() const { return {w, -x, -y, -z}; }
  constexpr double dot(const Quaternion& o) const { return w * o.w + x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  Quaternion normalized() const {
    double n = norm();
    return {w / n, x / n, y / n, z / n};
  }
  constexpr std::array<double, 4> array() const { return {w, x, y, z}; }

  constexpr Quaternion operator+(const Quaternion& o) const { return {w + o.w, x + o.x, y + o.y, z + o.z}; }
  constexpr Quaternion operator-(const Quaternion& o) const { return {w - o.w, x - o.x, y - o.y, z - o.z}; }
  constexpr Quaternion operator*(double s) const { return {w * s, x * s, y * s, z * s}; }
  constexpr Quaternion operator-() const { return {-w, -x, -y, -z}; }
};

constexpr Quaternion quat_mul(const Quaternion& a, const Quaternion& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

constexpr Quaternion operator*(const Quaternion& a, const Quaternion& b) { return quat_mul(a, b); }

inline double max_abs_diff(const Quaternion& a, const Quaternion& b) {
  return std::fmax(std::fmax(std::fabs(a.w - b.w), std::fabs(a.x - b.x)),
                   std::fmax(std::fabs(a.y - b.y), std::fabs(a.z - b.z)));
}

inline void require_unit(const Quaternion& q, const char* who, double tol = 1e-12) {
  if (!(std::fabs(q.dot(q) - 1.0) <= tol)) throw DomainError(std::string(who) + ": expected a unit quaternion");
}

// Great-circle distance on S^3.
inline double geodesic_distance(const Quaternion& a, const Quaternion& b) {
  require_unit(a, "geodesic_distance");
  require_unit(b, "geodesic_distance");
  // atan2 form stays accurate near 0 and pi where acos loses digits.
  double c = a.dot(b);
  double s = (a - b * c).norm();
  return std::atan2(s, c);
}

}  // namespace dodecawave
