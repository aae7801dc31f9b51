#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <vector>

#include "errors.hpp"
#include "format.hpp"
#include "group.hpp"

namespace dodecawave {

struct Vec3 {
  double x = 0, y = 0, z = 0;
  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  constexpr double& operator[](int k) { return k == 0 ? x : (k == 1 ? y : z); }
  constexpr double operator[](int k) const { return k == 0 ? x : (k == 1 ? y : z); }
};

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

// Largest geodesic distance from the north pole to F, and its projected radius.
inline double d_max() { return std::acos(kSigma * kSigma / (2.0 * std::sqrt(2.0))); }
inline double r_max() { return std::sqrt(1.0 - std::pow(kSigma, 4) / 8.0); }

// Default tolerance on face-plane dot products.
inline constexpr double kBoundaryTol = 1e-10;

inline Quaternion lift(const Vec3& X) {
  double r2 = X.dot(X);
  if (!(r2 <= 1.0)) throw DomainError("lift: |X| > 1");
  return {std::sqrt(1.0 - r2), X.x, X.y, X.z};
}

inline Vec3 project(const Quaternion& q) {
  if (q.w < 0) throw DomainError("project: x0 < 0");
  return {q.x, q.y, q.z};
}

enum class Location { interior, face, edge, vertex, outside };

struct Containment {
  Location where = Location::outside;
  int n_faces = 0;
  std::array<int, 3> faces{-1, -1, -1};  // 1-based face numbers the point lies on
};

// The spherical dodecahedron F: 20 vertices, 12 pentagonal faces glued pairwise by g_i.
class FundamentalDomain {
 public:
  FundamentalDomain() {
    const double s = kSigma, a = 1.0 / s, b = 1.0 / (s * s), c = 1.0 / (2.0 * std::sqrt(2.0));
    const double v[20][3] = {{-a, a, -a}, {1, b, 0},  {-a, -a, a}, {a, -a, -a}, {0, -1, -b},
                             {a, a, a},   {-b, 0, 1}, {0, 1, b},   {-a, a, a},  {b, 0, 1},
                             {0, 1, -b},  {-1, b, 0}, {-b, 0, -1}, {a, -a, a},  {b, 0, -1},
                             {-a, -a, -a}, {a, a, -a}, {-1, -b, 0}, {1, -b, 0}, {0, -1, b}};
    for (int k = 0; k < 20; ++k) vertices_[k] = Quaternion{s * s, v[k][0], v[k][1], v[k][2]} * c;
    faces_ = {{{3, 18, 16, 5, 20}, {18, 12, 9, 7, 3},  {3, 7, 10, 14, 20}, {20, 14, 19, 4, 5},
               {5, 4, 15, 13, 16}, {16, 13, 1, 12, 18}, {6, 8, 11, 17, 2},  {15, 17, 2, 19, 4},
               {1, 11, 17, 15, 13}, {9, 8, 11, 1, 12},  {10, 6, 8, 9, 7},   {19, 2, 6, 10, 14}}};
    const auto& G = binary_icosahedral_group();
    for (int k = 1; k <= 12; ++k) {
      // F_k lies on the bisector of 1 and g_k^{-1}.
      Quaternion n = Quaternion{1, 0, 0, 0} - G.clifford(partner(k)).q;
      normals_[k - 1] = n.normalized();
    }
  }

  // 1-based vertex S_k.
  const Quaternion& vertex(int k) const { return vertices_.at(k - 1); }
  // 1-based face F_k as an ordered cycle of 1-based vertex numbers.
  const std::array<int, 5>& face(int k) const { return faces_.at(k - 1); }
  const Quaternion& normal(int k) const { return normals_.at(k - 1); }
  static constexpr int partner(int k) { return k <= 6 ? k + 6 : k - 6; }

  // g_k carries face k onto face partner(k).
  const GroupElement& gluing(int k) const { return binary_icosahedral_group().clifford(k); }

  Containment contains(const Quaternion& x, double tol = kBoundaryTol) const {
    Containment c;
    for (int k = 1; k <= 12; ++k) {
      double d = normals_[k - 1].dot(x);
      if (d < -tol) {
        c.where = Location::outside;
        c.n_faces = 0;
        return c;
      }
      if (d <= tol && c.n_faces < 3) c.faces[c.n_faces++] = k;
    }
    static constexpr Location kinds[4] = {Location::interior, Location::face, Location::edge,
                                          Location::vertex};
    c.where = kinds[c.n_faces];
    return c;
  }

  void write(std::ostream& os) const {
    for (int k = 1; k <= 20; ++k) {
      const auto& q = vertex(k);
      os << 'S' << k << ' ' << fmt17(q.w) << ' ' << fmt17(q.x) << ' ' << fmt17(q.y) << ' ' << fmt17(q.z)
         << '\n';
    }
    for (int k = 1; k <= 12; ++k) {
      os << 'F' << k;
      for (int v : face(k)) os << ' ' << v;
      os << " partner " << partner(k) << '\n';
    }
  }

 private:
  std::array<Quaternion, 20> vertices_;
  std::array<std::array<int, 5>, 12> faces_;
  std::array<Quaternion, 12> normals_;
};

inline const FundamentalDomain& fundamental_domain() {
  static const FundamentalDomain domain;
  return domain;
}

// (face i, S_j, S_k) with g_i(S_j) = S_k, vertex by vertex along each glued face i = 1..6.
inline constexpr int kVertexImages[30][3] = {
    {1, 3, 6},   {1, 18, 8},  {1, 16, 11}, {1, 5, 17},  {1, 20, 2},  {2, 18, 15}, {2, 12, 17}, {2, 9, 2},
    {2, 7, 19},  {2, 3, 4},   {3, 3, 1},   {3, 7, 11},  {3, 10, 17}, {3, 14, 15}, {3, 20, 13}, {4, 20, 9},
    {4, 14, 8},  {4, 19, 11}, {4, 4, 1},   {4, 5, 12},  {5, 5, 10},  {5, 4, 6},   {5, 15, 8},  {5, 13, 9},
    {5, 16, 7},  {6, 16, 19}, {6, 13, 2},  {6, 1, 6},   {6, 12, 10}, {6, 18, 14}};

struct Reduction {
  Quaternion point;  // tau * x, inside F
  int tau = 0;       // group index
};

namespace detail {
inline bool lex_less(const Quaternion& a, const Quaternion& b, double tol = 1e-9) {
  auto ka = a.array(), kb = b.array();
  for (int k = 0; k < 4; ++k)
    if (std::fabs(ka[k] - kb[k]) > tol) return ka[k] < kb[k];
  return false;
}
}  // namespace detail

// Brings x into F. F is the Voronoi cell of 1 among the 120 group elements, so tau is the
// inverse of the element nearest to x. On the boundary several tau qualify; the image that is
// smallest in lexicographic order is kept, so that equivalent points share one representative.
inline Reduction reduce_to_domain(const Quaternion& x) {
  require_unit(x, "reduce_to_domain", 1e-10);
  const auto& G = enumerate_group();
  const auto& F = fundamental_domain();
  double best = -2;
  for (const auto& g : G) best = std::max(best, x.dot(g.q));
  Reduction r;
  bool found = false;
  for (const auto& g : G) {
    if (x.dot(g.q) < best - kBoundaryTol) continue;
    Quaternion y = g.q.conj() * x;
    if (F.contains(y).where == Location::outside) continue;
    if (!found || detail::lex_less(y, r.point)) {
      r.point = y;
      r.tau = binary_icosahedral_group().find(g.q.conj());
      found = true;
    }
  }
  if (!found) throw NumericalError("reduce_to_domain: no admissible group element");
  return r;
}

// All points of F equivalent to the boundary point lift(X), starting with lift(X) itself.
inline std::vector<Quaternion> boundary_class(const Quaternion& x, double tol = kBoundaryTol) {
  const auto& F = fundamental_domain();
  auto c = F.contains(x, tol);
  if (c.where == Location::outside) throw DomainError("boundary_partner: point outside F");
  if (c.where == Location::interior) throw DomainError("not a boundary point");
  std::vector<Quaternion> members{x};
  for (std::size_t n = 0; n < members.size(); ++n) {
    auto cn = F.contains(members[n], tol);
    for (int f = 0; f < cn.n_faces; ++f) {
      Quaternion y = F.gluing(cn.faces[f]).q * members[n];
      bool seen = std::any_of(members.begin(), members.end(),
                              [&](const Quaternion& m) { return max_abs_diff(m, y) < 1e-8; });
      if (!seen) members.push_back(y);
    }
  }
  return members;
}

inline std::vector<Vec3> boundary_partner(const Vec3& X, double tol = kBoundaryTol) {
  std::vector<Vec3> out;
  for (const auto& q : boundary_class(lift(X), tol)) out.push_back(project(q));
  return out;
}

}  // namespace dodecawave
