#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <vector>

#include "format.hpp"
#include "quaternion.hpp"

namespace dodecawave {

inline const double kSigma = (1.0 + std::sqrt(5.0)) / 2.0;

struct GroupElement {
  Quaternion q;
  int index = 0;
  int clifford = 0;  // 1..12 for g_1..g_12, 0 otherwise
};

namespace detail {

inline std::vector<Quaternion> raw_group() {
  std::vector<Quaternion> out;
  for (int c = 0; c < 4; ++c)
    for (double s : {1.0, -1.0}) {
      std::array<double, 4> v{0, 0, 0, 0};
      v[c] = s;
      out.emplace_back(v[0], v[1], v[2], v[3]);
    }
  for (int m = 0; m < 16; ++m)
    out.emplace_back((m & 1 ? -0.5 : 0.5), (m & 2 ? -0.5 : 0.5), (m & 4 ? -0.5 : 0.5),
                     (m & 8 ? -0.5 : 0.5));
  // 1/2 (0, 1, 1/sigma, sigma) with all sign choices on the nonzero entries, even permutations.
  const std::array<double, 4> base{0.0, 0.5, 0.5 / kSigma, 0.5 * kSigma};
  const int even_perms[12][4] = {{0, 1, 2, 3}, {0, 2, 3, 1}, {0, 3, 1, 2}, {1, 0, 3, 2},
                                 {1, 2, 0, 3}, {1, 3, 2, 0}, {2, 0, 1, 3}, {2, 1, 3, 0},
                                 {2, 3, 0, 1}, {3, 0, 2, 1}, {3, 1, 0, 2}, {3, 2, 1, 0}};
  for (const auto& p : even_perms)
    for (int m = 0; m < 8; ++m) {
      std::array<double, 4> v{};
      std::array<double, 4> b = base;
      b[1] *= (m & 1) ? -1 : 1;
      b[2] *= (m & 2) ? -1 : 1;
      b[3] *= (m & 4) ? -1 : 1;
      for (int k = 0; k < 4; ++k) v[p[k]] = b[k];
      out.emplace_back(v[0], v[1], v[2], v[3]);
    }
  return out;
}

// Lexicographic descending order on rounded components; puts the identity first.
inline bool group_order(const Quaternion& a, const Quaternion& b) {
  auto ka = a.array(), kb = b.array();
  for (int k = 0; k < 4; ++k) {
    if (std::fabs(ka[k] - kb[k]) > 1e-9) return ka[k] > kb[k];
  }
  return false;
}

}  // namespace detail

// g_1..g_6 of the face gluing; g_{i+6} is the conjugate of g_i.
inline std::array<Quaternion, 12> clifford_quaternions() {
  const double s = kSigma, h = 0.5;
  std::array<Quaternion, 12> g{
      Quaternion{h * s, h / s, h, 0},  Quaternion{h * s, h, 0, -h / s}, Quaternion{h * s, 0, h / s, -h},
      Quaternion{h * s, -h / s, h, 0}, Quaternion{h * s, 0, h / s, h},  Quaternion{h * s, h, 0, h / s},
      {}, {}, {}, {}, {}, {}};
  for (int i = 0; i < 6; ++i) g[i + 6] = g[i].conj();
  return g;
}

class BinaryIcosahedralGroup {
 public:
  BinaryIcosahedralGroup() {
    auto raw = detail::raw_group();
    std::sort(raw.begin(), raw.end(), detail::group_order);
    auto g = clifford_quaternions();
    elements_.reserve(raw.size());
    for (std::size_t n = 0; n < raw.size(); ++n) {
      GroupElement e{raw[n], static_cast<int>(n), 0};
      for (int i = 0; i < 12; ++i)
        if (max_abs_diff(raw[n], g[i]) < 1e-12) {
          e.clifford = i + 1;
          clifford_index_[i] = static_cast<int>(n);
        }
      elements_.push_back(e);
    }
  }

  const std::vector<GroupElement>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  const GroupElement& operator[](std::size_t n) const { return elements_[n]; }

  // g_i for i in 1..12.
  const GroupElement& clifford(int i) const { return elements_[clifford_index_.at(i - 1)]; }

  // Index of the element equal to q, or -1.
  int find(const Quaternion& q, double tol = 1e-9) const {
    for (const auto& e : elements_)
      if (max_abs_diff(e.q, q) < tol) return e.index;
    return -1;
  }

  void write(std::ostream& os) const {
    for (const auto& e : elements_)
      os << e.index << ' ' << fmt17(e.q.w) << ' ' << fmt17(e.q.x) << ' ' << fmt17(e.q.y) << ' '
         << fmt17(e.q.z) << '\n';
  }

 private:
  std::vector<GroupElement> elements_;
  std::array<int, 12> clifford_index_{};
};

inline const BinaryIcosahedralGroup& binary_icosahedral_group() {
  static const BinaryIcosahedralGroup group;
  return group;
}

inline const std::vector<GroupElement>& enumerate_group() { return binary_icosahedral_group().elements(); }

inline std::array<GroupElement, 12> clifford_translations() {
  std::array<GroupElement, 12> out;
  for (int i = 1; i <= 12; ++i) out[i - 1] = binary_icosahedral_group().clifford(i);
  return out;
}

}  // namespace dodecawave
