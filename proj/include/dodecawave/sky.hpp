#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "domain.hpp"
#include "format.hpp"
#include "locate.hpp"
#include "parallel.hpp"

namespace dodecawave {

// Point of S^3 at geodesic distance chi from the identity in direction (theta, phi).
inline Quaternion sky_point(double chi, double theta, double phi) {
  double s = std::sin(chi);
  return {std::cos(chi), s * std::sin(theta) * std::sin(phi), s * std::sin(theta) * std::cos(phi),
          s * std::cos(theta)};
}

// Samples (1/3) Psi at arbitrary points of S^3 by reducing them to the fundamental domain.
class SkySampler {
 public:
  SkySampler(const TetMeshP2& mesh, const Vector& U) : mesh_(mesh), U_(U), locator_(mesh) {
    if (U.size() != mesh.n_classes()) throw UsageError("field size does not match the mesh");
  }

  double field(const Quaternion& p) const { return locator_.eval(U_, project(reduce_to_domain(p).point)); }
  double operator()(const Quaternion& p) const { return field(p) / 3.0; }

  const TetMeshP2& mesh() const { return mesh_; }

 private:
  const TetMeshP2& mesh_;
  const Vector& U_;
  PointLocator locator_;
};

struct SkyMap {
  double chi = 0;
  int n_theta = 0, n_phi = 0;
  std::vector<double> values;  // row-major in theta

  double theta(int i) const { return (i + 0.5) * M_PI / n_theta; }
  double phi(int j) const { return 2.0 * M_PI * j / n_phi; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * n_phi + j]; }
  double min() const { return *std::min_element(values.begin(), values.end()); }
  double max() const { return *std::max_element(values.begin(), values.end()); }
};

inline SkyMap sky_map(const SkySampler& sampler, double chi, int n_theta, int n_phi) {
  if (!(chi > 0 && chi < M_PI)) throw DomainError("sky radius chi must lie in (0, pi)");
  if (n_theta <= 0 || n_phi <= 0) throw UsageError("sky grid dimensions must be positive");
  SkyMap map{chi, n_theta, n_phi, {}};
  map.values.resize(static_cast<std::size_t>(n_theta) * n_phi);
  parallel_for(
      map.values.size(),
      [&](std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) {
          int i = static_cast<int>(k / n_phi), j = static_cast<int>(k % n_phi);
          map.values[k] = sampler(sky_point(chi, map.theta(i), map.phi(j)));
        }
      },
      256);
  return map;
}

inline SkyMap sky_map(const TetMeshP2& mesh, const Vector& U, double chi, int n_theta = 512, int n_phi = 1024) {
  return sky_map(SkySampler(mesh, U), chi, n_theta, n_phi);
}

// Samples of the circle where the sphere of radius chi meets its image under g^{-1}, i.e. the
// points p with g p back on the sphere. Empty when the spheres do not meet.
inline std::vector<Quaternion> matched_circle(const Quaternion& g, double chi, int samples) {
  Quaternion c = g.conj();  // centre of the other sphere
  Vec3 cv{c.x, c.y, c.z};
  double len = cv.norm();
  double s = std::sin(chi), a = std::cos(chi) * (1.0 - c.w) / len;
  if (a >= s) return {};
  double r = std::sqrt(s * s - a * a);
  Vec3 n = cv * (1.0 / len);
  Vec3 e1 = std::fabs(n.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  e1 = e1 - n * n.dot(e1);
  e1 = e1 * (1.0 / e1.norm());
  Vec3 e2 = cross(n, e1);
  std::vector<Quaternion> out;
  for (int k = 0; k < samples; ++k) {
    double psi = 2.0 * M_PI * k / samples;
    Vec3 v = n * a + e1 * (r * std::cos(psi)) + e2 * (r * std::sin(psi));
    out.push_back(Quaternion{std::cos(chi), v.x, v.y, v.z}.normalized());
  }
  return out;
}

struct CircleResidual {
  int pairs = 0;            // circle pairs found (6 once 2 chi exceeds pi/5)
  double mean_abs_diff = 0;
  double range = 0;         // dynamic range of the map
  double relative = 0;      // mean_abs_diff / range
};

// Mean |value - partner value| along the circles matched by the six face gluings g_1..g_6.
inline CircleResidual circle_residual(const SkySampler& sampler, const SkyMap& map, int samples = 360) {
  CircleResidual r;
  r.range = map.max() - map.min();
  double sum = 0;
  long count = 0;
  for (int k = 1; k <= 6; ++k) {
    const Quaternion& g = fundamental_domain().gluing(k).q;
    auto circle = matched_circle(g, map.chi, samples);
    if (circle.empty()) continue;
    ++r.pairs;
    for (const auto& p : circle) {
      sum += std::fabs(sampler(p) - sampler(g * p));
      ++count;
    }
  }
  if (count > 0) r.mean_abs_diff = sum / static_cast<double>(count);
  r.relative = r.range > 0 ? r.mean_abs_diff / r.range : 0.0;
  return r;
}

// File name stem sky_chi<chi>.
inline std::string sky_stem(double chi) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "sky_chi%.6g", chi);
  return buf;
}

inline void write_sky_tsv(const SkyMap& map, std::ostream& os) {
  os << "theta\tphi\tvalue\n";
  for (int i = 0; i < map.n_theta; ++i)
    for (int j = 0; j < map.n_phi; ++j)
      os << fmt17(map.theta(i)) << '\t' << fmt17(map.phi(j)) << '\t' << fmt17(map.at(i, j)) << '\n';
}

// 16-bit binary graymap, linear min-max scaling. A map whose spread is at roundoff level is
// written as zeros.
inline void write_sky_pgm(const SkyMap& map, std::ostream& os) {
  double lo = map.min(), hi = map.max();
  if (hi - lo <= 1e-12 * std::max({1.0, std::fabs(lo), std::fabs(hi)})) hi = lo;
  os << "P5\n# chi " << fmt17(map.chi) << " linear min " << fmt17(lo) << " max " << fmt17(hi) << '\n'
     << map.n_phi << ' ' << map.n_theta << "\n65535\n";
  for (double v : map.values) {
    double t = hi > lo ? (v - lo) / (hi - lo) : 0.0;
    auto p = static_cast<std::uint16_t>(std::lround(std::clamp(t, 0.0, 1.0) * 65535.0));
    os.put(static_cast<char>(p >> 8));
    os.put(static_cast<char>(p & 0xff));
  }
}

template <class Writer>
void write_file(const std::string& path, Writer&& w, bool binary = false) {
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  w(os);
  if (!os) throw std::runtime_error("write failed: " + path);
}

// Pull-back of a field on K to the cells tau(F) of the universal cover. Each cell lists the
// images of the mesh vertices in the ball chart with the quotient values copied over.
inline void tiling_export(const TetMeshP2& mesh, const Vector& U, const std::vector<int>& group_subset,
                          std::ostream& os) {
  if (U.size() != mesh.n_classes()) throw UsageError("field size does not match the mesh");
  const auto& G = binary_icosahedral_group();
  for (int idx : group_subset) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= G.size()) throw UsageError("group index out of range");
    const Quaternion& tau = G[idx].q;
    os << "cell " << idx << (tau.w >= 0 ? " upper" : " lower") << '\n';
    for (std::size_t v = 0; v < mesh.n_vertices(); ++v) {
      Quaternion p = tau * lift(mesh.vertices[v]);
      os << "vertex " << fmt17(p.x) << ' ' << fmt17(p.y) << ' ' << fmt17(p.z) << ' '
         << fmt17(U[mesh.node_class[v]]) << '\n';
    }
  }
}

// {identity, g_1, ..., g_12}
inline std::vector<int> neighbor_cells() {
  std::vector<int> out{0};
  for (int k = 1; k <= 12; ++k) out.push_back(binary_icosahedral_group().clifford(k).index);
  return out;
}

}  // namespace dodecawave
