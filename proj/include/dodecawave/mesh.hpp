#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "domain.hpp"
#include "errors.hpp"
#include "format.hpp"

namespace dodecawave {

// Basis kinds: interior vertex, F_v vertex, face-interior vertex, edge vertex, edge midpoint.
enum class NodeKind : int { interior = 1, domain_vertex = 2, face = 3, edge = 4, midpoint = 5 };

// Local P2 numbering: 4 vertices, then the midpoints of these vertex pairs.
inline constexpr std::array<std::array<int, 2>, 6> kTetEdges{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

struct TetMeshP2 {
  int level = 0;
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 4>> tets;
  std::vector<std::array<int, 2>> edges;       // sorted vertex pairs; node id = vertices.size() + edge id
  std::vector<std::array<int, 6>> tet_edges;   // local edge -> global edge id
  std::vector<int> node_class;                 // node id -> class id
  std::vector<NodeKind> class_kind;
  std::vector<std::vector<int>> class_nodes;   // sorted node ids

  std::size_t n_vertices() const { return vertices.size(); }
  std::size_t n_nodes() const { return vertices.size() + edges.size(); }
  std::size_t n_classes() const { return class_kind.size(); }

  Vec3 node(std::size_t id) const {
    if (id < vertices.size()) return vertices[id];
    const auto& e = edges[id - vertices.size()];
    return (vertices[e[0]] + vertices[e[1]]) * 0.5;
  }

  std::array<int, 10> tet_nodes(std::size_t t) const {
    std::array<int, 10> n{};
    for (int k = 0; k < 4; ++k) n[k] = tets[t][k];
    for (int k = 0; k < 6; ++k) n[4 + k] = static_cast<int>(vertices.size()) + tet_edges[t][k];
    return n;
  }

  std::array<int, 10> tet_classes(std::size_t t) const {
    auto n = tet_nodes(t);
    for (auto& v : n) v = node_class[v];
    return n;
  }

  double max_edge_length() const {
    double h = 0;
    for (const auto& e : edges) h = std::max(h, (vertices[e[0]] - vertices[e[1]]).norm());
    return h;
  }
};

inline double signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return cross(b - a, c - a).dot(d - a) / 6.0;
}

namespace detail {

inline std::uint64_t pair_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

inline std::uint64_t tri_key(int a, int b, int c) {
  std::array<int, 3> v{a, b, c};
  std::sort(v.begin(), v.end());
  return (static_cast<std::uint64_t>(v[0]) << 42) | (static_cast<std::uint64_t>(v[1]) << 21) |
         static_cast<std::uint64_t>(v[2]);
}

inline void orient(std::vector<Vec3>& V, std::array<int, 4>& t) {
  if (signed_volume(V[t[0]], V[t[1]], V[t[2]], V[t[3]]) < 0) std::swap(t[2], t[3]);
}

// Edges of triangles that appear in exactly one tet.
inline std::unordered_map<std::uint64_t, int> boundary_edges(const std::vector<std::array<int, 4>>& tets) {
  std::unordered_map<std::uint64_t, int> count;
  static constexpr int faces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
  for (const auto& t : tets)
    for (const auto& f : faces) ++count[tri_key(t[f[0]], t[f[1]], t[f[2]])];
  std::unordered_map<std::uint64_t, int> out;
  for (const auto& t : tets)
    for (const auto& f : faces) {
      if (count[tri_key(t[f[0]], t[f[1]], t[f[2]])] != 1) continue;
      out[pair_key(t[f[0]], t[f[1]])] = 1;
      out[pair_key(t[f[1]], t[f[2]])] = 1;
      out[pair_key(t[f[0]], t[f[2]])] = 1;
    }
  return out;
}

inline void base_mesh(std::vector<Vec3>& V, std::vector<std::array<int, 4>>& T) {
  const auto& F = fundamental_domain();
  V.clear();
  T.clear();
  V.push_back({0, 0, 0});
  for (int k = 1; k <= 20; ++k) V.push_back(project(F.vertex(k)));
  for (int k = 1; k <= 12; ++k) {
    Quaternion c{};
    for (int v : F.face(k)) c = c + F.vertex(v);
    V.push_back(project(c.normalized()));
  }
  for (int k = 1; k <= 12; ++k) {
    const auto& f = F.face(k);
    for (int m = 0; m < 5; ++m) {
      std::array<int, 4> t{0, 20 + k, f[m], f[(m + 1) % 5]};
      orient(V, t);
      T.push_back(t);
    }
  }
}

// 8-way red refinement. Midpoints of boundary edges go to the geodesic midpoint of the lifted
// endpoints, which stays on every face plane containing both endpoints.
inline void refine(std::vector<Vec3>& V, std::vector<std::array<int, 4>>& T) {
  auto bnd = boundary_edges(T);
  std::unordered_map<std::uint64_t, int> mid;
  mid.reserve(T.size() * 2);
  auto midpoint = [&](int a, int b) {
    auto key = pair_key(a, b);
    auto it = mid.find(key);
    if (it != mid.end()) return it->second;
    Vec3 p;
    if (bnd.count(key))
      p = project((lift(V[a]) + lift(V[b])).normalized());
    else
      p = (V[a] + V[b]) * 0.5;
    V.push_back(p);
    int id = static_cast<int>(V.size()) - 1;
    mid.emplace(key, id);
    return id;
  };
  std::vector<std::array<int, 4>> out;
  out.reserve(T.size() * 8);
  for (const auto& t : T) {
    int v0 = t[0], v1 = t[1], v2 = t[2], v3 = t[3];
    int m01 = midpoint(v0, v1), m02 = midpoint(v0, v2), m03 = midpoint(v0, v3);
    int m12 = midpoint(v1, v2), m13 = midpoint(v1, v3), m23 = midpoint(v2, v3);
    std::array<std::array<int, 4>, 8> kids{{{v0, m01, m02, m03},
                                            {m01, v1, m12, m13},
                                            {m02, m12, v2, m23},
                                            {m03, m13, m23, v3}}};
    // Octahedron split along its shortest diagonal.
    std::array<std::array<int, 2>, 3> diag{{{m01, m23}, {m02, m13}, {m03, m12}}};
    int best = 0;
    double len = 1e300;
    for (int d = 0; d < 3; ++d) {
      double l = (V[diag[d][0]] - V[diag[d][1]]).norm();
      if (l < len - 1e-14) {
        len = l;
        best = d;
      }
    }
    int a = diag[best][0], b = diag[best][1];
    // Equator of the octahedron around the diagonal a-b, as a cycle.
    std::array<int, 4> ring;
    if (best == 0) ring = {m02, m12, m13, m03};
    else if (best == 1) ring = {m01, m12, m23, m03};
    else ring = {m01, m02, m23, m13};
    for (int k = 0; k < 4; ++k) kids[4 + k] = {a, b, ring[k], ring[(k + 1) % 4]};
    for (auto& c : kids) {
      orient(V, c);
      out.push_back(c);
    }
  }
  T.swap(out);
}

inline void build_edges(TetMeshP2& m) {
  std::unordered_map<std::uint64_t, int> index;
  index.reserve(m.tets.size() * 2);
  m.edges.clear();
  m.tet_edges.assign(m.tets.size(), {});
  for (std::size_t t = 0; t < m.tets.size(); ++t)
    for (int k = 0; k < 6; ++k) {
      int a = m.tets[t][kTetEdges[k][0]], b = m.tets[t][kTetEdges[k][1]];
      auto [it, fresh] = index.emplace(pair_key(a, b), static_cast<int>(m.edges.size()));
      if (fresh) m.edges.push_back({std::min(a, b), std::max(a, b)});
      m.tet_edges[t][k] = it->second;
    }
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Hash grid for exact-up-to-roundoff point matching.
class PointIndex {
 public:
  explicit PointIndex(double cell) : cell_(cell) {}
  void insert(const Vec3& p, int id) { cells_[key(cell_of(p))].push_back({p, id}); }
  int find(const Vec3& p, double tol) const {
    auto c = cell_of(p);
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          auto it = cells_.find(key({c[0] + dx, c[1] + dy, c[2] + dz}));
          if (it == cells_.end()) continue;
          for (const auto& [q, id] : it->second)
            if ((q - p).norm() < tol) return id;
        }
    return -1;
  }

 private:
  std::array<std::int64_t, 3> cell_of(const Vec3& p) const {
    return {static_cast<std::int64_t>(std::floor(p.x / cell_)), static_cast<std::int64_t>(std::floor(p.y / cell_)),
            static_cast<std::int64_t>(std::floor(p.z / cell_))};
  }
  static std::uint64_t key(const std::array<std::int64_t, 3>& c) {
    return (static_cast<std::uint64_t>(c[0] & 0x1FFFFF) << 42) | (static_cast<std::uint64_t>(c[1] & 0x1FFFFF) << 21) |
           static_cast<std::uint64_t>(c[2] & 0x1FFFFF);
  }
  double cell_;
  std::unordered_map<std::uint64_t, std::vector<std::pair<Vec3, int>>> cells_;
};

inline void finalize_classes(TetMeshP2& m, UnionFind& uf, const std::vector<NodeKind>& node_kind) {
  const std::size_t n = m.n_nodes();
  std::vector<int> root_class(n, -1);
  m.node_class.assign(n, -1);
  m.class_kind.clear();
  m.class_nodes.clear();
  for (std::size_t v = 0; v < n; ++v) {
    int r = uf.find(static_cast<int>(v));
    if (root_class[r] < 0) {
      root_class[r] = static_cast<int>(m.class_kind.size());
      m.class_kind.push_back(node_kind[v]);
      m.class_nodes.emplace_back();
    }
    m.node_class[v] = root_class[r];
    m.class_nodes[root_class[r]].push_back(static_cast<int>(v));
  }
}

}  // namespace detail

// Assigns every P2 node to an equivalence class of the face gluing.
inline void classify_nodes(TetMeshP2& m, double tol = 1e-9) {
  const auto& F = fundamental_domain();
  const std::size_t nv = m.n_vertices(), n = m.n_nodes();
  std::vector<NodeKind> kind(n, NodeKind::interior);
  detail::UnionFind uf(n);
  detail::PointIndex index(1e-4);
  std::vector<Containment> where(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    where[v] = F.contains(lift(m.vertices[v]), tol);
    if (where[v].where == Location::outside)
      throw ConstructionError("mesh vertex " + std::to_string(v) + " lies outside F_v");
    if (where[v].n_faces > 0) index.insert(m.vertices[v], static_cast<int>(v));
  }
  static constexpr NodeKind by_faces[4] = {NodeKind::interior, NodeKind::face, NodeKind::edge,
                                           NodeKind::domain_vertex};
  for (std::size_t v = 0; v < nv; ++v) {
    kind[v] = by_faces[where[v].n_faces];
    for (int f = 0; f < where[v].n_faces; ++f) {
      Quaternion image = F.gluing(where[v].faces[f]).q * lift(m.vertices[v]);
      int partner = index.find(project(image), 1e-8);
      if (partner < 0)
        throw ConstructionError("boundary vertex " + std::to_string(v) + " has no partner across face " +
                                std::to_string(where[v].faces[f]));
      uf.unite(static_cast<int>(v), partner);
    }
  }
  for (std::size_t e = 0; e < m.edges.size(); ++e) {
    std::size_t id = nv + e;
    kind[id] = NodeKind::midpoint;
    if (F.contains(lift(m.node(id)), tol).where != Location::interior)
      throw ConstructionError("edge midpoint " + std::to_string(id) + " lies on the boundary");
  }
  detail::finalize_classes(m, uf, kind);
  static constexpr std::size_t expected_size[6] = {0, 1, 4, 2, 3, 1};
  for (std::size_t c = 0; c < m.n_classes(); ++c) {
    std::size_t want = expected_size[static_cast<int>(m.class_kind[c])];
    if (m.class_nodes[c].size() != want)
      throw ConstructionError("class " + std::to_string(c) + " has " + std::to_string(m.class_nodes[c].size()) +
                              " nodes, expected " + std::to_string(want));
  }
}

inline TetMeshP2 build_mesh(int level) {
  if (level < 0) throw UsageError("mesh level must be non-negative");
  if (level > 5) throw UsageError("mesh level above 5 is not supported");
  TetMeshP2 m;
  m.level = level;
  detail::base_mesh(m.vertices, m.tets);
  for (int l = 0; l < level; ++l) detail::refine(m.vertices, m.tets);
  detail::build_edges(m);
  classify_nodes(m);
  return m;
}

inline std::size_t count_kind(const TetMeshP2& m, NodeKind k) {
  return static_cast<std::size_t>(std::count(m.class_kind.begin(), m.class_kind.end(), k));
}

inline void write_mesh(const TetMeshP2& m, std::ostream& os) {
  os << "DODECAWAVE_MESH 1\nLEVEL " << m.level << '\n';
  os << "VERTICES " << m.vertices.size() << '\n';
  for (std::size_t v = 0; v < m.vertices.size(); ++v)
    os << v << ' ' << fmt17(m.vertices[v].x) << ' ' << fmt17(m.vertices[v].y) << ' ' << fmt17(m.vertices[v].z)
       << '\n';
  os << "TETS " << m.tets.size() << '\n';
  for (std::size_t t = 0; t < m.tets.size(); ++t)
    os << t << ' ' << m.tets[t][0] << ' ' << m.tets[t][1] << ' ' << m.tets[t][2] << ' ' << m.tets[t][3] << '\n';
  os << "CLASSES " << m.n_classes() << '\n';
  for (std::size_t c = 0; c < m.n_classes(); ++c) {
    os << c << ' ' << static_cast<int>(m.class_kind[c]);
    for (int n : m.class_nodes[c]) os << ' ' << n;
    os << '\n';
  }
}

inline void write_mesh(const TetMeshP2& m, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_mesh(m, os);
  if (!os) throw std::runtime_error("write failed: " + path);
}

inline TetMeshP2 read_mesh(std::istream& is) {
  TetMeshP2 m;
  std::string line;
  int lineno = 0;
  auto next = [&]() -> std::istringstream {
    while (std::getline(is, line)) {
      ++lineno;
      if (!line.empty() && line[0] != '#') return std::istringstream(line);
    }
    throw ParseError("unexpected end of mesh file", lineno);
  };
  auto header = [&](const char* name) {
    auto ss = next();
    std::string word;
    long long count = -1;
    if (!(ss >> word >> count) || word != name || count < 0)
      throw ParseError(std::string("expected section ") + name, lineno);
    return static_cast<std::size_t>(count);
  };
  {
    auto ss = next();
    std::string magic;
    int version = 0;
    if (!(ss >> magic >> version) || magic != "DODECAWAVE_MESH" || version != 1)
      throw ParseError("not a mesh file", lineno);
  }
  {
    auto ss = next();
    std::string word;
    if (!(ss >> word >> m.level) || word != "LEVEL") throw ParseError("expected LEVEL", lineno);
  }
  std::size_t nv = header("VERTICES");
  m.vertices.resize(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    auto ss = next();
    std::size_t id;
    Vec3 p;
    if (!(ss >> id >> p.x >> p.y >> p.z) || id != v) throw ParseError("bad vertex record", lineno);
    m.vertices[v] = p;
  }
  std::size_t nt = header("TETS");
  m.tets.resize(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    auto ss = next();
    std::size_t id;
    auto& tet = m.tets[t];
    if (!(ss >> id >> tet[0] >> tet[1] >> tet[2] >> tet[3]) || id != t) throw ParseError("bad tet record", lineno);
    for (int v : tet)
      if (v < 0 || static_cast<std::size_t>(v) >= nv) throw ParseError("tet vertex out of range", lineno);
  }
  detail::build_edges(m);
  std::size_t nc = header("CLASSES");
  m.node_class.assign(m.n_nodes(), -1);
  m.class_kind.resize(nc);
  m.class_nodes.resize(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    auto ss = next();
    std::size_t id;
    int kind;
    if (!(ss >> id >> kind) || id != c || kind < 1 || kind > 5) throw ParseError("bad class record", lineno);
    m.class_kind[c] = static_cast<NodeKind>(kind);
    long long node;
    while (ss >> node) {
      if (node < 0 || static_cast<std::size_t>(node) >= m.n_nodes() || m.node_class[node] >= 0)
        throw ParseError("bad node id in class record", lineno);
      m.node_class[node] = static_cast<int>(c);
      m.class_nodes[c].push_back(static_cast<int>(node));
    }
    if (m.class_nodes[c].empty()) throw ParseError("empty class", lineno);
  }
  for (std::size_t n = 0; n < m.n_nodes(); ++n)
    if (m.node_class[n] < 0) throw ParseError("node " + std::to_string(n) + " has no class", lineno);
  return m;
}

inline TetMeshP2 read_mesh(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_mesh(is);
}

}  // namespace dodecawave
