#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "dodecawave/assembly.hpp"
#include "dodecawave/locate.hpp"
#include "dodecawave/mesh.hpp"

using namespace dodecawave;

namespace {

const TetMeshP2& mesh_at(int level) {
  static const TetMeshP2 meshes[3] = {build_mesh(0), build_mesh(1), build_mesh(2)};
  return meshes[level];
}

const SystemMatrices& mats_at(int level) {
  static const SystemMatrices mats[2] = {assemble(mesh_at(0)), assemble(mesh_at(1))};
  return mats[level];
}

// Tets whose ten nodes are all singleton classes, so any interpolant is the plain nodal one there.
std::vector<std::size_t> unglued_tets(const TetMeshP2& m) {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < m.tets.size(); ++t) {
    bool ok = true;
    for (int c : m.tet_classes(t)) ok = ok && m.class_nodes[c].size() == 1;
    if (ok) out.push_back(t);
  }
  return out;
}

// Smallest nonzero eigenvalue of M^{-1}(K+D) by inverse iteration on M + K + D, constants projected out.
double first_eigenvalue(const SystemMatrices& mats) {
  const std::size_t n = mats.size();
  CsrMatrix A = mats.S.combine(1.0, mats.M, 1.0);
  Vector inv = A.diagonal();
  for (auto& v : inv) v = 1.0 / v;
  Vector one(n, 1.0), m1 = mats.M * one;
  const double vol = dot(m1, one);
  auto deflate = [&](Vector& x) {
    double c = dot(m1, x) / vol;
    for (auto& v : x) v -= c;
  };
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  Vector x(n), z(n, 0.0);
  for (auto& v : x) v = u(rng);
  double lambda = 0;
  for (int it = 0; it < 200; ++it) {
    deflate(x);
    conjugate_gradient(A, inv, mats.M * x, z, 1e-12);
    deflate(z);
    double nz = std::sqrt(dot(mats.M * z, z));
    for (std::size_t i = 0; i < n; ++i) x[i] = z[i] / nz;
    lambda = dot(mats.S * x, x);
  }
  return lambda;
}

}  // namespace

TEST(Mesh, Level0Counts) {
  const auto& m = mesh_at(0);
  EXPECT_EQ(m.tets.size(), 60u);
  EXPECT_EQ(m.n_vertices(), 33u);
  EXPECT_EQ(m.n_classes(), 134u);
  EXPECT_EQ(count_kind(m, NodeKind::domain_vertex), 5u);
  EXPECT_EQ(count_kind(m, NodeKind::face), 6u);
}

TEST(Mesh, RefinementSplitsEveryTetIntoEight) {
  for (int l = 1; l <= 2; ++l) {
    EXPECT_EQ(mesh_at(l).tets.size(), 8 * mesh_at(l - 1).tets.size());
    EXPECT_EQ(count_kind(mesh_at(l), NodeKind::domain_vertex), 5u);
    EXPECT_LT(mesh_at(l).max_edge_length(), mesh_at(l - 1).max_edge_length());
  }
}

TEST(Mesh, RejectsBadLevels) {
  EXPECT_THROW(build_mesh(-1), UsageError);
  EXPECT_THROW(build_mesh(6), UsageError);
}

TEST(Mesh, TetsArePositivelyOriented) {
  for (int l = 0; l <= 2; ++l) {
    const auto& m = mesh_at(l);
    for (const auto& t : m.tets)
      ASSERT_GT(signed_volume(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]], m.vertices[t[3]]), 0.0);
  }
}

TEST(Mesh, EveryInteriorFaceIsSharedByTwoTets) {
  const auto& m = mesh_at(1);
  std::map<std::array<int, 3>, int> faces;
  for (const auto& t : m.tets)
    for (int skip = 0; skip < 4; ++skip) {
      std::array<int, 3> f;
      for (int k = 0, j = 0; k < 4; ++k)
        if (k != skip) f[j++] = t[k];
      std::sort(f.begin(), f.end());
      ++faces[f];
    }
  const auto& F = fundamental_domain();
  for (const auto& [f, count] : faces) {
    ASSERT_LE(count, 2);
    if (count == 1)
      for (int v : f) EXPECT_NE(F.contains(lift(m.vertices[v]), 1e-8).where, Location::interior);
  }
}

TEST(Mesh, BoundaryVerticesLieOnCurvedFaces) {
  const auto& m = mesh_at(2);
  const auto& F = fundamental_domain();
  for (std::size_t c = 0; c < m.n_classes(); ++c) {
    if (m.class_kind[c] == NodeKind::interior || m.class_kind[c] == NodeKind::midpoint) continue;
    for (int id : m.class_nodes[c]) EXPECT_NE(F.contains(lift(m.node(id)), 1e-8).where, Location::interior);
  }
}

TEST(Mesh, CenterIsASingletonInteriorClass) {
  const auto& m = mesh_at(1);
  std::size_t hits = 0;
  for (std::size_t v = 0; v < m.n_vertices(); ++v) {
    if (m.vertices[v].norm() > 1e-14) continue;
    ++hits;
    int c = m.node_class[v];
    EXPECT_EQ(m.class_kind[c], NodeKind::interior);
    EXPECT_EQ(m.class_nodes[c].size(), 1u);
  }
  EXPECT_EQ(hits, 1u);
}

TEST(Mesh, ClassOfS3HoldsItsFourImages) {
  const auto& m = mesh_at(1);
  const auto& F = fundamental_domain();
  auto vertex_at = [&](const Vec3& p) {
    for (std::size_t v = 0; v < m.n_vertices(); ++v)
      if ((m.vertices[v] - p).norm() < 1e-12) return static_cast<int>(v);
    return -1;
  };
  int s3 = vertex_at(project(F.vertex(3)));
  ASSERT_GE(s3, 0);
  int c = m.node_class[s3];
  EXPECT_EQ(m.class_kind[c], NodeKind::domain_vertex);
  ASSERT_EQ(m.class_nodes[c].size(), 4u);
  for (int k : {3, 6, 1, 4}) EXPECT_EQ(m.node_class[vertex_at(project(F.vertex(k)))], c) << "S" << k;
}

TEST(Mesh, MidpointsAreInteriorSingletons) {
  const auto& m = mesh_at(2);
  const auto& F = fundamental_domain();
  for (std::size_t id = m.n_vertices(); id < m.n_nodes(); ++id) {
    int c = m.node_class[id];
    ASSERT_EQ(m.class_kind[c], NodeKind::midpoint);
    ASSERT_EQ(m.class_nodes[c].size(), 1u);
    ASSERT_EQ(F.contains(lift(m.node(id))).where, Location::interior);
  }
}

TEST(Mesh, ClassMembersReduceToOneQuotientPoint) {
  const auto& m = mesh_at(2);
  for (std::size_t c = 0; c < m.n_classes(); ++c) {
    if (m.class_nodes[c].size() < 2) continue;
    Quaternion first = reduce_to_domain(lift(m.node(m.class_nodes[c].front()))).point;
    for (int id : m.class_nodes[c])
      ASSERT_LT(max_abs_diff(reduce_to_domain(lift(m.node(id))).point, first), 1e-8) << "class " << c;
  }
}

TEST(Mesh, ClassSizesMatchKinds) {
  const auto& m = mesh_at(2);
  const std::size_t want[6] = {0, 1, 4, 2, 3, 1};
  for (std::size_t c = 0; c < m.n_classes(); ++c)
    EXPECT_EQ(m.class_nodes[c].size(), want[static_cast<int>(m.class_kind[c])]);
}

TEST(MeshIo, RoundTripIsStructurallyIdentical) {
  const auto& m = mesh_at(1);
  std::stringstream ss;
  write_mesh(m, ss);
  TetMeshP2 r = read_mesh(ss);
  EXPECT_EQ(r.level, m.level);
  EXPECT_EQ(r.tets, m.tets);
  EXPECT_EQ(r.edges, m.edges);
  EXPECT_EQ(r.node_class, m.node_class);
  EXPECT_EQ(r.class_kind, m.class_kind);
  EXPECT_EQ(r.class_nodes, m.class_nodes);
  ASSERT_EQ(r.vertices.size(), m.vertices.size());
  for (std::size_t v = 0; v < m.vertices.size(); ++v) EXPECT_EQ((r.vertices[v] - m.vertices[v]).norm(), 0.0);
}

TEST(MeshIo, OutputIsDeterministic) {
  std::ostringstream a, b;
  write_mesh(build_mesh(1), a);
  write_mesh(build_mesh(1), b);
  EXPECT_EQ(a.str(), b.str());
}

TEST(MeshIo, Level0FileHasSixtyTetRecords) {
  std::ostringstream os;
  write_mesh(mesh_at(0), os);
  EXPECT_NE(os.str().find("\nTETS 60\n"), std::string::npos);
}

TEST(MeshIo, TruncatedFileIsAParseError) {
  std::ostringstream os;
  write_mesh(mesh_at(0), os);
  std::string text = os.str();
  std::istringstream cut(text.substr(0, text.size() / 2));
  try {
    read_mesh(cut);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_GT(e.line, 0);
  }
}

TEST(MeshIo, MalformedRecordsAreParseErrors) {
  std::istringstream magic("NOT_A_MESH 1\n");
  EXPECT_THROW(read_mesh(magic), ParseError);
  std::istringstream bad_tet("DODECAWAVE_MESH 1\nLEVEL 0\nVERTICES 1\n0 0 0 0\nTETS 1\n0 0 0 0 7\n");
  EXPECT_THROW(read_mesh(bad_tet), ParseError);
}

TEST(Quadrature, WeightsSumToReferenceVolume) {
  double sum = 0;
  for (const auto& p : quadrature_31().points) sum += p.weight;
  EXPECT_EQ(quadrature_31().points.size(), 31u);
  EXPECT_NEAR(sum, 1.0 / 6.0, 1e-15);
}

TEST(Quadrature, IntegratesDegreeFiveMonomialExactly) {
  // x^2 y z^2 over the reference tet: 2! 1! 2! / 8!
  double sum = 0;
  for (const auto& p : quadrature_31().points) {
    double x = p.bary[1], y = p.bary[2], z = p.bary[3];
    sum += p.weight * x * x * y * z * z;
  }
  EXPECT_NEAR(sum, 4.0 / 40320.0, 1e-15);
}

TEST(Shape, PartitionOfUnityAndKronecker) {
  TetGeometry g({0.1, 0, 0}, {0.4, 0.05, 0}, {0.15, 0.3, 0.02}, {0.12, 0.1, 0.35});
  std::array<std::array<double, 4>, 10> nodes{};
  for (int k = 0; k < 4; ++k) nodes[k][k] = 1.0;
  for (int e = 0; e < 6; ++e) nodes[4 + e][kTetEdges[e][0]] = nodes[4 + e][kTetEdges[e][1]] = 0.5;
  for (int i = 0; i < 10; ++i) {
    auto phi = shape_values(nodes[i]);
    for (int j = 0; j < 10; ++j) EXPECT_NEAR(phi[j], i == j ? 1.0 : 0.0, 1e-15);
  }
  ShapeValues s = shape_eval(g, {0.25, 0.25, 0.25, 0.25});
  double sum = 0;
  Vec3 grad{};
  for (int k = 0; k < 10; ++k) {
    sum += s.phi[k];
    grad = grad + s.grad[k];
  }
  EXPECT_NEAR(sum, 1.0, 1e-15);
  EXPECT_LT(grad.norm(), 1e-12);
}

TEST(Assembly, MatricesAreSymmetric) {
  const auto& a = mats_at(1);
  for (const CsrMatrix* A : {&a.M, &a.K, &a.D, &a.S}) EXPECT_LE(A->asymmetry(), 1e-12 * A->norm_inf());
}

TEST(Assembly, StiffnessAnnihilatesConstants) {
  const auto& a = mats_at(1);
  Vector one(a.size(), 1.0), r = a.S * one;
  double worst = 0;
  for (double v : r) worst = std::max(worst, std::fabs(v));
  EXPECT_LT(worst, 1e-10 * a.S.norm_inf());
}

TEST(Assembly, MassIsPositiveDefinite) {
  const auto& a = mats_at(0);
  CsrMatrix A = a.M;
  Vector inv = A.diagonal();
  for (auto& v : inv) v = 1.0 / v;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  Vector x(a.size()), z(a.size(), 0.0);
  for (auto& v : x) v = u(rng);
  double ritz = 0;
  for (int it = 0; it < 100; ++it) {
    conjugate_gradient(A, inv, x, z, 1e-13);
    double nz = norm2(z);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = z[i] / nz;
    ritz = dot(A * x, x);
  }
  EXPECT_GT(ritz, 0.0);
}

TEST(Assembly, MassTotalApproachesDomainVolume) {
  const double vol = std::numbers::pi * std::numbers::pi / 60.0;
  double err[2];
  for (int l = 0; l < 2; ++l) {
    Vector one(mats_at(l).size(), 1.0);
    err[l] = std::fabs(dot(mats_at(l).M * one, one) - vol) / vol;
  }
  EXPECT_LT(err[1], err[0]);
  EXPECT_LT(err[1], 3e-2);
}

TEST(Assembly, LocalStiffnessReproducesWeightedGradientForm) {
  // With u = v = x the local K form is the weighted volume of the tet.
  TetGeometry g({0.1, 0, 0}, {0.4, 0.05, 0}, {0.15, 0.3, 0.02}, {0.12, 0.1, 0.35});
  LocalMatrices L = local_matrices(g);
  std::array<double, 10> u{};
  for (int k = 0; k < 4; ++k) u[k] = g.P[k].x;
  for (int e = 0; e < 6; ++e) u[4 + e] = 0.5 * (g.P[kTetEdges[e][0]].x + g.P[kTetEdges[e][1]].x);
  double form = 0, mass = 0;
  for (int a = 0; a < 10; ++a)
    for (int b = 0; b < 10; ++b) {
      form += L.K[a][b] * u[a] * u[b];
      mass += L.M[a][b];
    }
  EXPECT_NEAR(form, L.weight, 1e-14);
  EXPECT_NEAR(mass, L.weight, 1e-14);
}

TEST(Assembly, FirstEigenvalueRisesTowardTheExactValue) {
  // The lowest nonzero eigenvalue of -Laplacian on the quotient is beta^2 - 1 = 168 (beta = 13).
  // Edge midpoints are never glued, so the discrete space is larger than the conforming one and
  // the discrete value approaches 168 from below.
  double l0 = first_eigenvalue(mats_at(0)), l1 = first_eigenvalue(mats_at(1));
  EXPECT_NEAR(l0, 81.988, 1e-2);
  EXPECT_NEAR(l1, 115.46, 1e-2);
  EXPECT_LT(l1, 168.0);
  EXPECT_LT(168.0 - l1, 0.7 * (168.0 - l0));
}

TEST(Locate, ConstantFieldEvaluatesToConstant) {
  const auto& m = mesh_at(1);
  PointLocator loc(m);
  Vector U(m.n_classes(), 2.5);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int k = 0; k < 50; ++k) {
    Vec3 X{u(rng), u(rng), u(rng)};
    Vec3 r = project(reduce_to_domain(lift(X)).point);
    EXPECT_NEAR(loc.eval(U, r), 2.5, 1e-12);
  }
}

TEST(Locate, ReproducesQuadraticsOnUngluedTets) {
  const auto& m = mesh_at(1);
  PointLocator loc(m);
  auto f = [](const Vec3& X) { return X.x * X.x + X.y - 0.5 * X.y * X.z; };
  Vector U = interpolate(m, f);
  auto tets = unglued_tets(m);
  ASSERT_FALSE(tets.empty());
  for (std::size_t t : tets) {
    TetGeometry g = TetGeometry::of(m, t);
    Vec3 X = g.point({0.1, 0.2, 0.3, 0.4});
    EXPECT_NEAR(loc.eval(U, X), f(X), 1e-12);
  }
}

TEST(Locate, EquivalentBoundaryVerticesGiveEqualValues) {
  const auto& m = mesh_at(1);
  PointLocator loc(m);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  Vector U(m.n_classes());
  for (auto& v : U) v = u(rng);
  for (std::size_t c = 0; c < m.n_classes(); ++c) {
    if (m.class_nodes[c].size() < 2) continue;
    for (int id : m.class_nodes[c]) EXPECT_NEAR(loc.eval(U, m.node(id)), U[c], 1e-10);
  }
}

TEST(Locate, FarPointIsALocationError) {
  PointLocator loc(mesh_at(0));
  EXPECT_THROW(loc.locate({0.9, 0.9, 0.9}), LocationError);
}

TEST(Delav, ConstantLinearAndQuadraticFields) {
  const auto& m = mesh_at(1);
  auto tets = unglued_tets(m);
  ASSERT_FALSE(tets.empty());
  Vector c = interpolate(m, [](const Vec3&) { return 3.0; });
  Vector x = interpolate(m, [](const Vec3& X) { return X.x; });
  Vector x2 = interpolate(m, [](const Vec3& X) { return X.x * X.x; });
  Vector xy = interpolate(m, [](const Vec3& X) { return X.x * X.y; });
  for (std::size_t t : tets) {
    Vec3 G = TetGeometry::of(m, t).centroid();
    EXPECT_NEAR(eval_delav(m, c, t), 0.0, 1e-10);
    EXPECT_NEAR(eval_delav(m, x, t), -3.0 * G.x, 1e-10);
    EXPECT_NEAR(eval_delav(m, x2, t), 2.0 - 8.0 * G.x * G.x, 1e-9);
    EXPECT_NEAR(eval_delav(m, xy, t), -8.0 * G.x * G.y, 1e-9);
  }
}
