#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "dodecawave/domain.hpp"

using namespace dodecawave;

namespace {

Quaternion random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return Quaternion{n(rng), n(rng), n(rng), n(rng)}.normalized();
}

}  // namespace

TEST(Quaternion, HamiltonProduct) {
  Quaternion i{0, 1, 0, 0}, j{0, 0, 1, 0}, k{0, 0, 0, 1};
  EXPECT_LT(max_abs_diff(i * j, k), 1e-15);
  EXPECT_LT(max_abs_diff(j * i, -k), 1e-15);
  EXPECT_LT(max_abs_diff(i * i, Quaternion{-1, 0, 0, 0}), 1e-15);
}

TEST(Quaternion, NormIsMultiplicative) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n;
  for (int t = 0; t < 100; ++t) {
    Quaternion a{n(rng), n(rng), n(rng), n(rng)}, b{n(rng), n(rng), n(rng), n(rng)};
    EXPECT_NEAR((a * b).norm(), a.norm() * b.norm(), 1e-12 * a.norm() * b.norm());
  }
}

TEST(Group, HasOneHundredTwentyDistinctUnitElements) {
  const auto& G = enumerate_group();
  ASSERT_EQ(G.size(), 120u);
  for (std::size_t a = 0; a < G.size(); ++a) {
    EXPECT_NEAR(G[a].q.norm(), 1.0, 1e-15);
    EXPECT_EQ(G[a].index, static_cast<int>(a));
    for (std::size_t b = a + 1; b < G.size(); ++b) EXPECT_GT(max_abs_diff(G[a].q, G[b].q), 1e-3);
  }
}

TEST(Group, ClosedUnderProductsWithInverses) {
  const auto& group = binary_icosahedral_group();
  for (const auto& a : group.elements()) {
    EXPECT_GE(group.find(a.q.conj()), 0);
    for (const auto& b : group.elements()) ASSERT_GE(group.find(a.q * b.q, 1e-12), 0);
  }
}

TEST(Group, ContainsUnitsAndIdentityFirst) {
  const auto& group = binary_icosahedral_group();
  EXPECT_LT(max_abs_diff(group[0].q, Quaternion{1, 0, 0, 0}), 1e-15);
  for (const Quaternion& u : {Quaternion{1, 0, 0, 0}, Quaternion{0, 1, 0, 0}, Quaternion{0, 0, 1, 0},
                              Quaternion{0, 0, 0, 1}}) {
    EXPECT_GE(group.find(u), 0);
    EXPECT_GE(group.find(-u), 0);
  }
}

TEST(Group, CliffordTranslations) {
  auto g = clifford_translations();
  const double s = kSigma;
  EXPECT_LT(max_abs_diff(g[1].q, Quaternion{s / 2, 0.5, 0, -0.5 / s}), 1e-15);
  for (int i = 0; i < 6; ++i) {
    EXPECT_LT(max_abs_diff(g[i].q * g[i + 6].q, Quaternion{1, 0, 0, 0}), 1e-15);
    EXPECT_LT(max_abs_diff(g[i + 6].q, g[i].q.conj()), 1e-15);
  }
  for (int i = 0; i < 12; ++i) {
    EXPECT_EQ(g[i].clifford, i + 1);
    EXPECT_NEAR(g[i].q.w, s / 2, 1e-15);
    EXPECT_NEAR(g[i].q.norm(), 1.0, 1e-15);
  }
}

TEST(Domain, VerticesAreUnitWithCommonHeight) {
  const auto& F = fundamental_domain();
  for (int k = 1; k <= 20; ++k) {
    EXPECT_NEAR(F.vertex(k).norm(), 1.0, 1e-15);
    EXPECT_NEAR(F.vertex(k).w, kSigma * kSigma / (2 * std::sqrt(2.0)), 1e-15);
  }
}

TEST(Domain, LeftActionReproducesAllThirtyVertexImages) {
  const auto& F = fundamental_domain();
  auto g = clifford_translations();
  for (const auto& im : kVertexImages) {
    Quaternion got = g[im[0] - 1].q * F.vertex(im[1]);
    EXPECT_LT(max_abs_diff(got, F.vertex(im[2])), 1e-12) << "g" << im[0] << "(S" << im[1] << ")";
  }
}

TEST(Domain, RightActionFailsTheVertexImages) {
  const auto& F = fundamental_domain();
  auto g = clifford_translations();
  int matches = 0;
  for (const auto& im : kVertexImages)
    if (max_abs_diff(F.vertex(im[1]) * g[im[0] - 1].q, F.vertex(im[2])) < 1e-9) ++matches;
  EXPECT_EQ(matches, 0);
}

TEST(Domain, GluingMapsFaceCyclesInOrder) {
  const auto& F = fundamental_domain();
  for (int k = 1; k <= 12; ++k) {
    const auto& src = F.face(k);
    const auto& dst = F.face(F.partner(k));
    for (int m = 0; m < 5; ++m)
      EXPECT_LT(max_abs_diff(F.gluing(k).q * F.vertex(src[m]), F.vertex(dst[m])), 1e-12);
  }
}

TEST(Domain, FaceVerticesLieOnTheirPlanes) {
  const auto& F = fundamental_domain();
  for (int k = 1; k <= 12; ++k) {
    for (int v : F.face(k)) EXPECT_NEAR(F.normal(k).dot(F.vertex(v)), 0.0, 1e-15);
    EXPECT_GT(F.normal(k).w, 0.0);
  }
}

TEST(Domain, Constants) {
  EXPECT_NEAR(d_max(), 0.388139515, 1e-9);
  EXPECT_NEAR(r_max(), 0.378466979, 1e-9);
  EXPECT_NEAR(geodesic_distance(Quaternion{1, 0, 0, 0}, fundamental_domain().vertex(1)), d_max(), 1e-15);
}

TEST(Domain, GeodesicDistance) {
  Quaternion x = Quaternion{0.3, -0.2, 0.5, 0.1}.normalized();
  EXPECT_EQ(geodesic_distance(x, x), 0.0);
  EXPECT_NEAR(geodesic_distance(x, -x), M_PI, 1e-15);
  EXPECT_THROW(geodesic_distance(Quaternion{2, 0, 0, 0}, x), DomainError);
}

TEST(Domain, LiftAndProject) {
  EXPECT_LT(max_abs_diff(lift({0, 0, 0}), Quaternion{1, 0, 0, 0}), 1e-16);
  Vec3 p = project(fundamental_domain().vertex(2));
  const double c = 1 / (2 * std::sqrt(2.0));
  EXPECT_NEAR(p.x, c, 1e-16);
  EXPECT_NEAR(p.y, c / (kSigma * kSigma), 1e-16);
  EXPECT_NEAR(p.z, 0.0, 1e-16);
  Vec3 X{0.1, 0.2, 0.05};
  Vec3 Y = project(lift(X));
  EXPECT_NEAR((X - Y).norm(), 0.0, 1e-14);
  EXPECT_THROW(lift({1, 1, 0}), DomainError);
}

TEST(Domain, Contains) {
  const auto& F = fundamental_domain();
  EXPECT_EQ(F.contains({1, 0, 0, 0}).where, Location::interior);
  EXPECT_EQ(F.contains(F.vertex(1)).where, Location::vertex);
  Quaternion bary{};
  for (int v : F.face(1)) bary = bary + F.vertex(v);
  auto c = F.contains(bary.normalized());
  EXPECT_EQ(c.where, Location::face);
  EXPECT_EQ(c.faces[0], 1);
  auto e = F.contains((F.vertex(3) + F.vertex(18)).normalized());
  EXPECT_EQ(e.where, Location::edge);
  EXPECT_EQ(F.contains({-1, 0, 0, 0}).where, Location::outside);
}

TEST(Domain, EveryVertexLiesOnThreeFaces) {
  const auto& F = fundamental_domain();
  for (int k = 1; k <= 20; ++k) EXPECT_EQ(F.contains(F.vertex(k)).n_faces, 3);
}

TEST(Reduce, InteriorPointIsFixed) {
  Quaternion x = lift({0.05, -0.1, 0.02});
  auto r = reduce_to_domain(x);
  EXPECT_EQ(r.tau, 0);
  EXPECT_LT(max_abs_diff(r.point, x), 1e-15);
}

TEST(Reduce, UndoesAGluingTranslation) {
  Quaternion y = lift({0.05, -0.1, 0.02});
  const auto& group = binary_icosahedral_group();
  auto r = reduce_to_domain(group.clifford(7).q * y);
  EXPECT_EQ(r.tau, group.clifford(1).index);
  EXPECT_LT(max_abs_diff(r.point, y), 1e-14);
}

TEST(Reduce, RandomSampleAlwaysReducesAndIsWellDefined) {
  std::mt19937_64 rng(11);
  const auto& G = enumerate_group();
  const auto& F = fundamental_domain();
  for (int t = 0; t < 1000; ++t) {
    Quaternion x = random_unit(rng);
    auto r = reduce_to_domain(x);
    EXPECT_NE(F.contains(r.point).where, Location::outside);
    EXPECT_LT(max_abs_diff(G[r.tau].q * x, r.point), 1e-14);
    if (t % 10 == 0)
      for (const auto& tau : G) EXPECT_LT(max_abs_diff(reduce_to_domain(tau.q * x).point, r.point), 1e-12);
  }
}

TEST(Reduce, EquivalentBoundaryPointsShareARepresentative) {
  const auto& F = fundamental_domain();
  for (int k = 1; k <= 20; ++k) {
    auto members = boundary_class(F.vertex(k));
    Quaternion first = reduce_to_domain(members[0]).point;
    for (const auto& m : members) EXPECT_LT(max_abs_diff(reduce_to_domain(m).point, first), 1e-12);
  }
}

TEST(BoundaryPartner, VertexClassOfS3) {
  const auto& F = fundamental_domain();
  auto cls = boundary_partner(project(F.vertex(3)));
  ASSERT_EQ(cls.size(), 4u);
  for (int k : {3, 6, 1, 4}) {
    Vec3 p = project(F.vertex(k));
    bool found = false;
    for (const auto& m : cls) found = found || (m - p).norm() < 1e-12;
    EXPECT_TRUE(found) << "S" << k;
  }
}

TEST(BoundaryPartner, ClassSizesByStratum) {
  const auto& F = fundamental_domain();
  Quaternion bary{};
  for (int v : F.face(4)) bary = bary + F.vertex(v);
  EXPECT_EQ(boundary_partner(project(bary.normalized())).size(), 2u);
  Quaternion edge = (F.vertex(3) * 0.3 + F.vertex(18) * 0.7).normalized();
  EXPECT_EQ(boundary_partner(project(edge)).size(), 3u);
  for (int k = 1; k <= 20; ++k) EXPECT_EQ(boundary_class(F.vertex(k)).size(), 4u);
  EXPECT_THROW(boundary_partner({0.01, 0, 0}), DomainError);
}

TEST(Domain, BoundaryRadiusBoundedByRmax) {
  const auto& F = fundamental_domain();
  double worst = 0;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int k = 1; k <= 12; ++k) {
    const auto& f = F.face(k);
    for (int s = 0; s < 2000; ++s) {
      double a = u(rng), b = u(rng), c = u(rng), d = u(rng), e = u(rng);
      Quaternion p = F.vertex(f[0]) * a + F.vertex(f[1]) * b + F.vertex(f[2]) * c + F.vertex(f[3]) * d +
                     F.vertex(f[4]) * e;
      worst = std::max(worst, project(p.normalized()).norm());
    }
  }
  EXPECT_LE(worst, r_max() + 1e-12);
  EXPECT_NEAR(project(F.vertex(1)).norm(), r_max(), 1e-15);
}

TEST(Export, GroupTableHasOneLinePerElement) {
  std::ostringstream os;
  binary_icosahedral_group().write(os);
  std::istringstream is(os.str());
  int n = 0, idx;
  double w, x, y, z;
  while (is >> idx >> w >> x >> y >> z) {
    EXPECT_EQ(idx, n);
    EXPECT_EQ(Quaternion(w, x, y, z).w, enumerate_group()[n].q.w);
    ++n;
  }
  EXPECT_EQ(n, 120);
}
