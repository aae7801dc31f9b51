#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "dodecawave/horizon.hpp"
#include "dodecawave/mesh.hpp"
#include "dodecawave/sky.hpp"

using namespace dodecawave;

namespace {

const TetMeshP2& level1() {
  static const TetMeshP2 m = build_mesh(1);
  return m;
}

}  // namespace

TEST(Horizon, ComovingRadiusAtStartIsR) {
  for (const auto& model : {ScaleFactorModel::de_sitter(1.0), ScaleFactorModel::inflating()})
    EXPECT_DOUBLE_EQ(comoving_radius(model, 2.0, 0.07, 2.0).value, 0.07);
}

TEST(Horizon, PublishedRadii) {
  auto inf = ScaleFactorModel::inflating();
  auto ds = ScaleFactorModel::de_sitter(1.0);
  EXPECT_NEAR(horizon_radius(inf, 3.5, 0.1).value, 0.1300, 5e-5);
  EXPECT_NEAR(horizon_radius(inf, 1.5, 0.05).value, 0.2697, 1e-4);
  EXPECT_NEAR(horizon_radius(ds, 3.5, 0.05).value, 0.1102, 5e-5);
  auto big = horizon_radius(ds, 1.5, 0.05);
  EXPECT_NEAR(big.value, 0.4690, 5e-3);
  EXPECT_GT(big.value, r_max());
  EXPECT_FALSE(big.wrapped);
}

TEST(Horizon, HorizonIsLimitOfComovingRadius) {
  for (const auto& model : {ScaleFactorModel::de_sitter(1.0), ScaleFactorModel::de_sitter(2.0),
                            ScaleFactorModel::inflating()})
    EXPECT_NEAR(comoving_radius(model, 1.0, 0.1, 60.0).value, horizon_radius(model, 1.0, 0.1).value, 1e-12);
}

TEST(Horizon, MonotoneUpToWrap) {
  for (const auto& model : {ScaleFactorModel::de_sitter(1.0), ScaleFactorModel::inflating()}) {
    double prev = 0;
    for (double t = 0.0; t < 8.0; t += 0.05) {
      auto r = comoving_radius(model, 0.0, 0.2, t);
      if (r.wrapped) break;
      EXPECT_GE(r.value, prev);
      prev = r.value;
    }
  }
  EXPECT_TRUE(comoving_radius(ScaleFactorModel::de_sitter(1.0), 0.0, 0.9, 5.0).wrapped);
}

TEST(Horizon, CustomModelsUseQuadrature) {
  const double c = 3.0;
  auto flat = ScaleFactorModel::custom([c](double) { return c; }, [](double) { return 0.0; });
  EXPECT_NEAR(comoving_radius(flat, 1.0, 0.2, 2.5).value, std::sin(std::asin(0.2) + 1.5 / c), 1e-13);
  EXPECT_THROW(horizon_radius(flat, 1.0, 0.2), DomainError);
  auto expo = ScaleFactorModel::custom([](double t) { return std::exp(t); }, [](double t) { return std::exp(t); });
  EXPECT_NEAR(horizon_radius(expo, 1.5, 0.05).value, horizon_radius(ScaleFactorModel::inflating(), 1.5, 0.05).value,
              1e-9);
  auto ds = ScaleFactorModel::custom([](double t) { return std::cosh(t); }, [](double t) { return std::sinh(t); });
  EXPECT_NEAR(comoving_radius(ds, 0.5, 0.05, 2.0).value,
              comoving_radius(ScaleFactorModel::de_sitter(1.0), 0.5, 0.05, 2.0).value, 1e-12);
}

TEST(Circles, ThresholdIsStrict) {
  EXPECT_FALSE(circles_from_distance(d_max()).multiple_images);
  EXPECT_TRUE(circles_from_distance(std::nextafter(d_max(), 1.0)).multiple_images);
}

TEST(Circles, NamedModels) {
  auto ds = ScaleFactorModel::de_sitter(1.0);
  auto r = circles_condition(ds, 0.5, 2.0);
  EXPECT_NEAR(r.radius, std::sin(2 * std::atan(std::exp(2.0)) - 2 * std::atan(std::exp(0.5))), 1e-15);
  EXPECT_TRUE(r.multiple_images);
  // e^{-t_ls} - e^{-t_obs} = arcsin(0.6)
  double t_ls = 0.1, t_obs = -std::log(std::exp(-t_ls) - std::asin(0.6));
  auto c = circles_condition(ScaleFactorModel::inflating(), t_ls, t_obs);
  EXPECT_NEAR(c.radius, 0.6, 1e-12);
  EXPECT_TRUE(c.multiple_images);
  EXPECT_THROW(circles_condition(ds, 2.0, 1.0), UsageError);
}

TEST(Sky, ConstantFieldGivesConstantMap) {
  Vector U(level1().n_classes(), 2.5);
  auto map = sky_map(level1(), U, 0.7, 16, 32);
  for (double v : map.values) EXPECT_NEAR(v, 2.5 / 3.0, 1e-13);
  std::ostringstream tsv, pgm;
  write_sky_tsv(map, tsv);
  write_sky_pgm(map, pgm);
  std::istringstream in(tsv.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "theta\tphi\tvalue");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 16 * 32);
  std::string bytes = pgm.str();
  auto body = bytes.substr(bytes.size() - 2 * 16 * 32);
  EXPECT_TRUE(std::all_of(body.begin(), body.end(), [](char ch) { return ch == 0; }));
}

TEST(Sky, SmallSphereInsideCentralBump) {
  Bump b{{0, 0, 0}, 0.3, 10.0};
  Vector U = init_bump(level1(), {b});
  double chi = 0.1;
  auto map = sky_map(level1(), U, chi, 12, 24);
  double expect = bump_value(b, chi) / 3.0;
  for (double v : map.values) EXPECT_NEAR(v, expect, 2e-2 * expect);
}

TEST(Sky, ValueIndependentOfImage) {
  Vector U = init_bump(level1(), {{{0.1, -0.05, 0.02}, 0.2, 50.0}});
  SkySampler s(level1(), U);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  for (int k = 0; k < 50; ++k) {
    Quaternion p = Quaternion{n(rng), n(rng), n(rng), n(rng)}.normalized();
    double v = s(p);
    for (const auto& g : enumerate_group()) ASSERT_NEAR(s(g.q * p), v, 1e-9 * (1.0 + std::fabs(v)));
  }
}

TEST(Sky, MatchedCirclesLieOnBothSpheres) {
  double chi = std::asin(0.5);
  for (int k = 1; k <= 6; ++k) {
    const Quaternion& g = fundamental_domain().gluing(k).q;
    auto circle = matched_circle(g, chi, 24);
    ASSERT_EQ(circle.size(), 24u);
    for (const auto& p : circle) {
      EXPECT_NEAR(geodesic_distance(p, Quaternion{1, 0, 0, 0}), chi, 1e-12);
      EXPECT_NEAR(geodesic_distance(g * p, Quaternion{1, 0, 0, 0}), chi, 1e-12);
    }
  }
  EXPECT_TRUE(matched_circle(fundamental_domain().gluing(1).q, 0.3, 8).empty());  // 2 chi < pi/5
}

TEST(Sky, CircleResidualOfQuotientField) {
  Vector U = init_bump(level1(), random_bumps(5, 42));
  SkySampler s(level1(), U);
  auto map = sky_map(s, std::asin(0.5), 32, 64);
  auto r = circle_residual(s, map, 90);
  EXPECT_EQ(r.pairs, 6);
  EXPECT_GT(r.range, 0.0);
  EXPECT_LE(r.relative, 0.05);
}

TEST(Tiling, IdentityCellReproducesMesh) {
  Vector U = init_bump(level1(), {{{0, 0, 0}, 0.2, 1.0}});
  std::ostringstream os;
  tiling_export(level1(), U, {0}, os);
  std::istringstream in(os.str());
  std::string word;
  int idx;
  std::string chart;
  in >> word >> idx >> chart;
  EXPECT_EQ(word, "cell");
  EXPECT_EQ(idx, 0);
  EXPECT_EQ(chart, "upper");
  for (std::size_t v = 0; v < level1().n_vertices(); ++v) {
    double x, y, z, val;
    in >> word >> x >> y >> z >> val;
    ASSERT_EQ(word, "vertex");
    EXPECT_DOUBLE_EQ(x, level1().vertices[v].x);
    EXPECT_DOUBLE_EQ(val, U[level1().node_class[v]]);
  }
}

TEST(Tiling, NeighborCellsDoNotOverlap) {
  auto cells = neighbor_cells();
  ASSERT_EQ(cells.size(), 13u);
  const auto& G = binary_icosahedral_group();
  const auto& m = level1();
  for (std::size_t t = 0; t < m.tets.size(); t += 7) {
    Vec3 c{0, 0, 0};
    for (int k = 0; k < 4; ++k) c = c + m.vertices[m.tets[t][k]] * 0.25;
    for (int a : cells)
      for (int b : cells) {
        if (a == b) continue;
        Quaternion p = G[a].q * lift(c);
        EXPECT_NE(fundamental_domain().contains(G[b].q.conj() * p).where, Location::interior);
      }
  }
}

TEST(Tiling, SharedFacesCarryEqualValues) {
  Vector U = init_bump(level1(), random_bumps(3, 9));
  const auto& m = level1();
  const auto& G = binary_icosahedral_group();
  std::map<std::tuple<long, long, long>, double> identity_values;
  auto key = [](const Quaternion& p) {
    return std::tuple<long, long, long>{std::lround(p.x * 1e8), std::lround(p.y * 1e8), std::lround(p.z * 1e8)};
  };
  for (std::size_t v = 0; v < m.n_vertices(); ++v) identity_values[key(lift(m.vertices[v]))] = U[m.node_class[v]];
  int shared = 0;
  for (int k = 1; k <= 12; ++k) {
    const Quaternion& g = G.clifford(k).q;
    for (std::size_t v = 0; v < m.n_vertices(); ++v) {
      auto it = identity_values.find(key(g * lift(m.vertices[v])));
      if (it == identity_values.end()) continue;
      ++shared;
      EXPECT_NEAR(it->second, U[m.node_class[v]], 1e-12);
    }
  }
  EXPECT_GT(shared, 12 * 10);
}
