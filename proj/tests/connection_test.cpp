#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "kvg/connection.hpp"

namespace kvg {
namespace {

class ConnectionTest : public ::testing::Test {
 protected:
  ChartPtr chart = euclidean_chart(2, -1.5, 1.5);
  ProbeConfig cfg;

  Expr P(const std::string& s) const { return chart->parse(s); }
  VectorField V(const std::string& a, const std::string& b) const { return VectorField::parse(chart, {a, b}); }
  VectorField d(std::size_t i) const { return VectorField::coordinate(chart, i); }
  MetricField metric(const std::string& a, const std::string& b, const std::string& c) const {
    return MetricField::parse(chart, {a, b, b, c});
  }
};

TEST_F(ConnectionTest, FlatDerivatives) {
  auto flat = Connection::flat(chart);
  EXPECT_TRUE(fields_equal_probe(covariant_derivative(flat, d(0), V("0", "x")), d(1), cfg).pass);
  EXPECT_TRUE(fields_equal_probe(covariant_derivative(flat, d(0), d(1)), VectorField::zero(chart), cfg).pass);

  auto dx = OneForm::parse(chart, {"1", "0"});
  EXPECT_TRUE(fields_equal_probe(covariant_derivative(flat, d(0), dx), OneForm::zero(chart), cfg).pass);
  auto xdy = OneForm::parse(chart, {"0", "x"});
  auto r = fields_equal_probe(covariant_derivative(flat, d(0), xdy), OneForm::parse(chart, {"0", "1"}), cfg);
  EXPECT_TRUE(r.pass);

  auto h = metric("exp(x)", "0", "exp(y)").as_bilinear();
  EXPECT_EQ(covariant_derivative(flat, d(0), h)(d(0), d(0)), P("exp(x)"));
  auto constant = metric("2", "1", "3").as_bilinear();
  EXPECT_TRUE(fields_equal_probe(covariant_derivative(flat, V("x", "y^2"), constant), Bilinear::zero(chart), cfg).pass);
}

TEST_F(ConnectionTest, LeviCivitaOfDiagonalExponentialMetric) {
  auto lc = levi_civita(metric("exp(x)", "0", "exp(y)"));
  for (std::size_t k = 0; k < 2; ++k) {
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        double want = (k == i && i == j) ? 0.5 : 0.0;
        EXPECT_EQ(lc.gamma(k, i, j), Expr(want)) << k << i << j;
      }
    }
  }
  EXPECT_TRUE(fields_equal_probe(covariant_derivative(lc, d(0), d(0)), V("1/2", "0"), cfg).pass);
  // The metric is flat: u = 2 exp(x/2), v = 2 exp(y/2) are Euclidean coordinates.
  EXPECT_TRUE(flatness_probe(lc, cfg).pass);
  auto euclid = levi_civita(MetricField::euclidean(chart));
  for (const auto& g : euclid.christoffel().components()) EXPECT_TRUE(g.is_zero());
}

TEST_F(ConnectionTest, TorsionExamples) {
  EXPECT_TRUE(torsion_probe(Connection::flat(chart), cfg).pass);
  std::vector<std::string> s(8, "0");
  s[0 * 4 + 0 * 2 + 1] = "1";  // Gamma^1_{12}
  auto twisted = Connection::parse(chart, s);
  auto r = torsion_probe(twisted, cfg);
  EXPECT_FALSE(r.pass);
  EXPECT_GE(r.max_residual, 1e-3);
  EXPECT_EQ(torsion_tensor(twisted).components()[1], Expr(1.0));
  EXPECT_EQ(torsion_tensor(twisted).components()[2], Expr(-1.0));
  EXPECT_TRUE(torsion_probe(levi_civita(metric("2 + x^2", "x*y", "3 + y^2")), cfg).pass);
}

// Numeric Christoffels and curvature from central differences of the metric.
struct NumericGeometry {
  const MetricField& g;
  double h = 1e-4;

  std::array<double, 4> metric_at(std::array<double, 2> p) const {
    std::array<double, 4> out{};
    for (std::size_t k = 0; k < 4; ++k) out[k] = expr::evaluate(g.components()[k], p);
    return out;
  }

  std::array<double, 8> gamma_at(std::array<double, 2> p) const {
    std::array<std::array<double, 4>, 2> dg{};
    for (std::size_t l = 0; l < 2; ++l) {
      auto up = p;
      auto down = p;
      up[l] += h;
      down[l] -= h;
      auto a = metric_at(up);
      auto b = metric_at(down);
      for (std::size_t k = 0; k < 4; ++k) dg[l][k] = (a[k] - b[k]) / (2 * h);
    }
    auto m = metric_at(p);
    double det = m[0] * m[3] - m[1] * m[2];
    std::array<double, 4> inv = {m[3] / det, -m[1] / det, -m[2] / det, m[0] / det};
    std::array<double, 8> gam{};
    for (std::size_t k = 0; k < 2; ++k) {
      for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
          double s = 0;
          for (std::size_t l = 0; l < 2; ++l) {
            s += 0.5 * inv[k * 2 + l] * (dg[i][j * 2 + l] + dg[j][i * 2 + l] - dg[l][i * 2 + j]);
          }
          gam[(k * 2 + i) * 2 + j] = s;
        }
      }
    }
    return gam;
  }

  // R^k_{ijl}
  std::array<double, 16> riemann_at(std::array<double, 2> p) const {
    std::array<std::array<double, 8>, 2> dgam{};
    for (std::size_t l = 0; l < 2; ++l) {
      auto up = p;
      auto down = p;
      up[l] += h;
      down[l] -= h;
      auto a = gamma_at(up);
      auto b = gamma_at(down);
      for (std::size_t k = 0; k < 8; ++k) dgam[l][k] = (a[k] - b[k]) / (2 * h);
    }
    auto G = gamma_at(p);
    auto g3 = [&G](std::size_t k, std::size_t i, std::size_t j) { return G[(k * 2 + i) * 2 + j]; };
    std::array<double, 16> r{};
    for (std::size_t k = 0; k < 2; ++k) {
      for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
          for (std::size_t l = 0; l < 2; ++l) {
            double v = dgam[i][(k * 2 + j) * 2 + l] - dgam[j][(k * 2 + i) * 2 + l];
            for (std::size_t m = 0; m < 2; ++m) v += g3(k, i, m) * g3(m, j, l) - g3(k, j, m) * g3(m, i, l);
            r[((k * 2 + i) * 2 + j) * 2 + l] = v;
          }
        }
      }
    }
    return r;
  }
};

TEST_F(ConnectionTest, CurvatureMatchesFiniteDifferenceOracle) {
  for (const auto& g : {metric("1", "0", "exp(2*x)"), metric("exp(x) + exp(x+y)", "exp(x+y)", "exp(y) + exp(x+y)"),
                        metric("2 + x^2", "x*y", "3 + y^2")}) {
    auto lc = levi_civita(g);
    auto r = riemann_tensor(lc);
    NumericGeometry oracle{g};
    std::array<double, 2> p = {0.3, -0.4};
    auto num = oracle.riemann_at(p);
    double biggest = 0;
    for (std::size_t k = 0; k < 16; ++k) {
      double exact = expr::evaluate(r.components()[k], p);
      biggest = std::max(biggest, std::fabs(exact));
      EXPECT_NEAR(exact, num[k], 1e-5 * (1 + std::fabs(exact)));
    }
    EXPECT_GT(biggest, 0.01);
    EXPECT_FALSE(flatness_probe(lc, cfg).pass);
  }
}

TEST_F(ConnectionTest, GaussCurvatureOfHyperbolicMetric) {
  auto g = metric("1", "0", "exp(2*x)");
  auto r = riemann_tensor(levi_civita(g));
  // R_{1212} = g_{1k} R^k_{212}... with K = -1: R(d_x, d_y) d_y = K (g_yy d_x - g_xy d_y)
  const VectorField xyz[] = {d(0), d(1), d(1)};
  EXPECT_TRUE(fields_equal_probe(r(xyz), V("-exp(2*x)", "0"), cfg).pass);
}

TEST_F(ConnectionTest, CurvatureOperatorAgreesWithTensorAndIsAntisymmetric) {
  auto lc = levi_civita(metric("1 + x^2", "0", "1 + y^2 + x^2"));
  auto r = riemann_tensor(lc);
  auto agree = probe_identity(
      chart, 3,
      [&](std::span<const VectorField> f, Rng&) {
        return Comparison{curvature(lc, f[0], f[1], f[2]).components(), r(f).components()};
      },
      cfg, "curv");
  EXPECT_TRUE(agree.pass) << agree.max_residual;
  auto anti = probe_identity(
      chart, 3,
      [&](std::span<const VectorField> f, Rng&) {
        return Comparison{curvature(lc, f[0], f[1], f[2]).components(),
                          (-curvature(lc, f[1], f[0], f[2])).components()};
      },
      cfg, "anti");
  EXPECT_TRUE(anti.pass) << anti.max_residual;
  EXPECT_TRUE(flatness_probe(Connection::flat(chart), cfg).pass);
}

TEST_F(ConnectionTest, ConjugateConnections) {
  auto flat = Connection::flat(chart);
  auto g = MetricField::hessian_of(chart, P("exp(x) + exp(y)"));
  auto star = conjugate(flat, g);
  for (std::size_t k = 0; k < 2; ++k) {
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        EXPECT_EQ(star.gamma(k, i, j), Expr(k == i && i == j ? 1.0 : 0.0));
      }
    }
  }
  EXPECT_TRUE(conjugate_identity_probe(flat, star, g, cfg).pass);

  auto g2 = metric("2 + x^2", "x*y", "3 + y^2");
  auto lc = levi_civita(g2);
  EXPECT_TRUE(metric_compatibility_probe(lc, g2, cfg).pass);
  auto self = conjugate(lc, g2);
  EXPECT_LE(fields_equal_probe(self.christoffel(), lc.christoffel(), cfg).max_residual, 1e-10);

  std::vector<std::string> s = {"x", "0", "y", "1", "x*y", "0", "0", "y^2"};
  auto c = Connection::parse(chart, s);
  auto twice = conjugate(conjugate(c, g2), g2);
  EXPECT_LE(fields_equal_probe(twice.christoffel(), c.christoffel(), cfg).max_residual, 1e-10);
  EXPECT_TRUE(conjugate_identity_probe(c, conjugate(c, g2), g2, cfg).pass);

  auto mid = midpoint(flat, star);
  EXPECT_LE(fields_equal_probe(mid.christoffel(), levi_civita(g).christoffel(), cfg).max_residual, 1e-10);
}

TEST_F(ConnectionTest, CodazziCoupling) {
  auto flat = Connection::flat(chart);
  EXPECT_TRUE(codazzi_probe(MetricField::hessian_of(chart, P("exp(x) + exp(y)")).as_bilinear(), flat, cfg).pass);
  EXPECT_TRUE(codazzi_probe(metric("2", "1", "3").as_bilinear(), flat, cfg).pass);
  // Only d_x h_xx is nonzero, which is totally symmetric: this h is Hess(x^2/2 + x^4/12 + y^2/2).
  auto h1 = metric("1 + x^2", "0", "1");
  EXPECT_TRUE(codazzi_probe(h1.as_bilinear(), flat, cfg).pass);
  EXPECT_EQ(codazzi_residual(h1.as_bilinear(), flat, d(1), d(0), d(0)), Expr(0.0));
  EXPECT_EQ(codazzi_residual(h1.as_bilinear(), flat, d(0), d(1), d(1)), Expr(0.0));
  auto h2 = metric("1", "0", "1 + x^2");
  auto r = codazzi_probe(h2.as_bilinear(), flat, cfg);
  EXPECT_FALSE(r.pass);
  EXPECT_GE(r.max_residual, 1e-3);
  EXPECT_EQ(codazzi_residual(h2.as_bilinear(), flat, d(0), d(1), d(1)), P("2*x"));
}

TEST_F(ConnectionTest, GradientHessianLaplacian) {
  auto e = MetricField::euclidean(chart);
  EXPECT_TRUE(fields_equal_probe(gradient(P("x*y"), e), V("y", "x"), cfg).pass);
  EXPECT_EQ(laplacian(P("x*y"), e), Expr(0.0));
  EXPECT_EQ(laplacian(P("x^2"), e), Expr(2.0));

  auto plane = make_chart({"x", "y"}, {{-2, 2}, {-2, 2}}, {"x^2 + y^2 > 0"}, 1e-3);
  auto lap = laplacian(plane->parse("1/2*ln(x^2+y^2)"), MetricField::euclidean(plane));
  auto r = fields_equal_probe(plane, lap, Expr(0.0), cfg);
  EXPECT_LE(r.max_residual, 1e-10);

  auto lc = levi_civita(metric("2 + x^2", "x*y", "3 + y^2"));
  auto hs = hessian(P("exp(x)*sin(y)"), lc);
  EXPECT_LE(fields_equal_probe(hs, hs.transpose(), cfg).max_residual, 1e-12);
}

TEST_F(ConnectionTest, AffinePullbackIsFlatAndTorsionFree) {
  auto c = Connection::affine_pullback(chart, {P("x"), P("y + x^2")});
  EXPECT_EQ(c.gamma(1, 0, 0), Expr(2.0));
  EXPECT_TRUE(flatness_probe(c, cfg).pass);
  EXPECT_TRUE(torsion_probe(c, cfg).pass);
  auto chart3 = euclidean_chart(3);
  auto c3 = Connection::affine_pullback(chart3, {chart3->parse("x + y^2/2"), chart3->parse("y + x*z"),
                                                 chart3->parse("z + x^2")});
  EXPECT_TRUE(torsion_probe(c3, cfg).pass);
  EXPECT_TRUE(flatness_probe(c3, cfg).pass);
}

TEST_F(ConnectionTest, ParallelFields) {
  auto flat = Connection::flat(chart);
  EXPECT_TRUE(parallel_probe(flat, d(0), cfg).pass);
  EXPECT_FALSE(parallel_probe(flat, V("x", "0"), cfg).pass);
}

}  // namespace
}  // namespace kvg
