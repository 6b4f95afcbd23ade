#include <gtest/gtest.h>

#include <cmath>

#include "kvg/fields.hpp"

namespace kvg {
namespace {

class FieldsTest : public ::testing::Test {
 protected:
  ChartPtr chart = euclidean_chart(2, -1.5, 1.5);
  ChartPtr plane = make_chart({"x", "y"}, {{-2, 2}, {-2, 2}}, {"x^2 + y^2 > 0"}, 1e-3);
  ProbeConfig cfg;

  Expr P(const std::string& s) const { return chart->parse(s); }
  VectorField V(const std::string& a, const std::string& b) const { return VectorField::parse(chart, {a, b}); }
};

TEST_F(FieldsTest, ApplyExamples) {
  EXPECT_EQ(vf_apply(V("1", "0"), P("x^2+y^2")), P("2*x"));
  EXPECT_EQ(vf_apply(VectorField::zero(chart), P("exp(x*y)")), Expr(0.0));

  auto radial = VectorField::parse(plane, {"x", "y"});
  Expr f = plane->parse("1/2*ln(x^2+y^2)");
  auto r = fields_equal_probe(plane, vf_apply(radial, f), Expr(1.0), cfg);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.max_residual, 1e-14);
}

TEST_F(FieldsTest, BracketExamples) {
  auto dx = VectorField::coordinate(chart, 0);
  auto dy = VectorField::coordinate(chart, 1);
  EXPECT_TRUE(fields_equal_probe(lie_bracket(dx, dy), VectorField::zero(chart), cfg).pass);
  EXPECT_TRUE(fields_equal_probe(lie_bracket(dx, V("x", "0")), dx, cfg).pass);

  auto a = V("0", "x");
  auto b = V("y", "0");
  auto br = lie_bracket(a, b);
  EXPECT_TRUE(fields_equal_probe(br, V("x", "-y"), cfg).pass);

  // X(Yf) - Y(Xf) on random f
  Rng rng(3);
  for (int t = 0; t < 5; ++t) {
    Expr f = random_polynomial(2, 3, rng);
    Expr lhs = vf_apply(br, f);
    Expr rhs = vf_apply(a, vf_apply(b, f)) - vf_apply(b, vf_apply(a, f));
    EXPECT_LE(fields_equal_probe(chart, lhs, rhs, cfg).max_residual, 1e-13);
  }
}

TEST_F(FieldsTest, BracketIsAntisymmetricAndSatisfiesJacobi) {
  ProbeConfig c = cfg;
  c.tolerance = 1e-10;
  auto anti = probe_identity(
      chart, 2,
      [](std::span<const VectorField> f, Rng&) {
        return Comparison{lie_bracket(f[0], f[1]).components(), (-lie_bracket(f[1], f[0])).components()};
      },
      c, "anti");
  EXPECT_TRUE(anti.pass) << anti.max_residual;
  auto jacobi = probe_identity(
      chart, 3,
      [&](std::span<const VectorField> f, Rng&) {
        auto s = lie_bracket(f[0], lie_bracket(f[1], f[2])) + lie_bracket(f[1], lie_bracket(f[2], f[0])) +
                 lie_bracket(f[2], lie_bracket(f[0], f[1]));
        return Comparison{s.components(), VectorField::zero(chart).components()};
      },
      c, "jacobi");
  EXPECT_TRUE(jacobi.pass) << jacobi.max_residual;
}

TEST_F(FieldsTest, ApplyIsADerivation) {
  ProbeConfig c = cfg;
  c.tolerance = 1e-10;
  auto r = probe_identity(
      chart, 1,
      [](std::span<const VectorField> f, Rng& rng) {
        Expr a = random_polynomial(2, 2, rng);
        Expr b = random_polynomial(2, 2, rng);
        return Comparison{{vf_apply(f[0], a * b)}, {vf_apply(f[0], a) * b + a * vf_apply(f[0], b)}};
      },
      c, "leibniz");
  EXPECT_TRUE(r.pass) << r.max_residual;
}

TEST_F(FieldsTest, SharpExamples) {
  auto e = MetricField::euclidean(chart);
  auto dx = OneForm::parse(chart, {"1", "0"});
  EXPECT_TRUE(fields_equal_probe(sharp(dx, e), VectorField::coordinate(chart, 0), cfg).pass);
  EXPECT_TRUE(fields_equal_probe(sharp(OneForm::zero(chart), e), VectorField::zero(chart), cfg).pass);

  auto g = MetricField::parse(chart, {"exp(x)", "0", "0", "exp(y)"});
  auto s = sharp(dx, g);
  EXPECT_TRUE(fields_equal_probe(s, V("exp(-x)", "0"), cfg).pass);
  auto r = probe_identity(
      chart, 1,
      [&](std::span<const VectorField> f, Rng&) { return Comparison{{g(s, f[0])}, {dx(f[0])}}; }, cfg, "sharp");
  EXPECT_TRUE(r.pass);
}

TEST_F(FieldsTest, SharpInvertsFlat) {
  auto g = MetricField::parse(chart, {"2 + x^2", "x*y", "x*y", "3 + y^2"});
  Rng rng(8);
  for (int t = 0; t < 5; ++t) {
    auto w = random_one_form(chart, 2, rng);
    auto back = flat(sharp(w, g), g);
    auto r = fields_equal_probe(back, w, cfg);
    EXPECT_LE(r.max_residual, 1e-12);
  }
}

TEST_F(FieldsTest, EqualityProbeBasics) {
  auto a = V("x*y", "exp(x)");
  auto same = fields_equal_probe(a, a, cfg);
  EXPECT_TRUE(same.pass);
  EXPECT_LE(same.max_residual, 1e-12);
  EXPECT_EQ(same.sample_count, 100U);
  for (std::size_t i = 0; i < same.points.size(); ++i) EXPECT_TRUE(chart->contains(same.points[i]));

  auto diff = fields_equal_probe(VectorField::coordinate(chart, 0), VectorField::coordinate(chart, 1), cfg);
  EXPECT_FALSE(diff.pass);
  EXPECT_GE(diff.max_residual, 0.4);
}

TEST_F(FieldsTest, ReportsAreDeterministicAndBackendIndependent) {
  auto identity = [](std::span<const VectorField> f, Rng&) {
    return Comparison{lie_bracket(f[0], f[1]).components(), (f[0] + f[1]).components()};
  };
  auto a = probe_identity(chart, 2, identity, cfg, "det");
  auto b = probe_identity(chart, 2, identity, cfg, "det");
  EXPECT_TRUE(a == b);
  ProbeConfig serial = cfg;
  serial.backend = Backend::Serial;
  auto c = probe_identity(chart, 2, identity, serial, "det");
  EXPECT_TRUE(a == c);
  ProbeConfig other = cfg;
  other.seed = 43;
  EXPECT_FALSE(a == probe_identity(chart, 2, identity, other, "det"));
}

TEST_F(FieldsTest, MetricChecks) {
  EXPECT_THROW(MetricField::parse(chart, {"1", "0", "0", "0"}), SingularMetric);
  EXPECT_THROW(MetricField::parse(chart, {"1", "x", "y", "1"}), std::invalid_argument);
  auto g = MetricField::parse(chart, {"exp(x)", "0", "0", "exp(y)"});
  EXPECT_TRUE(g.positive_definite_at(chart->sample(50, 1)));
  auto lorentz = MetricField::parse(chart, {"-1", "0", "0", "1"});
  EXPECT_FALSE(lorentz.positive_definite_at(chart->sample(50, 1)));

  auto h = MetricField::hessian_of(chart, P("exp(x) + exp(y)"));
  EXPECT_EQ(h(0, 0), P("exp(x)"));
  EXPECT_TRUE(h(0, 1).is_zero());

  auto chart3 = euclidean_chart(3);
  auto g3 = MetricField::parse(chart3, {"2", "x", "0", "x", "2", "y", "0", "y", "2"});
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      std::vector<Expr> terms;
      for (int k = 0; k < 3; ++k) terms.push_back(g3(i, k) * g3.inverse(k, j));
      auto r = fields_equal_probe(chart3, sum(terms), Expr(i == j ? 1.0 : 0.0), cfg);
      EXPECT_LE(r.max_residual, 1e-14);
    }
  }
}

TEST_F(FieldsTest, ChartMismatchIsReported) {
  auto other = euclidean_chart(2);
  EXPECT_THROW(lie_bracket(VectorField::coordinate(chart, 0), VectorField::coordinate(other, 0)), ChartMismatch);
  EXPECT_THROW(VectorField(chart, {Expr(1.0)}), std::invalid_argument);
}

TEST_F(FieldsTest, TensorApplication) {
  // T(X, Y) = X^1 Y^2 d_x
  std::vector<Expr> c(8);
  c[0 * 4 + 0 * 2 + 1] = Expr(1.0);
  TensorField t(chart, 2, c);
  const VectorField args[] = {V("x", "1"), V("2", "y")};
  EXPECT_TRUE(fields_equal_probe(t(args), V("x*y", "0"), cfg).pass);
}

}  // namespace
}  // namespace kvg
