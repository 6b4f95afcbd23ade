#include "kvg/derham.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <utility>

namespace kvg {

namespace {

void tuples_rec(std::size_t n, std::size_t k, std::size_t start, std::vector<std::size_t>& cur,
                std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = start; i < n; ++i) {
    cur.push_back(i);
    tuples_rec(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

class TupleIndex {
 public:
  TupleIndex(std::size_t n, std::size_t k) : tuples_(increasing_tuples(n, k)) {
    for (std::size_t i = 0; i < tuples_.size(); ++i) index_[tuples_[i]] = i;
  }
  const std::vector<std::vector<std::size_t>>& tuples() const { return tuples_; }
  std::size_t operator()(const std::vector<std::size_t>& t) const { return index_.at(t); }

 private:
  std::vector<std::vector<std::size_t>> tuples_;
  std::map<std::vector<std::size_t>, std::size_t> index_;
};

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::vector<std::size_t> erase_at(const std::vector<std::size_t>& t, std::size_t pos) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (i != pos) out.push_back(t[i]);
  return out;
}

/// det[X_a^{I_b}].
Expr minor(std::span<const VectorField> args, const std::vector<std::size_t>& tuple) {
  const std::size_t k = tuple.size();
  if (k == 0) return Expr(1.0);
  std::vector<Expr> m(k * k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) m[a * k + b] = args[a][tuple[b]];
  return determinant(m, k);
}

std::vector<VectorField> without(std::span<const VectorField> args, std::size_t i, std::size_t j = SIZE_MAX) {
  std::vector<VectorField> out;
  for (std::size_t a = 0; a < args.size(); ++a)
    if (a != i && a != j) out.push_back(args[a]);
  return out;
}

Comparison vs_zero(const std::vector<Expr>& v) { return Comparison{v, std::vector<Expr>(v.size(), Expr(0.0))}; }

}  // namespace

std::vector<std::vector<std::size_t>> increasing_tuples(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  tuples_rec(n, k, 0, cur, out);
  return out;
}

// ---------------------------------------------------------------------------

ScalarForm::ScalarForm(ChartPtr chart, std::size_t degree, std::vector<Expr> components)
    : chart_(std::move(chart)), k_(degree), c_(std::move(components)) {
  if (!chart_) throw std::invalid_argument("form without chart");
  if (k_ > chart_->dimension()) throw DegreeOverflow("form degree exceeds dimension");
  if (c_.size() != binomial(chart_->dimension(), k_)) throw std::invalid_argument("form component count");
}

ScalarForm ScalarForm::zero(ChartPtr chart, std::size_t degree) {
  const std::size_t count = binomial(chart->dimension(), degree);
  return {std::move(chart), degree, std::vector<Expr>(count, Expr(0.0))};
}

Expr ScalarForm::operator()(std::span<const VectorField> args) const {
  if (args.size() != k_) throw std::invalid_argument("form arity");
  auto tuples = increasing_tuples(chart_->dimension(), k_);
  std::vector<Expr> terms;
  for (std::size_t t = 0; t < tuples.size(); ++t) terms.push_back(c_[t] * minor(args, tuples[t]));
  return sum(terms);
}

ScalarForm exterior_derivative(const ScalarForm& omega) {
  const std::size_t n = omega.chart()->dimension();
  const std::size_t k = omega.degree();
  if (k >= n) throw DegreeOverflow("exterior derivative of a top form");
  TupleIndex lower(n, k);
  auto upper = increasing_tuples(n, k + 1);
  std::vector<Expr> out;
  for (const auto& j : upper) {
    std::vector<Expr> terms;
    for (std::size_t a = 0; a <= k; ++a) {
      Expr t = differentiate(omega[lower(erase_at(j, a))], j[a]);
      terms.push_back(a % 2 == 0 ? t : -t);
    }
    out.push_back(sum(terms));
  }
  return {omega.chart(), k + 1, std::move(out)};
}

// ---------------------------------------------------------------------------

TwistedForm::TwistedForm(ChartPtr chart, std::size_t degree, std::vector<Expr> components)
    : chart_(std::move(chart)), k_(degree), c_(std::move(components)) {
  if (!chart_) throw std::invalid_argument("form without chart");
  n_ = chart_->dimension();
  if (k_ > n_) throw DegreeOverflow("form degree exceeds dimension");
  tuples_ = binomial(n_, k_);
  if (c_.size() != n_ * tuples_) throw std::invalid_argument("twisted form component count");
}

TwistedForm TwistedForm::zero(ChartPtr chart, std::size_t degree) {
  const std::size_t count = chart->dimension() * binomial(chart->dimension(), degree);
  return {std::move(chart), degree, std::vector<Expr>(count, Expr(0.0))};
}

TwistedForm TwistedForm::from_vector_field(const VectorField& s) { return {s.chart(), 0, s.components()}; }

TwistedForm TwistedForm::from_scalar_forms(std::span<const ScalarForm> parts) {
  if (parts.empty()) throw std::invalid_argument("no parts");
  const auto& chart = parts[0].chart();
  if (parts.size() != chart->dimension()) throw std::invalid_argument("one part per target index");
  std::vector<Expr> c;
  for (const auto& p : parts) {
    require_same_chart(chart, p.chart());
    if (p.degree() != parts[0].degree()) throw std::invalid_argument("parts of different degree");
    c.insert(c.end(), p.components().begin(), p.components().end());
  }
  return {chart, parts[0].degree(), std::move(c)};
}

TwistedForm TwistedForm::with(std::size_t m, std::span<const std::size_t> lower, const Expr& value) const {
  TupleIndex index(n_, k_);
  std::vector<Expr> c = c_;
  c[m * tuples_ + index(std::vector<std::size_t>(lower.begin(), lower.end()))] = value;
  return {chart_, k_, std::move(c)};
}

ScalarForm TwistedForm::part(std::size_t m) const {
  return {chart_, k_, std::vector<Expr>(c_.begin() + m * tuples_, c_.begin() + (m + 1) * tuples_)};
}

VectorField TwistedForm::operator()(std::span<const VectorField> args) const {
  if (args.size() != k_) throw std::invalid_argument("twisted form arity");
  for (const auto& a : args) require_same_chart(chart_, a.chart());
  auto tuples = increasing_tuples(n_, k_);
  std::vector<Expr> minors;
  for (const auto& t : tuples) minors.push_back(minor(args, t));
  std::vector<Expr> out(n_);
  for (std::size_t m = 0; m < n_; ++m) {
    std::vector<Expr> terms;
    for (std::size_t t = 0; t < tuples_; ++t) terms.push_back(at(m, t) * minors[t]);
    out[m] = sum(terms);
  }
  return {chart_, std::move(out)};
}

TwistedForm operator-(const TwistedForm& a, const TwistedForm& b) {
  require_same_chart(a.chart(), b.chart());
  if (a.degree() != b.degree()) throw std::invalid_argument("twisted form degrees differ");
  std::vector<Expr> c(a.components().size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.components()[i] - b.components()[i];
  return {a.chart(), a.degree(), std::move(c)};
}

// ---------------------------------------------------------------------------

TwistedForm d_nabla(const Connection& c, const TwistedForm& theta) {
  require_same_chart(c.chart(), theta.chart());
  const std::size_t n = theta.dimension();
  const std::size_t k = theta.degree();
  if (k >= n) throw DegreeOverflow("d_nabla of a top-degree form");
  TupleIndex lower(n, k);
  auto upper = increasing_tuples(n, k + 1);
  std::vector<Expr> out(n * upper.size());
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t u = 0; u < upper.size(); ++u) {
      const auto& j = upper[u];
      std::vector<Expr> terms;
      for (std::size_t a = 0; a <= k; ++a) {
        const std::size_t rest = lower(erase_at(j, a));
        std::vector<Expr> part{differentiate(theta.at(m, rest), j[a])};
        for (std::size_t l = 0; l < n; ++l) part.push_back(c.gamma(m, j[a], l) * theta.at(l, rest));
        Expr t = sum(part);
        terms.push_back(a % 2 == 0 ? t : -t);
      }
      out[m * upper.size() + u] = sum(terms);
    }
  }
  return {theta.chart(), k + 1, std::move(out)};
}

VectorField d_nabla_apply(const Connection& c, const TwistedForm& theta, std::span<const VectorField> args) {
  const std::size_t k = theta.degree();
  if (args.size() != k + 1) throw std::invalid_argument("d_nabla_apply arity");
  VectorField out = VectorField::zero(theta.chart());
  for (std::size_t i = 0; i <= k; ++i) {
    auto rest = without(args, i);
    VectorField t = covariant_derivative(c, args[i], theta(rest));
    out = (i % 2 == 0) ? out + t : out - t;
  }
  for (std::size_t i = 0; i <= k; ++i) {
    for (std::size_t j = i + 1; j <= k; ++j) {
      std::vector<VectorField> rest{lie_bracket(args[i], args[j])};
      auto others = without(args, i, j);
      rest.insert(rest.end(), others.begin(), others.end());
      VectorField t = theta(rest);
      out = ((i + j) % 2 == 0) ? out + t : out - t;
    }
  }
  return out;
}

TwistedForm curvature_wedge(const Connection& c, const TwistedForm& theta) {
  require_same_chart(c.chart(), theta.chart());
  const std::size_t n = theta.dimension();
  const std::size_t k = theta.degree();
  if (k + 2 > n) throw DegreeOverflow("R ^ theta exceeds the dimension");
  TensorField r = riemann_tensor(c);
  const auto& rc = r.components();
  TupleIndex lower(n, k);
  auto upper = increasing_tuples(n, k + 2);
  std::vector<Expr> out(n * upper.size());
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t u = 0; u < upper.size(); ++u) {
      const auto& j = upper[u];
      std::vector<Expr> terms;
      for (std::size_t p = 0; p < j.size(); ++p) {
        for (std::size_t q = p + 1; q < j.size(); ++q) {
          const std::size_t rest = lower(erase_at(erase_at(j, q), p));
          const bool negative = (p + q - 1) % 2 == 1;
          for (std::size_t l = 0; l < n; ++l) {
            Expr t = rc[((m * n + j[p]) * n + j[q]) * n + l] * theta.at(l, rest);
            terms.push_back(negative ? -t : t);
          }
        }
      }
      out[m * upper.size() + u] = sum(terms);
    }
  }
  return {theta.chart(), k + 2, std::move(out)};
}

EqualityReport curvature_identity_probe(const Connection& c, const TwistedForm& theta, const ProbeConfig& cfg) {
  TwistedForm lhs = d_nabla(c, d_nabla(c, theta));
  TwistedForm rhs = curvature_wedge(c, theta);
  const Comparison groups[] = {{lhs.components(), rhs.components()}};
  return compare_on(groups, probe_points(*theta.chart(), cfg), cfg);
}

EqualityReport d_nabla_formula_probe(const Connection& c, const TwistedForm& theta, const ProbeConfig& cfg) {
  TwistedForm d = d_nabla(c, theta);
  return probe_identity(
      theta.chart(), theta.degree() + 1,
      [&](std::span<const VectorField> x, Rng&) {
        return Comparison{d(x).components(), d_nabla_apply(c, theta, x).components()};
      },
      cfg, "dnabla/formula");
}

EqualityReport d_nabla_display_probe(const Connection& c, const TwistedForm& theta, const ProbeConfig& cfg) {
  if (theta.degree() != 1) throw std::invalid_argument("the two-argument display is for 1-forms");
  TwistedForm d = d_nabla(c, theta);
  return probe_identity(
      theta.chart(), 2,
      [&](std::span<const VectorField> x, Rng&) {
        const VectorField &a = x[0], &b = x[1];
        VectorField display = covariant_derivative(c, a, theta({b})) - covariant_derivative(c, b, theta({a})) -
                              theta({lie_bracket(a, b)});
        return Comparison{d(x).components(), display.components()};
      },
      cfg, "dnabla/display");
}

EqualityReport antisymmetry_probe(const Connection& c, const TwistedForm& theta, const ProbeConfig& cfg) {
  const std::size_t arity = theta.degree() + 1;
  return probe_identity(
      theta.chart(), arity,
      [&](std::span<const VectorField> x, Rng&) {
        Comparison out;
        VectorField base = d_nabla_apply(c, theta, x);
        for (std::size_t i = 0; i + 1 < arity; ++i) {
          std::vector<VectorField> swapped(x.begin(), x.end());
          std::swap(swapped[i], swapped[i + 1]);
          auto lhs = d_nabla_apply(c, theta, swapped).components();
          auto rhs = (-base).components();
          out.lhs.insert(out.lhs.end(), lhs.begin(), lhs.end());
          out.rhs.insert(out.rhs.end(), rhs.begin(), rhs.end());
        }
        if (out.lhs.empty()) out = Comparison{base.components(), base.components()};
        return out;
      },
      cfg, "dnabla/antisymmetry");
}

EqualityReport scalar_decomposition_probe(const Connection& c, const TwistedForm& theta, const ProbeConfig& cfg) {
  TwistedForm d = d_nabla(c, theta);
  std::vector<Comparison> groups;
  for (std::size_t m = 0; m < theta.dimension(); ++m)
    groups.push_back({d.part(m).components(), exterior_derivative(theta.part(m)).components()});
  return compare_on(groups, probe_points(*theta.chart(), cfg), cfg);
}

TwistedForm random_twisted_form(const ChartPtr& chart, std::size_t degree, int poly_degree, Rng& rng) {
  const std::size_t n = chart->dimension();
  std::vector<Expr> c(n * binomial(n, degree));
  for (auto& e : c) e = random_polynomial(n, poly_degree, rng);
  return {chart, degree, std::move(c)};
}

// ---------------------------------------------------------------------------

CommutingCheck commuting_lemma_check(const VectorField& x, const ProbeConfig& cfg) {
  const auto& chart = x.chart();
  const std::size_t n = chart->dimension();
  PointSet points = probe_points(*chart, cfg);
  std::vector<Comparison> coordinate;
  for (std::size_t j = 0; j < n; ++j)
    coordinate.push_back(vs_zero(lie_bracket(x, VectorField::coordinate(chart, j)).components()));
  std::vector<Expr> euler_c;
  for (std::size_t j = 0; j < n; ++j) euler_c.push_back(Expr::variable(j));
  VectorField euler(chart, euler_c);
  VectorField br = lie_bracket(x, euler);
  const Comparison euler_zero[] = {vs_zero(br.components())};
  const Comparison euler_identity[] = {{br.components(), x.components()}};
  const Comparison vanishing[] = {vs_zero(x.components())};
  return CommutingCheck{compare_on(coordinate, points, cfg), compare_on(euler_zero, points, cfg),
                        compare_on(euler_identity, points, cfg), compare_on(vanishing, points, cfg)};
}

}  // namespace kvg
