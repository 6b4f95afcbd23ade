#include "kvg/fields.hpp"

#include <cmath>

namespace kvg {

void require_same_chart(const ChartPtr& a, const ChartPtr& b) {
  if (a.get() != b.get()) throw ChartMismatch();
}

namespace {

void check_count(const ChartPtr& chart, std::size_t got, std::size_t want, const char* what) {
  if (!chart) throw std::invalid_argument(std::string(what) + " needs a chart");
  if (got != want) {
    throw std::invalid_argument(std::string(what) + " has " + std::to_string(got) + " components, expected " +
                                std::to_string(want));
  }
}

std::vector<Expr> parse_all(const ChartPtr& chart, const std::vector<std::string>& text) {
  std::vector<Expr> out;
  out.reserve(text.size());
  for (const auto& s : text) out.push_back(chart->parse(s));
  return out;
}

std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// VectorField

VectorField::VectorField(ChartPtr chart, std::vector<Expr> components)
    : chart_(std::move(chart)), c_(std::move(components)) {
  check_count(chart_, c_.size(), chart_ ? chart_->dimension() : 0, "vector field");
}

VectorField VectorField::zero(ChartPtr chart) {
  std::size_t n = chart->dimension();
  return {std::move(chart), std::vector<Expr>(n)};
}

VectorField VectorField::coordinate(ChartPtr chart, std::size_t i) {
  std::vector<Expr> c(chart->dimension());
  c.at(i) = Expr(1.0);
  return {std::move(chart), std::move(c)};
}

VectorField VectorField::parse(ChartPtr chart, const std::vector<std::string>& components) {
  auto c = parse_all(chart, components);
  return {std::move(chart), std::move(c)};
}

VectorField operator+(const VectorField& a, const VectorField& b) {
  require_same_chart(a.chart(), b.chart());
  std::vector<Expr> c(a.dimension());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = a[k] + b[k];
  return {a.chart(), std::move(c)};
}

VectorField operator-(const VectorField& a, const VectorField& b) {
  require_same_chart(a.chart(), b.chart());
  std::vector<Expr> c(a.dimension());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = a[k] - b[k];
  return {a.chart(), std::move(c)};
}

VectorField operator-(const VectorField& a) {
  std::vector<Expr> c(a.dimension());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = -a[k];
  return {a.chart(), std::move(c)};
}

VectorField operator*(const Expr& f, const VectorField& a) {
  std::vector<Expr> c(a.dimension());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = f * a[k];
  return {a.chart(), std::move(c)};
}

// ---------------------------------------------------------------------------
// OneForm

OneForm::OneForm(ChartPtr chart, std::vector<Expr> components) : chart_(std::move(chart)), c_(std::move(components)) {
  check_count(chart_, c_.size(), chart_ ? chart_->dimension() : 0, "one-form");
}

OneForm OneForm::zero(ChartPtr chart) {
  std::size_t n = chart->dimension();
  return {std::move(chart), std::vector<Expr>(n)};
}

OneForm OneForm::differential(ChartPtr chart, const Expr& f) {
  std::vector<Expr> c(chart->dimension());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = differentiate(f, k);
  return {std::move(chart), std::move(c)};
}

OneForm OneForm::parse(ChartPtr chart, const std::vector<std::string>& components) {
  auto c = parse_all(chart, components);
  return {std::move(chart), std::move(c)};
}

Expr OneForm::operator()(const VectorField& x) const {
  require_same_chart(chart_, x.chart());
  std::vector<Expr> terms;
  terms.reserve(c_.size());
  for (std::size_t k = 0; k < c_.size(); ++k) terms.push_back(c_[k] * x[k]);
  return sum(terms);
}

OneForm operator+(const OneForm& a, const OneForm& b) {
  require_same_chart(a.chart(), b.chart());
  std::vector<Expr> c(a.dimension());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = a[k] + b[k];
  return {a.chart(), std::move(c)};
}

OneForm operator-(const OneForm& a, const OneForm& b) {
  require_same_chart(a.chart(), b.chart());
  std::vector<Expr> c(a.dimension());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = a[k] - b[k];
  return {a.chart(), std::move(c)};
}

OneForm operator*(const Expr& f, const OneForm& a) {
  std::vector<Expr> c(a.dimension());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = f * a[k];
  return {a.chart(), std::move(c)};
}

// ---------------------------------------------------------------------------
// Bilinear

Bilinear::Bilinear(ChartPtr chart, std::vector<Expr> components)
    : chart_(std::move(chart)), n_(chart_ ? chart_->dimension() : 0), c_(std::move(components)) {
  check_count(chart_, c_.size(), n_ * n_, "bilinear form");
}

Bilinear Bilinear::zero(ChartPtr chart) {
  std::size_t n = chart->dimension();
  return {std::move(chart), std::vector<Expr>(n * n)};
}

Expr Bilinear::operator()(const VectorField& x, const VectorField& y) const {
  require_same_chart(chart_, x.chart());
  require_same_chart(chart_, y.chart());
  std::vector<Expr> terms;
  for (std::size_t i = 0; i < n_; ++i) {
    if (x[i].is_zero()) continue;
    for (std::size_t j = 0; j < n_; ++j) {
      if (!y[j].is_zero()) terms.push_back(c_[i * n_ + j] * x[i] * y[j]);
    }
  }
  return sum(terms);
}

Bilinear Bilinear::transpose() const {
  std::vector<Expr> t(c_.size());
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) t[j * n_ + i] = c_[i * n_ + j];
  }
  return {chart_, std::move(t)};
}

Bilinear operator-(const Bilinear& a, const Bilinear& b) {
  require_same_chart(a.chart(), b.chart());
  std::vector<Expr> c(a.components().size());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = a.components()[k] - b.components()[k];
  return {a.chart(), std::move(c)};
}

// ---------------------------------------------------------------------------
// MetricField

namespace {

// Laplace expansion along the first row of the submatrix on `rows` x `cols`.
Expr minor_det(const std::vector<Expr>& m, std::size_t n, std::vector<std::size_t>& rows,
               std::vector<std::size_t>& cols) {
  if (rows.size() == 1) return m[rows[0] * n + cols[0]];
  if (rows.size() == 2) {
    return m[rows[0] * n + cols[0]] * m[rows[1] * n + cols[1]] - m[rows[0] * n + cols[1]] * m[rows[1] * n + cols[0]];
  }
  std::size_t r = rows.front();
  std::vector<std::size_t> sub_rows(rows.begin() + 1, rows.end());
  std::vector<Expr> terms;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const Expr& a = m[r * n + cols[j]];
    if (a.is_zero()) continue;
    std::vector<std::size_t> sub_cols;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (k != j) sub_cols.push_back(cols[k]);
    }
    Expr t = a * minor_det(m, n, sub_rows, sub_cols);
    terms.push_back(j % 2 == 0 ? t : -t);
  }
  return sum(terms);
}

}  // namespace

MetricField::MetricField(ChartPtr chart, std::vector<Expr> components)
    : chart_(std::move(chart)), n_(chart_ ? chart_->dimension() : 0), g_(std::move(components)) {
  check_count(chart_, g_.size(), n_ * n_, "metric");
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      if (!(g_[i * n_ + j] == g_[j * n_ + i])) throw std::invalid_argument("metric components are not symmetric");
    }
  }
  det_ = kvg::determinant(g_, n_);
  const PointSet& pts = chart_->validation_points();
  for (std::size_t p = 0; p < pts.size(); ++p) {
    double d = 0.0;
    try {
      d = expr::evaluate(det_, pts[p]);
    } catch (const expr::DomainError& e) {
      throw SingularMetric(std::string("metric undefined at a validation point: ") + e.what());
    }
    if (!(std::fabs(d) > 1e-10)) throw SingularMetric("metric determinant vanishes at a validation point");
  }
  inv_ = kvg::inverse_matrix(g_, n_);
}

Expr determinant(std::span<const Expr> m, std::size_t n) {
  std::vector<Expr> copy(m.begin(), m.end());
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  auto cols = rows;
  return minor_det(copy, n, rows, cols);
}

std::vector<Expr> inverse_matrix(std::span<const Expr> m, std::size_t n) {
  std::vector<Expr> copy(m.begin(), m.end());
  Expr inv_det = pow(determinant(m, n), -1);
  std::vector<Expr> inv(n * n);
  if (n == 1) {
    inv[0] = inv_det;
    return inv;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      // inverse_ij = cofactor_ji / det
      std::vector<std::size_t> rows;
      std::vector<std::size_t> cols;
      for (std::size_t k = 0; k < n; ++k) {
        if (k != j) rows.push_back(k);
        if (k != i) cols.push_back(k);
      }
      Expr c = minor_det(copy, n, rows, cols);
      inv[i * n + j] = ((i + j) % 2 == 0 ? c : -c) * inv_det;
    }
  }
  return inv;
}

MetricField MetricField::euclidean(ChartPtr chart) {
  std::size_t n = chart->dimension();
  std::vector<Expr> g(n * n);
  for (std::size_t i = 0; i < n; ++i) g[i * n + i] = Expr(1.0);
  return {std::move(chart), std::move(g)};
}

MetricField MetricField::parse(ChartPtr chart, const std::vector<std::string>& components) {
  auto c = parse_all(chart, components);
  return {std::move(chart), std::move(c)};
}

MetricField MetricField::hessian_of(ChartPtr chart, const Expr& potential) {
  std::size_t n = chart->dimension();
  std::vector<Expr> g(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    Expr di = differentiate(potential, i);
    for (std::size_t j = 0; j < n; ++j) g[i * n + j] = j < i ? g[j * n + i] : differentiate(di, j);
  }
  return {std::move(chart), std::move(g)};
}

MetricField MetricField::conformal(const Expr& f) const {
  Expr s = expr::exp(2.0 * f);
  std::vector<Expr> g(g_.size());
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = s * g_[k];
  return {chart_, std::move(g)};
}

Expr MetricField::operator()(const VectorField& x, const VectorField& y) const {
  return Bilinear(chart_, g_)(x, y);
}

Bilinear MetricField::as_bilinear() const { return {chart_, g_}; }

bool MetricField::positive_definite_at(const PointSet& points) const {
  ValueTable values = evaluate_batch_serial(g_, points);
  std::vector<double> l(n_ * n_);
  for (std::size_t p = 0; p < values.rows(); ++p) {
    auto a = values.row(p);
    // Cholesky succeeds iff all leading principal minors are positive.
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        double s = a[i * n_ + j];
        for (std::size_t k = 0; k < j; ++k) s -= l[i * n_ + k] * l[j * n_ + k];
        if (i == j) {
          if (!(s > 0.0)) return false;
          l[i * n_ + i] = std::sqrt(s);
        } else {
          l[i * n_ + j] = s / l[j * n_ + j];
        }
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// TensorField

TensorField::TensorField(ChartPtr chart, std::size_t covariant_rank, std::vector<Expr> components)
    : chart_(std::move(chart)), n_(chart_ ? chart_->dimension() : 0), k_(covariant_rank), c_(std::move(components)) {
  check_count(chart_, c_.size(), ipow(n_, k_ + 1), "tensor field");
}

TensorField TensorField::zero(ChartPtr chart, std::size_t covariant_rank) {
  std::size_t n = chart->dimension();
  return {std::move(chart), covariant_rank, std::vector<Expr>(ipow(n, covariant_rank + 1))};
}

std::size_t TensorField::offset(std::size_t m, std::span<const std::size_t> lower) const {
  if (lower.size() != k_) throw std::invalid_argument("wrong number of tensor indices");
  std::size_t off = m;
  for (std::size_t i : lower) off = off * n_ + i;
  return off;
}

const Expr& TensorField::at(std::size_t m, std::span<const std::size_t> lower) const { return c_[offset(m, lower)]; }

VectorField TensorField::operator()(std::span<const VectorField> args) const {
  if (args.size() != k_) throw std::invalid_argument("tensor applied to the wrong number of fields");
  for (const auto& a : args) require_same_chart(chart_, a.chart());
  const std::size_t block = ipow(n_, k_);
  std::vector<Expr> out(n_);
  std::vector<std::size_t> idx(k_, 0);
  std::vector<std::vector<Expr>> terms(n_);
  for (std::size_t flat = 0; flat < block; ++flat) {
    std::size_t rem = flat;
    for (std::size_t s = k_; s-- > 0;) {
      idx[s] = rem % n_;
      rem /= n_;
    }
    Expr w(1.0);
    bool zero = false;
    for (std::size_t s = 0; s < k_ && !zero; ++s) {
      const Expr& a = args[s][idx[s]];
      if (a.is_zero()) zero = true;
      w = w * a;
    }
    if (zero) continue;
    for (std::size_t m = 0; m < n_; ++m) {
      const Expr& t = c_[m * block + flat];
      if (!t.is_zero()) terms[m].push_back(t * w);
    }
  }
  for (std::size_t m = 0; m < n_; ++m) out[m] = sum(terms[m]);
  return {chart_, std::move(out)};
}

TensorField operator+(const TensorField& a, const TensorField& b) {
  require_same_chart(a.chart(), b.chart());
  if (a.rank() != b.rank()) throw std::invalid_argument("tensor rank mismatch");
  std::vector<Expr> c(a.components().size());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = a.components()[k] + b.components()[k];
  return {a.chart(), a.rank(), std::move(c)};
}

TensorField operator-(const TensorField& a, const TensorField& b) {
  require_same_chart(a.chart(), b.chart());
  if (a.rank() != b.rank()) throw std::invalid_argument("tensor rank mismatch");
  std::vector<Expr> c(a.components().size());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = a.components()[k] - b.components()[k];
  return {a.chart(), a.rank(), std::move(c)};
}

TensorField operator*(double s, const TensorField& a) {
  std::vector<Expr> c(a.components().size());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = s * a.components()[k];
  return {a.chart(), a.rank(), std::move(c)};
}

// ---------------------------------------------------------------------------
// Operations

Expr vf_apply(const VectorField& x, const Expr& f) {
  std::vector<Expr> terms;
  for (std::size_t i = 0; i < x.dimension(); ++i) {
    if (!x[i].is_zero() && f.depends_on(i)) terms.push_back(x[i] * differentiate(f, i));
  }
  return sum(terms);
}

VectorField lie_bracket(const VectorField& x, const VectorField& y) {
  require_same_chart(x.chart(), y.chart());
  std::vector<Expr> c(x.dimension());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = vf_apply(x, y[k]) - vf_apply(y, x[k]);
  return {x.chart(), std::move(c)};
}

VectorField sharp(const OneForm& omega, const MetricField& g) {
  require_same_chart(omega.chart(), g.chart());
  const std::size_t n = g.dimension();
  std::vector<Expr> c(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<Expr> terms;
    for (std::size_t l = 0; l < n; ++l) {
      if (!omega[l].is_zero()) terms.push_back(g.inverse(k, l) * omega[l]);
    }
    c[k] = sum(terms);
  }
  return {g.chart(), std::move(c)};
}

OneForm flat(const VectorField& x, const MetricField& g) {
  require_same_chart(x.chart(), g.chart());
  const std::size_t n = g.dimension();
  std::vector<Expr> c(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<Expr> terms;
    for (std::size_t l = 0; l < n; ++l) terms.push_back(g(k, l) * x[l]);
    c[k] = sum(terms);
  }
  return {g.chart(), std::move(c)};
}

// ---------------------------------------------------------------------------
// Probes

EqualityReport make_report(PointSet points, std::vector<double> residuals, double tolerance) {
  EqualityReport r;
  r.sample_count = points.size();
  r.points = std::move(points);
  r.residuals = std::move(residuals);
  r.tolerance = tolerance;
  double total = 0.0;
  for (std::size_t i = 0; i < r.residuals.size(); ++i) {
    double v = r.residuals[i];
    total += v;
    if (v > r.max_residual || std::isnan(v)) {
      r.max_residual = v;
      r.worst_index = i;
    }
  }
  r.mean_residual = r.residuals.empty() ? 0.0 : total / static_cast<double>(r.residuals.size());
  r.pass = r.max_residual <= tolerance;
  return r;
}

EqualityReport combine(const EqualityReport& a, const EqualityReport& b) {
  if (!(a.points == b.points)) throw std::invalid_argument("reports were sampled at different points");
  std::vector<double> res(a.residuals.size());
  for (std::size_t i = 0; i < res.size(); ++i) res[i] = std::max(a.residuals[i], b.residuals[i]);
  return make_report(a.points, std::move(res), std::min(a.tolerance, b.tolerance));
}

PointSet probe_points(const Chart& chart, const ProbeConfig& cfg) {
  return chart.sample(cfg.samples, derive_seed(cfg.seed, "points"));
}

std::vector<double> pointwise_residuals(std::span<const Comparison> groups, const PointSet& points, Backend backend) {
  std::vector<Expr> all;
  for (const auto& g : groups) {
    if (g.lhs.size() != g.rhs.size()) throw std::invalid_argument("comparison sides differ in size");
    all.insert(all.end(), g.lhs.begin(), g.lhs.end());
    all.insert(all.end(), g.rhs.begin(), g.rhs.end());
  }
  ValueTable v = backend == Backend::Serial ? evaluate_batch_serial(all, points) : evaluate_batch(all, points);
  std::vector<double> res(points.size(), 0.0);
  for (std::size_t p = 0; p < points.size(); ++p) {
    auto row = v.row(p);
    std::size_t base = 0;
    for (const auto& g : groups) {
      const std::size_t m = g.lhs.size();
      double diff = 0.0;
      double mag = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        double a = row[base + k];
        double b = row[base + m + k];
        diff = std::max(diff, std::fabs(a - b));
        mag = std::max({mag, std::fabs(a), std::fabs(b)});
      }
      res[p] = std::max(res[p], diff / (1.0 + mag));
      base += 2 * m;
    }
  }
  return res;
}

EqualityReport compare_on(std::span<const Comparison> groups, const PointSet& points, const ProbeConfig& cfg) {
  return make_report(points, pointwise_residuals(groups, points, cfg.backend), cfg.tolerance);
}

namespace {

EqualityReport compare_lists(const ChartPtr& chart, std::vector<Expr> a, std::vector<Expr> b,
                             const ProbeConfig& cfg) {
  const Comparison g[] = {{std::move(a), std::move(b)}};
  return compare_on(g, probe_points(*chart, cfg), cfg);
}

}  // namespace

EqualityReport fields_equal_probe(const ChartPtr& chart, const Expr& a, const Expr& b, const ProbeConfig& cfg) {
  return compare_lists(chart, {a}, {b}, cfg);
}

EqualityReport fields_equal_probe(const VectorField& a, const VectorField& b, const ProbeConfig& cfg) {
  require_same_chart(a.chart(), b.chart());
  return compare_lists(a.chart(), a.components(), b.components(), cfg);
}

EqualityReport fields_equal_probe(const OneForm& a, const OneForm& b, const ProbeConfig& cfg) {
  require_same_chart(a.chart(), b.chart());
  return compare_lists(a.chart(), a.components(), b.components(), cfg);
}

EqualityReport fields_equal_probe(const Bilinear& a, const Bilinear& b, const ProbeConfig& cfg) {
  require_same_chart(a.chart(), b.chart());
  return compare_lists(a.chart(), a.components(), b.components(), cfg);
}

EqualityReport fields_equal_probe(const TensorField& a, const TensorField& b, const ProbeConfig& cfg) {
  require_same_chart(a.chart(), b.chart());
  if (a.rank() != b.rank()) throw std::invalid_argument("tensor rank mismatch");
  return compare_lists(a.chart(), a.components(), b.components(), cfg);
}

EqualityReport probe_identity(const ChartPtr& chart, std::size_t arity, const FieldIdentity& identity,
                              const ProbeConfig& cfg, std::string_view tag) {
  Rng rng(derive_seed(cfg.seed, std::string("fields/") + std::string(tag)));
  std::vector<Comparison> groups;
  groups.reserve(cfg.trials);
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    std::vector<VectorField> fields;
    fields.reserve(arity);
    for (std::size_t i = 0; i < arity; ++i) fields.push_back(random_vector_field(chart, cfg.field_degree, rng));
    groups.push_back(identity(fields, rng));
  }
  return compare_on(groups, probe_points(*chart, cfg), cfg);
}

namespace {

void monomials(std::size_t n, int degree, std::vector<int>& cur, std::size_t i, std::vector<std::vector<int>>& out) {
  if (i == n) {
    out.push_back(cur);
    return;
  }
  int used = 0;
  for (std::size_t k = 0; k < i; ++k) used += cur[k];
  for (int e = 0; e + used <= degree; ++e) {
    cur[i] = e;
    monomials(n, degree, cur, i + 1, out);
  }
  cur[i] = 0;
}

}  // namespace

Expr random_polynomial(std::size_t dimension, int degree, Rng& rng) {
  std::vector<std::vector<int>> ms;
  std::vector<int> cur(dimension, 0);
  monomials(dimension, degree, cur, 0, ms);
  std::vector<Expr> terms;
  terms.reserve(ms.size());
  for (const auto& m : ms) {
    std::vector<Expr> fs;
    fs.emplace_back(rng.uniform(-1.0, 1.0));
    for (std::size_t i = 0; i < dimension; ++i) {
      if (m[i] != 0) fs.push_back(pow(Expr::variable(i), m[i]));
    }
    terms.push_back(product(fs));
  }
  return sum(terms);
}

VectorField random_vector_field(const ChartPtr& chart, int degree, Rng& rng) {
  std::vector<Expr> c(chart->dimension());
  for (auto& e : c) e = random_polynomial(chart->dimension(), degree, rng);
  return {chart, std::move(c)};
}

OneForm random_one_form(const ChartPtr& chart, int degree, Rng& rng) {
  std::vector<Expr> c(chart->dimension());
  for (auto& e : c) e = random_polynomial(chart->dimension(), degree, rng);
  return {chart, std::move(c)};
}

}  // namespace kvg
