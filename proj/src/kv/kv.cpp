#include "kvg/kv.hpp"

#include <cmath>
#include <memory>
#include <utility>

namespace kvg {

namespace {

std::size_t power(std::size_t n, std::size_t k) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < k; ++i) r *= n;
  return r;
}

std::vector<VectorField> without(std::span<const VectorField> args, std::size_t skip) {
  std::vector<VectorField> out;
  out.reserve(args.size());
  for (std::size_t i = 0; i < args.size(); ++i)
    if (i != skip) out.push_back(args[i]);
  return out;
}

VectorField nabla_eval(const KVContext& ctx, const VectorField& x, const Cochain& theta,
                       std::span<const VectorField> args) {
  VectorField out = ctx.nabla(x, theta(args));
  std::vector<VectorField> moved(args.begin(), args.end());
  for (std::size_t k = 0; k < args.size(); ++k) {
    moved[k] = ctx.nabla(x, args[k]);
    out = out - theta(moved);
    moved[k] = args[k];
  }
  return out;
}

Expr delta(std::size_t a, std::size_t b) { return Expr(a == b ? 1.0 : 0.0); }

TensorField build_rank2(const ChartPtr& chart, const std::function<Expr(std::size_t, std::size_t, std::size_t)>& f) {
  const std::size_t n = chart->dimension();
  std::vector<Expr> c(n * n * n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) c[(k * n + i) * n + j] = f(k, i, j);
  return {chart, 2, std::move(c)};
}

Comparison vs_zero(const VectorField& v) {
  return Comparison{v.components(), std::vector<Expr>(v.dimension(), Expr(0.0))};
}

}  // namespace

KVContext::KVContext(Connection nabla, ProbeConfig cfg) : nabla_(std::move(nabla)), cfg_(cfg) {
  if (!nabla_.chart()) throw SetupError("context connection has no chart");
  auto flat = flatness_probe(nabla_, cfg_);
  if (!flat.pass)
    throw SetupError("connection is not flat (curvature residual " + std::to_string(flat.max_residual) + ")");
  auto torsion = torsion_probe(nabla_, cfg_);
  if (!torsion.pass)
    throw SetupError("connection has torsion (residual " + std::to_string(torsion.max_residual) + ")");
}

const char* kind_name(CochainKind kind) noexcept {
  switch (kind) {
    case CochainKind::Zero: return "zero";
    case CochainKind::Identity: return "identity";
    case CochainKind::ScalarMult: return "scalar";
    case CochainKind::Ad: return "ad";
    case CochainKind::Tensor: return "tensor";
    case CochainKind::ConnDiff: return "conn_diff";
    case CochainKind::Conformal: return "conformal";
    case CochainKind::Projective: return "projective";
    case CochainKind::DualProjective: return "dual_projective";
    case CochainKind::Differential: return "differential";
    case CochainKind::Sum: return "sum";
    case CochainKind::Scale: return "scale";
    case CochainKind::Custom: return "custom";
  }
  return "?";
}

Cochain::Cochain(ChartPtr chart, std::size_t degree, Evaluator evaluator, CochainKind kind, std::string description)
    : chart_(std::move(chart)),
      degree_(degree),
      eval_(std::move(evaluator)),
      kind_(kind),
      description_(std::move(description)) {
  if (!chart_) throw std::invalid_argument("cochain without chart");
  if (!eval_) throw std::invalid_argument("cochain without evaluator");
}

Cochain::Cochain(TensorField tensor, CochainKind kind, std::string description)
    : chart_(tensor.chart()), degree_(tensor.rank()), kind_(kind), description_(std::move(description)) {
  if (!chart_) throw std::invalid_argument("cochain without chart");
  auto shared = std::make_shared<const TensorField>(tensor);
  eval_ = [shared](std::span<const VectorField> args) { return (*shared)(args); };
  tensor_ = std::move(tensor);
}

Cochain Cochain::zero(ChartPtr chart, std::size_t degree) {
  const std::size_t n = chart->dimension();
  std::vector<Expr> c(n * power(n, degree), Expr(0.0));
  return Cochain(TensorField(std::move(chart), degree, std::move(c)), CochainKind::Zero, "0");
}

VectorField Cochain::operator()(std::span<const VectorField> args) const {
  if (args.size() != degree_)
    throw std::invalid_argument("cochain of degree " + std::to_string(degree_) + " applied to " +
                                std::to_string(args.size()) + " fields");
  for (const auto& a : args) require_same_chart(chart_, a.chart());
  return eval_(args);
}

VectorField Cochain::operator()(std::initializer_list<VectorField> args) const {
  return (*this)(std::span<const VectorField>(args.begin(), args.size()));
}

Cochain operator+(const Cochain& a, const Cochain& b) {
  require_same_chart(a.chart(), b.chart());
  if (a.degree() != b.degree()) throw std::invalid_argument("cochain degrees differ");
  std::string desc = "(" + a.description() + " + " + b.description() + ")";
  if (a.tensor() && b.tensor()) return Cochain(*a.tensor() + *b.tensor(), CochainKind::Sum, desc);
  return Cochain(
      a.chart(), a.degree(), [a, b](std::span<const VectorField> x) { return a(x) + b(x); }, CochainKind::Sum, desc);
}

Cochain operator-(const Cochain& a, const Cochain& b) { return a + (-1.0) * b; }

Cochain operator-(const Cochain& a) { return (-1.0) * a; }

Cochain operator*(double s, const Cochain& a) {
  std::string desc = std::to_string(s) + "*" + a.description();
  if (s == -1.0) desc = "-" + a.description();
  if (a.tensor()) return Cochain(s * *a.tensor(), CochainKind::Scale, desc);
  return Cochain(
      a.chart(), a.degree(), [a, s](std::span<const VectorField> x) { return Expr(s) * a(x); }, CochainKind::Scale,
      desc);
}

// ---------------------------------------------------------------------------

Cochain jacobi_element(const KVContext& ctx, const VectorField& z) {
  require_same_chart(ctx.chart(), z.chart());
  auto r = jacobi_probe(ctx, z, ctx.config());
  if (!r.pass) throw SetupError("not a Jacobi element (residual " + std::to_string(r.max_residual) + ")");
  return Cochain(
      z.chart(), 0, [z](std::span<const VectorField>) { return z; }, CochainKind::Custom, "Z");
}

Cochain identity_cochain(const ChartPtr& chart) {
  const std::size_t n = chart->dimension();
  std::vector<Expr> c(n * n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) c[k * n + i] = delta(k, i);
  return Cochain(TensorField(chart, 1, std::move(c)), CochainKind::Identity, "Id");
}

Cochain scalar_cochain(const ChartPtr& chart, const Expr& f) {
  const std::size_t n = chart->dimension();
  std::vector<Expr> c(n * n, Expr(0.0));
  for (std::size_t k = 0; k < n; ++k) c[k * n + k] = f;
  return Cochain(TensorField(chart, 1, std::move(c)), CochainKind::ScalarMult,
                 "f*Id[" + expr::to_string(f, chart->coordinates()) + "]");
}

Cochain ad_cochain(const VectorField& z) {
  return Cochain(
      z.chart(), 1, [z](std::span<const VectorField> y) { return lie_bracket(z, y[0]); }, CochainKind::Ad, "ad_Z");
}

Cochain tensor_cochain(const TensorField& t, std::string description) {
  return Cochain(t, CochainKind::Tensor, std::move(description));
}

Cochain projective_cochain(const OneForm& omega) {
  auto t = build_rank2(omega.chart(), [&](std::size_t k, std::size_t i, std::size_t j) {
    return omega[i] * delta(k, j) + omega[j] * delta(k, i);
  });
  return Cochain(std::move(t), CochainKind::Projective, "omega(X)Y+omega(Y)X");
}

Cochain dual_projective_cochain(const Bilinear& h, const VectorField& v) {
  require_same_chart(h.chart(), v.chart());
  auto t = build_rank2(h.chart(), [&](std::size_t k, std::size_t i, std::size_t j) { return -(h(i, j) * v[k]); });
  return Cochain(std::move(t), CochainKind::DualProjective, "-h(X,Y)V");
}

Cochain conformal_cochain(const MetricField& g, const Expr& f) {
  const auto& chart = g.chart();
  VectorField grad = gradient(f, g);
  std::vector<Expr> df;
  for (std::size_t i = 0; i < chart->dimension(); ++i) df.push_back(differentiate(f, i));
  auto t = build_rank2(chart, [&](std::size_t k, std::size_t i, std::size_t j) {
    return -(g(i, j) * grad[k]) + df[i] * delta(k, j) + df[j] * delta(k, i);
  });
  return Cochain(std::move(t), CochainKind::Conformal, "-g(X,Y)grad f+(Xf)Y+(Yf)X");
}

Cochain conn_diff_cochain(const Connection& d, const KVContext& ctx) {
  require_same_chart(ctx.chart(), d.chart());
  return Cochain(ctx.connection().difference(d), CochainKind::ConnDiff, "nabla-D");
}

Cochain connection_cochain(const Connection& d) {
  return Cochain(
      d.chart(), 2, [d](std::span<const VectorField> a) { return covariant_derivative(d, a[0], a[1]); },
      CochainKind::Custom, d.label().empty() ? "D" : d.label());
}

Cochain coboundary_candidate(const VectorField& z, const KVContext& ctx) {
  require_same_chart(ctx.chart(), z.chart());
  return Cochain(
      z.chart(), 2,
      [z, ctx](std::span<const VectorField> a) {
        return ctx.nabla(a[0], ctx.nabla(a[1], z)) - ctx.nabla(ctx.nabla(a[0], a[1]), z);
      },
      CochainKind::Custom, "nabla_X nabla_Y Z - nabla_{nabla_X Y} Z");
}

Cochain curvature_cochain(const Connection& c) {
  return Cochain(riemann_tensor(c), CochainKind::Tensor, "R");
}

Cochain materialize(const Cochain& theta) {
  if (theta.tensor()) return theta;
  const auto& chart = theta.chart();
  const std::size_t n = chart->dimension();
  const std::size_t k = theta.degree();
  const std::size_t count = power(n, k);
  std::vector<Expr> c(n * count);
  std::vector<VectorField> args(k);
  for (std::size_t flat = 0; flat < count; ++flat) {
    std::size_t rest = flat;
    for (std::size_t s = k; s-- > 0;) {
      args[s] = VectorField::coordinate(chart, rest % n);
      rest /= n;
    }
    VectorField v = theta(args);
    for (std::size_t m = 0; m < n; ++m) c[m * count + flat] = v[m];
  }
  return Cochain(TensorField(chart, k, std::move(c)), CochainKind::Tensor, "[" + theta.description() + "]");
}

// ---------------------------------------------------------------------------

Cochain nabla_cochain(const KVContext& ctx, const VectorField& x, const Cochain& theta) {
  if (theta.degree() == 0) throw DegreeError("nabla_X is defined on cochains of degree >= 1");
  require_same_chart(ctx.chart(), theta.chart());
  require_same_chart(ctx.chart(), x.chart());
  return Cochain(
      theta.chart(), theta.degree(),
      [ctx, x, theta](std::span<const VectorField> a) { return nabla_eval(ctx, x, theta, a); }, CochainKind::Custom,
      "nabla_X(" + theta.description() + ")");
}

Cochain d_kv(const KVContext& ctx, const Cochain& theta) {
  require_same_chart(ctx.chart(), theta.chart());
  const std::size_t n = theta.degree();
  if (n > kMaxDifferentialDegree)
    throw DegreeError("d_KV is limited to input degree " + std::to_string(kMaxDifferentialDegree));
  std::string desc = "d(" + theta.description() + ")";
  if (n == 0) {
    VectorField z = theta({});
    return Cochain(
        theta.chart(), 1, [z](std::span<const VectorField> y) { return lie_bracket(z, y[0]); },
        CochainKind::Differential, desc);
  }
  auto eval = [ctx, theta, n](std::span<const VectorField> x) {
    VectorField out = VectorField::zero(ctx.chart());
    for (std::size_t i = 1; i <= n; ++i) {
      const VectorField& xi = x[i - 1];
      std::vector<VectorField> rest = without(x, i - 1);
      VectorField term = nabla_eval(ctx, xi, theta, rest);
      std::vector<VectorField> moved = without(x.first(n), i - 1);
      moved.push_back(xi);
      term = term + ctx.nabla(theta(moved), x[n]);
      out = (i % 2 == 1) ? out - term : out + term;
    }
    return out;
  };
  return Cochain(theta.chart(), n + 1, eval, CochainKind::Differential, desc);
}

// ---------------------------------------------------------------------------

EqualityReport cochain_equal_probe(const Cochain& a, const Cochain& b, const ProbeConfig& cfg, std::string_view tag) {
  require_same_chart(a.chart(), b.chart());
  if (a.degree() != b.degree()) throw std::invalid_argument("cochain degrees differ");
  return probe_identity(
      a.chart(), a.degree(),
      [&](std::span<const VectorField> x, Rng&) { return Comparison{a(x).components(), b(x).components()}; }, cfg,
      tag);
}

EqualityReport d2_probe(const KVContext& ctx, const Cochain& theta, const ProbeConfig& cfg) {
  if (theta.degree() > 2) throw DegreeError("d2_probe takes cochains of degree <= 2");
  Cochain dd = d_kv(ctx, d_kv(ctx, theta));
  return probe_identity(
      ctx.chart(), dd.degree(), [&](std::span<const VectorField> x, Rng&) { return vs_zero(dd(x)); }, cfg, "d2");
}

EqualityReport jacobi_probe(const KVContext& ctx, const VectorField& z, const ProbeConfig& cfg) {
  require_same_chart(ctx.chart(), z.chart());
  return probe_identity(
      ctx.chart(), 2,
      [&](std::span<const VectorField> x, Rng&) {
        return Comparison{ctx.nabla(x[0], ctx.nabla(x[1], z)).components(),
                          ctx.nabla(ctx.nabla(x[0], x[1]), z).components()};
      },
      cfg, "jacobi");
}

EqualityReport symmetry_probe(const Cochain& theta, const ProbeConfig& cfg) {
  if (theta.degree() != 2) throw DegreeError("symmetry_probe takes degree-2 cochains");
  return probe_identity(
      theta.chart(), 2,
      [&](std::span<const VectorField> x, Rng&) {
        return Comparison{theta({x[0], x[1]}).components(), theta({x[1], x[0]}).components()};
      },
      cfg, "symmetry");
}

EqualityReport tensoriality_probe(const Cochain& theta, std::size_t slot, const ProbeConfig& cfg) {
  if (slot >= theta.degree()) throw std::out_of_range("tensoriality slot");
  const std::size_t n = theta.chart()->dimension();
  return probe_identity(
      theta.chart(), theta.degree(),
      [&](std::span<const VectorField> x, Rng& rng) {
        Expr f = random_polynomial(n, cfg.field_degree, rng);
        std::vector<VectorField> scaled(x.begin(), x.end());
        scaled[slot] = f * x[slot];
        return Comparison{theta(scaled).components(), (f * theta(x)).components()};
      },
      cfg, "tensoriality/" + std::to_string(slot));
}

EqualityReport tensoriality_probe(const Cochain& theta, const ProbeConfig& cfg) {
  if (theta.degree() == 0) return tensoriality_probe(Cochain::zero(theta.chart(), 1), 0, cfg);
  EqualityReport r = tensoriality_probe(theta, 0, cfg);
  for (std::size_t s = 1; s < theta.degree(); ++s) r = combine(r, tensoriality_probe(theta, s, cfg));
  return r;
}

EqualityReport multilinearity_probe(const Cochain& theta, const ProbeConfig& cfg) {
  const std::size_t deg = theta.degree();
  if (deg == 0) return tensoriality_probe(theta, cfg);
  const auto& chart = theta.chart();
  return probe_identity(
      chart, deg + 1,
      [&](std::span<const VectorField> x, Rng& rng) {
        Comparison c;
        std::span<const VectorField> base = x.first(deg);
        VectorField at_base = theta(base);
        for (std::size_t s = 0; s < deg; ++s) {
          std::vector<VectorField> a(base.begin(), base.end());
          std::vector<VectorField> b = a;
          a[s] = x[s] + x[deg];
          b[s] = x[deg];
          auto lhs = theta(a).components();
          auto rhs = (at_base + theta(b)).components();
          c.lhs.insert(c.lhs.end(), lhs.begin(), lhs.end());
          c.rhs.insert(c.rhs.end(), rhs.begin(), rhs.end());
          const double k = rng.uniform(-2.0, 2.0);
          std::vector<VectorField> m(base.begin(), base.end());
          m[s] = Expr(k) * x[s];
          lhs = theta(m).components();
          rhs = (Expr(k) * at_base).components();
          c.lhs.insert(c.lhs.end(), lhs.begin(), lhs.end());
          c.rhs.insert(c.rhs.end(), rhs.begin(), rhs.end());
        }
        return c;
      },
      cfg, "multilinearity");
}

// ---------------------------------------------------------------------------

FlatStructure random_flat_structure(const ChartPtr& chart, Rng& rng) {
  const std::size_t n = chart->dimension();
  std::vector<Expr> u;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<Expr> terms{Expr::variable(k)};
    for (std::size_t j = k + 1; j < n; ++j) {
      terms.push_back(Expr(rng.uniform(-0.5, 0.5)) * pow(Expr::variable(j), 2));
      for (std::size_t l = j + 1; l < n; ++l)
        terms.push_back(Expr(rng.uniform(-0.5, 0.5)) * Expr::variable(j) * Expr::variable(l));
    }
    u.push_back(sum(terms));
  }
  return {Connection::affine_pullback(chart, u, "affine"), std::move(u)};
}

VectorField affine_jacobi_field(const FlatStructure& s, std::span<const double> a, std::span<const double> b) {
  const auto& chart = s.connection.chart();
  const std::size_t n = chart->dimension();
  if (a.size() != n * n || b.size() != n) throw std::invalid_argument("affine_jacobi_field: shape");
  std::vector<Expr> jac(n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t i = 0; i < n; ++i) jac[r * n + i] = differentiate(s.affine_coordinates[r], i);
  std::vector<Expr> inv = inverse_matrix(jac, n);
  std::vector<Expr> w(n);
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<Expr> terms{Expr(b[r])};
    for (std::size_t c = 0; c < n; ++c) terms.push_back(Expr(a[r * n + c]) * s.affine_coordinates[c]);
    w[r] = sum(terms);
  }
  std::vector<Expr> z(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<Expr> terms;
    for (std::size_t r = 0; r < n; ++r) terms.push_back(inv[k * n + r] * w[r]);
    z[k] = sum(terms);
  }
  return {chart, std::move(z)};
}

VectorField random_jacobi_field(const FlatStructure& s, Rng& rng) {
  const std::size_t n = s.connection.dimension();
  std::vector<double> a(n * n);
  std::vector<double> b(n);
  for (auto& v : a) v = rng.uniform(-1.0, 1.0);
  for (auto& v : b) v = rng.uniform(-1.0, 1.0);
  return affine_jacobi_field(s, a, b);
}

TensorField random_tensor_field(const ChartPtr& chart, std::size_t rank, int degree, Rng& rng) {
  const std::size_t n = chart->dimension();
  std::vector<Expr> c(n * power(n, rank));
  for (auto& e : c) e = random_polynomial(n, degree, rng);
  return {chart, rank, std::move(c)};
}

std::vector<VectorField> orthonormal_frame(const MetricField& g) {
  const auto& chart = g.chart();
  std::vector<VectorField> frame;
  for (std::size_t i = 0; i < chart->dimension(); ++i) {
    VectorField v = VectorField::coordinate(chart, i);
    for (const auto& e : frame) v = v - g(v, e) * e;
    frame.push_back((Expr(1.0) / sqrt(g(v, v))) * v);
  }
  return frame;
}

}  // namespace kvg
