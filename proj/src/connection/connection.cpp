#include "kvg/connection.hpp"

namespace kvg {

namespace {

std::size_t idx3(std::size_t n, std::size_t k, std::size_t i, std::size_t j) { return (k * n + i) * n + j; }

std::vector<Expr> parse_all(const ChartPtr& chart, const std::vector<std::string>& text) {
  std::vector<Expr> out;
  out.reserve(text.size());
  for (const auto& s : text) out.push_back(chart->parse(s));
  return out;
}

// (nabla_{d_i} h)_{jk}
std::vector<Expr> nabla_components(const Bilinear& h, const Connection& c) {
  const std::size_t n = h.dimension();
  std::vector<Expr> out(n * n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        std::vector<Expr> terms{differentiate(h(j, k), i)};
        for (std::size_t m = 0; m < n; ++m) {
          terms.push_back(-(c.gamma(m, i, j) * h(m, k)));
          terms.push_back(-(c.gamma(m, i, k) * h(j, m)));
        }
        out[idx3(n, i, j, k)] = sum(terms);
      }
    }
  }
  return out;
}

}  // namespace

Connection::Connection(TensorField christoffel, std::string label)
    : gamma_(std::move(christoffel)), label_(std::move(label)) {
  if (gamma_.rank() != 2) throw std::invalid_argument("Christoffel symbols form a (1,2)-tensor");
}

Connection Connection::flat(ChartPtr chart) { return Connection(TensorField::zero(std::move(chart), 2), "flat"); }

Connection Connection::parse(ChartPtr chart, const std::vector<std::string>& symbols, std::string label) {
  auto c = parse_all(chart, symbols);
  return Connection(TensorField(std::move(chart), 2, std::move(c)), std::move(label));
}

Connection Connection::affine_pullback(ChartPtr chart, const std::vector<Expr>& affine_coordinates,
                                       std::string label) {
  const std::size_t n = chart->dimension();
  if (affine_coordinates.size() != n) throw std::invalid_argument("need one affine coordinate per chart coordinate");
  std::vector<Expr> jac(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t i = 0; i < n; ++i) jac[a * n + i] = differentiate(affine_coordinates[a], i);
  }
  std::vector<Expr> inv = inverse_matrix(jac, n);
  std::vector<Expr> g(n * n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<Expr> second(n);
      for (std::size_t a = 0; a < n; ++a) second[a] = differentiate(jac[a * n + j], i);
      for (std::size_t k = 0; k < n; ++k) {
        std::vector<Expr> terms;
        for (std::size_t a = 0; a < n; ++a) {
          if (!second[a].is_zero()) terms.push_back(inv[k * n + a] * second[a]);
        }
        g[idx3(n, k, i, j)] = sum(terms);
      }
    }
  }
  return Connection(TensorField(std::move(chart), 2, std::move(g)), std::move(label));
}

const Expr& Connection::gamma(std::size_t k, std::size_t i, std::size_t j) const {
  return gamma_.components()[idx3(gamma_.dimension(), k, i, j)];
}

Connection Connection::deformed(const TensorField& theta, std::string label) const {
  return Connection(gamma_ + theta, std::move(label));
}

TensorField Connection::difference(const Connection& other) const { return gamma_ - other.gamma_; }

Connection midpoint(const Connection& a, const Connection& b) {
  return Connection(0.5 * (a.christoffel() + b.christoffel()), "midpoint");
}

VectorField covariant_derivative(const Connection& c, const VectorField& x, const VectorField& y) {
  require_same_chart(c.chart(), x.chart());
  require_same_chart(c.chart(), y.chart());
  const std::size_t n = c.dimension();
  std::vector<Expr> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<Expr> terms{vf_apply(x, y[k])};
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i].is_zero()) continue;
      for (std::size_t j = 0; j < n; ++j) {
        const Expr& g = c.gamma(k, i, j);
        if (!g.is_zero() && !y[j].is_zero()) terms.push_back(g * x[i] * y[j]);
      }
    }
    out[k] = sum(terms);
  }
  return {c.chart(), std::move(out)};
}

OneForm covariant_derivative(const Connection& c, const VectorField& x, const OneForm& omega) {
  require_same_chart(c.chart(), x.chart());
  require_same_chart(c.chart(), omega.chart());
  const std::size_t n = c.dimension();
  std::vector<Expr> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Expr> terms{vf_apply(x, omega[j])};
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i].is_zero()) continue;
      for (std::size_t k = 0; k < n; ++k) {
        const Expr& g = c.gamma(k, i, j);
        if (!g.is_zero() && !omega[k].is_zero()) terms.push_back(-(x[i] * g * omega[k]));
      }
    }
    out[j] = sum(terms);
  }
  return {c.chart(), std::move(out)};
}

Bilinear covariant_derivative(const Connection& c, const VectorField& x, const Bilinear& h) {
  require_same_chart(c.chart(), x.chart());
  require_same_chart(c.chart(), h.chart());
  const std::size_t n = c.dimension();
  std::vector<Expr> nh = nabla_components(h, c);
  std::vector<Expr> out(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < n; ++i) {
        if (!x[i].is_zero()) terms.push_back(x[i] * nh[idx3(n, i, j, k)]);
      }
      out[j * n + k] = sum(terms);
    }
  }
  return {c.chart(), std::move(out)};
}

TensorField torsion_tensor(const Connection& c) {
  const std::size_t n = c.dimension();
  std::vector<Expr> t(n * n * n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) t[idx3(n, k, i, j)] = c.gamma(k, i, j) - c.gamma(k, j, i);
    }
  }
  return {c.chart(), 2, std::move(t)};
}

VectorField torsion(const Connection& c, const VectorField& x, const VectorField& y) {
  return covariant_derivative(c, x, y) - covariant_derivative(c, y, x) - lie_bracket(x, y);
}

EqualityReport torsion_probe(const Connection& c, const ProbeConfig& cfg) {
  auto identity = [&c](std::span<const VectorField> f, Rng&) {
    return Comparison{torsion(c, f[0], f[1]).components(), VectorField::zero(c.chart()).components()};
  };
  return probe_identity(c.chart(), 2, identity, cfg, "torsion");
}

VectorField curvature(const Connection& c, const VectorField& x, const VectorField& y, const VectorField& z) {
  return covariant_derivative(c, x, covariant_derivative(c, y, z)) -
         covariant_derivative(c, y, covariant_derivative(c, x, z)) -
         covariant_derivative(c, lie_bracket(x, y), z);
}

TensorField riemann_tensor(const Connection& c) {
  const std::size_t n = c.dimension();
  std::vector<Expr> r(n * n * n * n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t l = 0; l < n; ++l) {
          std::vector<Expr> terms{differentiate(c.gamma(k, j, l), i), -differentiate(c.gamma(k, i, l), j)};
          for (std::size_t m = 0; m < n; ++m) {
            terms.push_back(c.gamma(k, i, m) * c.gamma(m, j, l));
            terms.push_back(-(c.gamma(k, j, m) * c.gamma(m, i, l)));
          }
          r[((k * n + i) * n + j) * n + l] = sum(terms);
        }
      }
    }
  }
  return {c.chart(), 3, std::move(r)};
}

EqualityReport flatness_probe(const Connection& c, const ProbeConfig& cfg) {
  TensorField r = riemann_tensor(c);
  return fields_equal_probe(r, TensorField::zero(c.chart(), 3), cfg);
}

Connection levi_civita(const MetricField& g) {
  const std::size_t n = g.dimension();
  std::vector<Expr> dg(n * n * n);  // dg[l][i][j] = d_l g_ij
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) dg[idx3(n, l, i, j)] = differentiate(g(i, j), l);
    }
  }
  std::vector<Expr> gamma(n * n * n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        std::vector<Expr> terms;
        for (std::size_t l = 0; l < n; ++l) {
          if (g.inverse(k, l).is_zero()) continue;
          Expr s = dg[idx3(n, i, j, l)] + dg[idx3(n, j, i, l)] - dg[idx3(n, l, i, j)];
          if (!s.is_zero()) terms.push_back(0.5 * g.inverse(k, l) * s);
        }
        gamma[idx3(n, k, i, j)] = sum(terms);
      }
    }
  }
  return Connection(TensorField(g.chart(), 2, std::move(gamma)), "levi-civita");
}

Connection conjugate(const Connection& c, const MetricField& g) {
  require_same_chart(c.chart(), g.chart());
  const std::size_t n = g.dimension();
  std::vector<Expr> inner(n * n * n);  // inner[i][l][j] = d_i g_lj - Gamma^m_il g_mj
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < n; ++l) {
      for (std::size_t j = 0; j < n; ++j) {
        std::vector<Expr> terms{differentiate(g(l, j), i)};
        for (std::size_t m = 0; m < n; ++m) {
          if (!c.gamma(m, i, l).is_zero()) terms.push_back(-(c.gamma(m, i, l) * g(m, j)));
        }
        inner[idx3(n, i, l, j)] = sum(terms);
      }
    }
  }
  std::vector<Expr> gamma(n * n * n);
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        std::vector<Expr> terms;
        for (std::size_t l = 0; l < n; ++l) {
          const Expr& s = inner[idx3(n, i, l, j)];
          if (!s.is_zero() && !g.inverse(m, l).is_zero()) terms.push_back(g.inverse(m, l) * s);
        }
        gamma[idx3(n, m, i, j)] = sum(terms);
      }
    }
  }
  return Connection(TensorField(g.chart(), 2, std::move(gamma)), "conjugate");
}

EqualityReport conjugate_identity_probe(const Connection& c, const Connection& dual, const MetricField& g,
                                        const ProbeConfig& cfg) {
  auto identity = [&](std::span<const VectorField> f, Rng&) {
    const VectorField& z = f[0];
    const VectorField& x = f[1];
    const VectorField& y = f[2];
    Expr lhs = vf_apply(z, g(x, y));
    Expr rhs = g(covariant_derivative(c, z, x), y) + g(x, covariant_derivative(dual, z, y));
    return Comparison{{lhs}, {rhs}};
  };
  return probe_identity(g.chart(), 3, identity, cfg, "conjugate");
}

EqualityReport metric_compatibility_probe(const Connection& c, const MetricField& g, const ProbeConfig& cfg) {
  std::vector<Expr> nh = nabla_components(g.as_bilinear(), c);
  std::vector<Expr> zero(nh.size());
  const Comparison groups[] = {{std::move(nh), std::move(zero)}};
  return compare_on(groups, probe_points(*g.chart(), cfg), cfg);
}

Expr codazzi_residual(const Bilinear& h, const Connection& c, const VectorField& x, const VectorField& y,
                      const VectorField& z) {
  return covariant_derivative(c, x, h)(y, z) - covariant_derivative(c, y, h)(x, z);
}

EqualityReport codazzi_probe(const Bilinear& h, const Connection& c, const ProbeConfig& cfg) {
  require_same_chart(h.chart(), c.chart());
  const std::size_t n = h.dimension();
  std::vector<Expr> nh = nabla_components(h, c);
  std::vector<Expr> lhs;
  std::vector<Expr> rhs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        lhs.push_back(nh[idx3(n, i, j, k)]);
        rhs.push_back(nh[idx3(n, j, i, k)]);
      }
    }
  }
  const Comparison groups[] = {{std::move(lhs), std::move(rhs)}};
  return compare_on(groups, probe_points(*h.chart(), cfg), cfg);
}

EqualityReport parallel_probe(const Connection& c, const VectorField& v, const ProbeConfig& cfg) {
  const std::size_t n = c.dimension();
  std::vector<Expr> lhs;
  for (std::size_t i = 0; i < n; ++i) {
    auto d = covariant_derivative(c, VectorField::coordinate(c.chart(), i), v);
    lhs.insert(lhs.end(), d.components().begin(), d.components().end());
  }
  std::vector<Expr> zero(lhs.size());
  const Comparison groups[] = {{std::move(lhs), std::move(zero)}};
  return compare_on(groups, probe_points(*c.chart(), cfg), cfg);
}

VectorField gradient(const Expr& f, const MetricField& g) { return sharp(OneForm::differential(g.chart(), f), g); }

Bilinear hessian(const Expr& f, const Connection& c) {
  const std::size_t n = c.dimension();
  std::vector<Expr> df(n);
  for (std::size_t k = 0; k < n; ++k) df[k] = differentiate(f, k);
  std::vector<Expr> h(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<Expr> terms{differentiate(df[j], i)};
      for (std::size_t k = 0; k < n; ++k) {
        if (!c.gamma(k, i, j).is_zero() && !df[k].is_zero()) terms.push_back(-(c.gamma(k, i, j) * df[k]));
      }
      h[i * n + j] = sum(terms);
    }
  }
  return {c.chart(), std::move(h)};
}

Expr laplacian(const Expr& f, const MetricField& g) {
  Bilinear h = hessian(f, levi_civita(g));
  const std::size_t n = g.dimension();
  std::vector<Expr> terms;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!g.inverse(i, j).is_zero() && !h(i, j).is_zero()) terms.push_back(g.inverse(i, j) * h(i, j));
    }
  }
  return sum(terms);
}

}  // namespace kvg
