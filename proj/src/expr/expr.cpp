#include "kvg/expr.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "node.hpp"

namespace kvg::expr {

using detail::Node;

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  v *= 0xff51afd7ed558ccdULL;
  v ^= v >> 33U;
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6U) + (h >> 2U);
  return h;
}

std::uint64_t bits(double v) { return std::bit_cast<std::uint64_t>(v == 0.0 ? 0.0 : v); }

std::uint64_t var_bit(std::size_t index) { return std::uint64_t{1} << std::min<std::size_t>(index, 63); }

}  // namespace

Expr make_node(Node&& node) {
  std::uint64_t h = mix(0x243f6a8885a308d3ULL, static_cast<std::uint64_t>(node.op));
  std::uint64_t vars = 0;
  switch (node.op) {
    case Op::Const: h = mix(h, bits(node.value)); break;
    case Op::Pi: break;
    case Op::Var:
      h = mix(h, node.index);
      vars = var_bit(node.index);
      break;
    default:
      h = mix(h, bits(node.value));
      h = mix(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(node.exponent)));
      for (const auto& a : node.args) {
        h = mix(h, a.hash());
        vars |= a.free_variables();
      }
      for (double c : node.coeffs) h = mix(h, bits(c));
      break;
  }
  node.hash = h;
  node.vars = vars;
  return Expr(std::make_shared<const Node>(std::move(node)));
}

namespace {

Expr raw(Op op, std::vector<Expr> args, double value = 0.0, int exponent = 0,
         std::vector<double> coeffs = {}) {
  Node n;
  n.op = op;
  n.args = std::move(args);
  n.value = value;
  n.exponent = exponent;
  n.coeffs = std::move(coeffs);
  return make_node(std::move(n));
}

const Expr& zero() {
  static const Expr z = Expr::constant(0.0);
  return z;
}

const Expr& one() {
  static const Expr o = Expr::constant(1.0);
  return o;
}

int rank(Op op) { return static_cast<int>(op); }

}  // namespace

Expr::Expr() : Expr(zero()) {}

Expr::Expr(double value) : Expr(constant(value)) {}

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::constant(double value) {
  Node n;
  n.op = Op::Const;
  n.value = value == 0.0 ? 0.0 : value;
  return make_node(std::move(n));
}

Expr Expr::pi() {
  static const Expr p = [] {
    Node n;
    n.op = Op::Pi;
    n.value = std::numbers::pi;
    return make_node(std::move(n));
  }();
  return p;
}

Expr Expr::variable(std::size_t index) {
  Node n;
  n.op = Op::Var;
  n.index = index;
  return make_node(std::move(n));
}

Op Expr::op() const noexcept { return node_->op; }
double Expr::value() const noexcept { return node_->value; }
std::size_t Expr::index() const noexcept { return node_->index; }
int Expr::exponent() const noexcept { return node_->exponent; }
std::span<const Expr> Expr::args() const noexcept { return node_->args; }
std::span<const double> Expr::coefficients() const noexcept { return node_->coeffs; }
std::uint64_t Expr::hash() const noexcept { return node_->hash; }
std::uint64_t Expr::free_variables() const noexcept { return node_->vars; }

bool Expr::depends_on(std::size_t index) const noexcept { return (node_->vars & var_bit(index)) != 0; }

std::size_t Expr::node_count() const {
  std::unordered_set<const Node*> seen;
  std::vector<const Node*> stack{node_.get()};
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    for (const auto& a : n->args) stack.push_back(a.id());
  }
  return seen.size();
}

int compare(const Expr& a, const Expr& b) {
  if (a.id() == b.id()) return 0;
  if (a.op() != b.op()) return rank(a.op()) < rank(b.op()) ? -1 : 1;
  switch (a.op()) {
    case Op::Const:
      if (a.value() == b.value()) return 0;
      return a.value() < b.value() ? -1 : 1;
    case Op::Pi: return 0;
    case Op::Var:
      if (a.index() == b.index()) return 0;
      return a.index() < b.index() ? -1 : 1;
    case Op::Pow: {
      if (int c = compare(a.args()[0], b.args()[0]); c != 0) return c;
      if (a.exponent() == b.exponent()) return 0;
      return a.exponent() < b.exponent() ? -1 : 1;
    }
    default: break;
  }
  if (a.hash() != b.hash()) return a.hash() < b.hash() ? -1 : 1;
  // Equal hashes: full structural comparison.
  if (a.value() != b.value()) return a.value() < b.value() ? -1 : 1;
  if (a.exponent() != b.exponent()) return a.exponent() < b.exponent() ? -1 : 1;
  auto ca = a.coefficients();
  auto cb = b.coefficients();
  if (ca.size() != cb.size()) return ca.size() < cb.size() ? -1 : 1;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if (ca[i] != cb[i]) return ca[i] < cb[i] ? -1 : 1;
  }
  auto xa = a.args();
  auto xb = b.args();
  if (xa.size() != xb.size()) return xa.size() < xb.size() ? -1 : 1;
  for (std::size_t i = 0; i < xa.size(); ++i) {
    if (int c = compare(xa[i], xb[i]); c != 0) return c;
  }
  return 0;
}

bool operator==(const Expr& a, const Expr& b) { return a.hash() == b.hash() && compare(a, b) == 0; }

// ---------------------------------------------------------------------------
// Builders

namespace {

// Splits a non-constant term into (numeric coefficient, monic term).
std::pair<double, Expr> split_coefficient(const Expr& t) {
  if (t.op() != Op::Mul || t.value() == 1.0) return {1.0, t};
  auto factors = t.args();
  if (factors.size() == 1) return {t.value(), factors[0]};
  return {t.value(), raw(Op::Mul, std::vector<Expr>(factors.begin(), factors.end()), 1.0)};
}

Expr with_coefficient(double c, const Expr& monic) {
  if (c == 1.0) return monic;
  if (c == 0.0) return zero();
  if (monic.op() == Op::Mul) {
    return raw(Op::Mul, std::vector<Expr>(monic.args().begin(), monic.args().end()), c * monic.value());
  }
  return raw(Op::Mul, {monic}, c);
}

Expr scale_sum(const Expr& s, double c) {
  std::vector<double> coeffs(s.coefficients().begin(), s.coefficients().end());
  for (double& k : coeffs) k *= c;
  return raw(Op::Add, std::vector<Expr>(s.args().begin(), s.args().end()), s.value() * c, 0, std::move(coeffs));
}

bool fold_ok(double v) { return std::isfinite(v); }

}  // namespace

Expr sum(std::span<const Expr> terms) {
  double constant = 0.0;
  std::vector<std::pair<Expr, double>> items;
  items.reserve(terms.size());
  for (const auto& t : terms) {
    switch (t.op()) {
      case Op::Const: constant += t.value(); break;
      case Op::Add: {
        constant += t.value();
        auto args = t.args();
        auto coeffs = t.coefficients();
        for (std::size_t i = 0; i < args.size(); ++i) items.emplace_back(args[i], coeffs[i]);
        break;
      }
      default: {
        auto [c, m] = split_coefficient(t);
        items.emplace_back(std::move(m), c);
      }
    }
  }
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& a, const auto& b) { return compare(a.first, b.first) < 0; });
  std::vector<Expr> args;
  std::vector<double> coeffs;
  for (std::size_t i = 0; i < items.size();) {
    double c = items[i].second;
    std::size_t j = i + 1;
    while (j < items.size() && items[j].first == items[i].first) c += items[j++].second;
    if (c != 0.0) {
      args.push_back(items[i].first);
      coeffs.push_back(c);
    }
    i = j;
  }
  if (args.empty()) return Expr::constant(constant);
  if (args.size() == 1 && constant == 0.0) return with_coefficient(coeffs[0], args[0]);
  return raw(Op::Add, std::move(args), constant == 0.0 ? 0.0 : constant, 0, std::move(coeffs));
}

Expr product(std::span<const Expr> factors) {
  double coeff = 1.0;
  std::vector<std::pair<Expr, int>> items;
  auto push = [&items](const Expr& f) {
    if (f.op() == Op::Pow) {
      items.emplace_back(f.args()[0], f.exponent());
    } else {
      items.emplace_back(f, 1);
    }
  };
  for (const auto& f : factors) {
    switch (f.op()) {
      case Op::Const: coeff *= f.value(); break;
      case Op::Mul:
        coeff *= f.value();
        for (const auto& a : f.args()) push(a);
        break;
      default: push(f);
    }
  }
  if (coeff == 0.0) return zero();
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& a, const auto& b) { return compare(a.first, b.first) < 0; });
  std::vector<Expr> out;
  for (std::size_t i = 0; i < items.size();) {
    int e = items[i].second;
    std::size_t j = i + 1;
    while (j < items.size() && items[j].first == items[i].first) e += items[j++].second;
    if (e != 0) {
      const Expr& base = items[i].first;
      if (e == 1) {
        out.push_back(base);
      } else if (base.is_constant() && base.value() != 0.0) {
        coeff *= detail::ipow(base.value(), e);
      } else {
        out.push_back(raw(Op::Pow, {base}, 0.0, e));
      }
    }
    i = j;
  }
  if (out.empty()) return Expr::constant(coeff);
  if (out.size() == 1) {
    if (coeff == 1.0) return out[0];
    if (out[0].op() == Op::Add) return scale_sum(out[0], coeff);
  }
  std::sort(out.begin(), out.end(), [](const Expr& a, const Expr& b) { return compare(a, b) < 0; });
  return raw(Op::Mul, std::move(out), coeff);
}

Expr pow(const Expr& base, int exponent) {
  if (exponent == 0) return one();
  if (exponent == 1) return base;
  switch (base.op()) {
    case Op::Const: {
      if (base.value() == 0.0) {
        if (exponent > 0) return zero();
        break;
      }
      double v = detail::ipow(base.value(), exponent);
      if (fold_ok(v)) return Expr::constant(v);
      break;
    }
    case Op::Pow: return pow(base.args()[0], base.exponent() * exponent);
    case Op::Mul: {
      std::vector<Expr> fs;
      fs.reserve(base.args().size() + 1);
      fs.push_back(pow(Expr::constant(base.value()), exponent));
      for (const auto& f : base.args()) fs.push_back(pow(f, exponent));
      return product(fs);
    }
    default: break;
  }
  return raw(Op::Pow, {base}, 0.0, exponent);
}

namespace {

Expr unary(Op op, const Expr& a) {
  if (a.is_constant()) {
    detail::Fault fault = detail::Fault::None;
    double v = detail::apply_unary(op, a.value(), fault);
    if (fault == detail::Fault::None && fold_ok(v)) return Expr::constant(v);
  }
  return raw(op, {a});
}

}  // namespace

Expr exp(const Expr& a) { return unary(Op::Exp, a); }
Expr ln(const Expr& a) { return unary(Op::Ln, a); }
Expr sqrt(const Expr& a) { return unary(Op::Sqrt, a); }
Expr sin(const Expr& a) { return unary(Op::Sin, a); }
Expr cos(const Expr& a) { return unary(Op::Cos, a); }
Expr atan(const Expr& a) { return unary(Op::Atan, a); }

Expr atan2(const Expr& y, const Expr& x) {
  if (y.is_constant() && x.is_constant()) {
    detail::Fault fault = detail::Fault::None;
    double v = detail::apply_atan2(y.value(), x.value(), fault);
    if (fault == detail::Fault::None) return Expr::constant(v);
  }
  return raw(Op::Atan2, {y, x});
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const Expr terms[] = {a, b};
  return sum(terms);
}

Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr::constant(-a.value());
  const Expr factors[] = {Expr::constant(-1.0), a};
  return product(factors);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (b.is_zero()) return a;
  return a + (-b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return zero();
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  const Expr factors[] = {a, b};
  return product(factors);
}

Expr operator/(const Expr& a, const Expr& b) { return a * pow(b, -1); }

Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }

// ---------------------------------------------------------------------------
// Differentiation, rebuilding, substitution

namespace {

class Differentiator {
 public:
  explicit Differentiator(std::size_t index) : index_(index) {}

  Expr operator()(const Expr& e) {
    if (!e.depends_on(index_)) return zero();
    if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
    Expr d = compute(e);
    memo_.emplace(e.id(), d);
    return d;
  }

 private:
  Expr compute(const Expr& e) {
    auto args = e.args();
    switch (e.op()) {
      case Op::Var: return e.index() == index_ ? one() : zero();
      case Op::Add: {
        std::vector<Expr> terms;
        auto coeffs = e.coefficients();
        for (std::size_t i = 0; i < args.size(); ++i) {
          if (args[i].depends_on(index_)) terms.push_back(coeffs[i] * (*this)(args[i]));
        }
        return sum(terms);
      }
      case Op::Mul: {
        std::vector<Expr> terms;
        for (std::size_t j = 0; j < args.size(); ++j) {
          if (!args[j].depends_on(index_)) continue;
          std::vector<Expr> fs;
          fs.reserve(args.size() + 1);
          fs.push_back(Expr::constant(e.value()));
          for (std::size_t k = 0; k < args.size(); ++k) {
            if (k != j) fs.push_back(args[k]);
          }
          fs.push_back((*this)(args[j]));
          terms.push_back(product(fs));
        }
        return sum(terms);
      }
      case Op::Pow: {
        const Expr& b = args[0];
        const Expr fs[] = {Expr::constant(e.exponent()), pow(b, e.exponent() - 1), (*this)(b)};
        return product(fs);
      }
      case Op::Exp: return e * (*this)(args[0]);
      case Op::Ln: return (*this)(args[0]) * pow(args[0], -1);
      case Op::Sqrt: return 0.5 * (*this)(args[0]) * pow(e, -1);
      case Op::Sin: return cos(args[0]) * (*this)(args[0]);
      case Op::Cos: return -(sin(args[0]) * (*this)(args[0]));
      case Op::Atan: return (*this)(args[0]) * pow(1.0 + pow(args[0], 2), -1);
      case Op::Atan2: {
        const Expr& y = args[0];
        const Expr& x = args[1];
        return (x * (*this)(y) - y * (*this)(x)) * pow(pow(x, 2) + pow(y, 2), -1);
      }
      case Op::Const:
      case Op::Pi: break;
    }
    return zero();
  }

  std::size_t index_;
  std::unordered_map<const Node*, Expr> memo_;
};

// Bottom-up rebuild through the builders, with an optional leaf mapping.
template <class Leaf>
class Rebuilder {
 public:
  explicit Rebuilder(Leaf leaf) : leaf_(std::move(leaf)) {}

  Expr operator()(const Expr& e) {
    if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
    Expr r = compute(e);
    memo_.emplace(e.id(), r);
    return r;
  }

 private:
  Expr compute(const Expr& e) {
    auto args = e.args();
    switch (e.op()) {
      case Op::Const:
      case Op::Pi:
      case Op::Var: return leaf_(e);
      case Op::Add: {
        std::vector<Expr> terms;
        terms.push_back(Expr::constant(e.value()));
        auto coeffs = e.coefficients();
        for (std::size_t i = 0; i < args.size(); ++i) terms.push_back(coeffs[i] * (*this)(args[i]));
        return sum(terms);
      }
      case Op::Mul: {
        std::vector<Expr> fs;
        fs.push_back(Expr::constant(e.value()));
        for (const auto& a : args) fs.push_back((*this)(a));
        return product(fs);
      }
      case Op::Pow: return pow((*this)(args[0]), e.exponent());
      case Op::Atan2: return atan2((*this)(args[0]), (*this)(args[1]));
      default: return unary(e.op(), (*this)(args[0]));
    }
  }

  Leaf leaf_;
  std::unordered_map<const Node*, Expr> memo_;
};

}  // namespace

Expr differentiate(const Expr& e, std::size_t index) { return Differentiator(index)(e); }

Expr simplify(const Expr& e) {
  auto leaf = [](const Expr& x) { return x; };
  return Rebuilder<decltype(leaf)>(leaf)(e);
}

Expr substitute(const Expr& e, std::span<const Expr> replacements) {
  auto leaf = [replacements](const Expr& x) {
    if (x.op() == Op::Var && x.index() < replacements.size()) return replacements[x.index()];
    return x;
  };
  return Rebuilder<decltype(leaf)>(leaf)(e);
}

// ---------------------------------------------------------------------------
// Reference evaluation

DomainError::DomainError(const std::string& what, Expr offending)
    : std::runtime_error(what), offending_(std::move(offending)) {}

namespace {

class Evaluator {
 public:
  explicit Evaluator(std::span<const double> point) : point_(point) {}

  double operator()(const Expr& e) {
    if (e.op() == Op::Const) return e.value();
    if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
    double v = compute(e);
    memo_.emplace(e.id(), v);
    return v;
  }

 private:
  double compute(const Expr& e) {
    detail::Fault fault = detail::Fault::None;
    auto args = e.args();
    double v = 0.0;
    switch (e.op()) {
      case Op::Const:
      case Op::Pi: v = e.value(); break;
      case Op::Var:
        if (e.index() >= point_.size()) throw DomainError("variable index outside point dimension", e);
        v = point_[e.index()];
        break;
      case Op::Add: {
        v = e.value();
        auto coeffs = e.coefficients();
        for (std::size_t i = 0; i < args.size(); ++i) v += coeffs[i] * (*this)(args[i]);
        break;
      }
      case Op::Mul: {
        v = e.value();
        for (const auto& a : args) v *= (*this)(a);
        break;
      }
      case Op::Pow: v = detail::apply_pow((*this)(args[0]), e.exponent(), fault); break;
      case Op::Atan2: {
        double y = (*this)(args[0]);
        double x = (*this)(args[1]);
        v = detail::apply_atan2(y, x, fault);
        break;
      }
      default: v = detail::apply_unary(e.op(), (*this)(args[0]), fault); break;
    }
    if (fault != detail::Fault::None || !std::isfinite(v)) {
      throw DomainError(std::string(detail::fault_message(fault)) + " in '" + to_string(e) + "'", e);
    }
    return v;
  }

  std::span<const double> point_;
  std::unordered_map<const Node*, double> memo_;
};

}  // namespace

double evaluate(const Expr& e, std::span<const double> point) { return Evaluator(point)(e); }

}  // namespace kvg::expr
