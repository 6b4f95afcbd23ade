#pragma once

// Closed-form scalar expressions over chart coordinates.
//
// Expressions are immutable DAGs of shared nodes. Every builder returns a
// canonical form: sums and products are flattened, numeric coefficients are
// folded, like terms and like bases are collected, and children are sorted
// by a deterministic total order. Structural equality on canonical forms is
// sound but not complete.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kvg::expr {

enum class Op : std::uint8_t {
  Const,
  Pi,
  Var,
  Pow,
  Mul,
  Add,
  Exp,
  Ln,
  Sqrt,
  Sin,
  Cos,
  Atan,
  Atan2,
};

namespace detail {
struct Node;
}

class Expr {
 public:
  Expr();
  Expr(double value);  // NOLINT(google-explicit-constructor)

  static Expr constant(double value);
  static Expr pi();
  static Expr variable(std::size_t index);

  Op op() const noexcept;
  /// Const: the value. Add: the constant term. Mul: the numeric coefficient.
  double value() const noexcept;
  std::size_t index() const noexcept;
  int exponent() const noexcept;
  std::span<const Expr> args() const noexcept;
  /// Add only: coefficient of each term in args().
  std::span<const double> coefficients() const noexcept;

  std::uint64_t hash() const noexcept;
  /// Bitmask of referenced variables; indices >= 63 share the top bit.
  std::uint64_t free_variables() const noexcept;
  bool depends_on(std::size_t index) const noexcept;

  bool is_constant() const noexcept { return op() == Op::Const; }
  bool is_zero() const noexcept { return is_constant() && value() == 0.0; }
  bool is_one() const noexcept { return is_constant() && value() == 1.0; }

  /// Number of distinct nodes reachable from this expression.
  std::size_t node_count() const;

  const detail::Node* id() const noexcept { return node_.get(); }

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const detail::Node> node);
  std::shared_ptr<const detail::Node> node_;

  friend Expr make_node(detail::Node&& node);
};

/// Deterministic total order used for canonical sorting.
int compare(const Expr& a, const Expr& b);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr& operator+=(Expr& a, const Expr& b);
Expr& operator-=(Expr& a, const Expr& b);
Expr& operator*=(Expr& a, const Expr& b);

Expr sum(std::span<const Expr> terms);
Expr product(std::span<const Expr> factors);
Expr pow(const Expr& base, int exponent);
Expr exp(const Expr& a);
Expr ln(const Expr& a);
Expr sqrt(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr atan(const Expr& a);
Expr atan2(const Expr& y, const Expr& x);

/// Exact partial derivative with respect to variable `index`.
Expr differentiate(const Expr& e, std::size_t index);

/// Rebuilds `e` bottom-up through the canonicalizing builders.
Expr simplify(const Expr& e);

/// Replaces variable i by replacements[i].
Expr substitute(const Expr& e, std::span<const Expr> replacements);

class DomainError : public std::runtime_error {
 public:
  DomainError(const std::string& what, Expr offending);
  const Expr& offending() const noexcept { return offending_; }

 private:
  Expr offending_;
};

/// Recursive reference evaluation. Throws DomainError for ln/sqrt/division
/// outside their domain or any non-finite intermediate.
double evaluate(const Expr& e, std::span<const double> point);

/// Prints in the published grammar; `names[i]` names variable i.
std::string to_string(const Expr& e, std::span<const std::string> names);
/// Prints with variables named x1, x2, ...
std::string to_string(const Expr& e);

}  // namespace kvg::expr
