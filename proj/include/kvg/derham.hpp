#pragma once

// Tangent-valued differential forms and the exterior covariant derivative.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "kvg/connection.hpp"
#include "kvg/fields.hpp"

namespace kvg {

/// Strictly increasing index tuples of length k in 0..n-1, in lexicographic order.
std::vector<std::vector<std::size_t>> increasing_tuples(std::size_t n, std::size_t k);

/// Scalar k-form with components on increasing index tuples.
class ScalarForm {
 public:
  ScalarForm() = default;
  ScalarForm(ChartPtr chart, std::size_t degree, std::vector<Expr> components);

  static ScalarForm zero(ChartPtr chart, std::size_t degree);

  const ChartPtr& chart() const noexcept { return chart_; }
  std::size_t degree() const noexcept { return k_; }
  const std::vector<Expr>& components() const noexcept { return c_; }
  /// Component on an increasing tuple, by its position in increasing_tuples().
  const Expr& operator[](std::size_t tuple) const { return c_[tuple]; }

  Expr operator()(std::span<const VectorField> args) const;

 private:
  ChartPtr chart_;
  std::size_t k_ = 0;
  std::vector<Expr> c_;
};

/// (d omega)_J = sum_a (-1)^a d_{j_a} omega_{J minus j_a}.
ScalarForm exterior_derivative(const ScalarForm& omega);

/// theta = theta^m_I dx^I (x) d_m, I increasing. Component (m, I) is stored at
/// m * C(n,k) + position of I.
class TwistedForm {
 public:
  TwistedForm() = default;
  TwistedForm(ChartPtr chart, std::size_t degree, std::vector<Expr> components);

  static TwistedForm zero(ChartPtr chart, std::size_t degree);
  static TwistedForm from_vector_field(const VectorField& s);
  /// One scalar form per target index.
  static TwistedForm from_scalar_forms(std::span<const ScalarForm> parts);
  /// Sets component (m, lower) for an increasing tuple `lower`.
  TwistedForm with(std::size_t m, std::span<const std::size_t> lower, const Expr& value) const;

  const ChartPtr& chart() const noexcept { return chart_; }
  std::size_t dimension() const noexcept { return n_; }
  std::size_t degree() const noexcept { return k_; }
  const std::vector<Expr>& components() const noexcept { return c_; }
  std::size_t tuple_count() const noexcept { return tuples_; }
  const Expr& at(std::size_t m, std::size_t tuple) const { return c_[m * tuples_ + tuple]; }

  ScalarForm part(std::size_t m) const;

  /// theta(X1..Xk) = sum_I theta^m_I det[X_a^{I_b}] d_m.
  VectorField operator()(std::span<const VectorField> args) const;
  VectorField operator()(std::initializer_list<VectorField> args) const {
    return (*this)(std::span<const VectorField>(args.begin(), args.size()));
  }

 private:
  ChartPtr chart_;
  std::size_t n_ = 0;
  std::size_t k_ = 0;
  std::size_t tuples_ = 0;
  std::vector<Expr> c_;
};

TwistedForm operator-(const TwistedForm& a, const TwistedForm& b);

class DegreeOverflow : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Componentwise: (d theta)^m_J = sum_a (-1)^a (d_{j_a} theta^m_{J-j_a} + Gamma^m_{j_a l} theta^l_{J-j_a}).
/// Throws DegreeOverflow when the degree already equals the dimension.
TwistedForm d_nabla(const Connection& c, const TwistedForm& theta);

/// The invariant formula
///   sum_i (-1)^i nabla_{X_i} theta(..^X_i..) + sum_{i<j} (-1)^{i+j} theta([X_i, X_j], ..^X_i..^X_j..)
/// evaluated at k+1 fields.
VectorField d_nabla_apply(const Connection& c, const TwistedForm& theta, std::span<const VectorField> args);

/// (R ^ theta)^m_J = sum over shuffles (A, B) of J, |A| = 2: sign R^m_{a0 a1 l} theta^l_B.
TwistedForm curvature_wedge(const Connection& c, const TwistedForm& theta);

/// Componentwise d_nabla(d_nabla theta) against curvature_wedge(theta).
EqualityReport curvature_identity_probe(const Connection& c, const TwistedForm& theta, const ProbeConfig& cfg);
/// d_nabla(theta) evaluated through its components against d_nabla_apply on random fields.
EqualityReport d_nabla_formula_probe(const Connection& c, const TwistedForm& theta, const ProbeConfig& cfg);
/// For k = 1: against nabla_X(theta(Y)) - nabla_Y(theta(X)) - theta([X,Y]).
EqualityReport d_nabla_display_probe(const Connection& c, const TwistedForm& theta, const ProbeConfig& cfg);
/// d_nabla_apply changes sign under each adjacent transposition.
EqualityReport antisymmetry_probe(const Connection& c, const TwistedForm& theta, const ProbeConfig& cfg);
/// d_nabla against the target-wise scalar exterior derivative.
EqualityReport scalar_decomposition_probe(const Connection& c, const TwistedForm& theta, const ProbeConfig& cfg);

TwistedForm random_twisted_form(const ChartPtr& chart, std::size_t degree, int poly_degree, Rng& rng);

/// Finite check that a field commuting with every field vanishes: brackets
/// with the coordinate fields force constant components, then the bracket
/// with the Euler field x^j d_j returns the field itself.
struct CommutingCheck {
  /// [X, d_j] against 0 for all j.
  EqualityReport coordinate_stage;
  /// [X, x^j d_j] against 0.
  EqualityReport euler_stage;
  /// [X, x^j d_j] against X (meaningful once the first stage passes).
  EqualityReport euler_identity;
  /// X against 0.
  EqualityReport vanishing;

  bool commutes() const noexcept { return coordinate_stage.pass && euler_stage.pass; }
  /// Commuting with the probe fields implies X = 0.
  bool consistent() const noexcept { return !commutes() || vanishing.pass; }
};

CommutingCheck commuting_lemma_check(const VectorField& x, const ProbeConfig& cfg);

}  // namespace kvg
