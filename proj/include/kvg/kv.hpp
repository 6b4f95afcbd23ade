#pragma once

// Koszul-Vinberg cochains of a flat torsion-free connection and their differential.
//
// A degree-n cochain is an R-multilinear map from n vector fields to a vector
// field, represented by an evaluator. Degree-0 cochains are Jacobi vector
// fields, evaluated with no arguments.

#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kvg/connection.hpp"
#include "kvg/fields.hpp"

namespace kvg {

/// A context connection that is not flat or not torsion-free, or a degree-0
/// cochain that is not a Jacobi element.
class SetupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegreeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The KV algebra (vector fields, nabla) on one chart.
class KVContext {
 public:
  /// Throws SetupError unless the flatness and torsion probes pass.
  explicit KVContext(Connection nabla, ProbeConfig cfg = {});

  const ChartPtr& chart() const noexcept { return nabla_.chart(); }
  const Connection& connection() const noexcept { return nabla_; }
  const ProbeConfig& config() const noexcept { return cfg_; }

  VectorField nabla(const VectorField& x, const VectorField& y) const { return covariant_derivative(nabla_, x, y); }

 private:
  Connection nabla_;
  ProbeConfig cfg_;
};

enum class CochainKind {
  Zero,
  Identity,
  ScalarMult,
  Ad,
  Tensor,
  ConnDiff,
  Conformal,
  Projective,
  DualProjective,
  Differential,
  Sum,
  Scale,
  Custom,
};

const char* kind_name(CochainKind kind) noexcept;

class Cochain {
 public:
  using Evaluator = std::function<VectorField(std::span<const VectorField>)>;

  Cochain() = default;
  Cochain(ChartPtr chart, std::size_t degree, Evaluator evaluator, CochainKind kind, std::string description);
  /// Evaluates through the tensor; tensor() stays available.
  Cochain(TensorField tensor, CochainKind kind, std::string description);

  static Cochain zero(ChartPtr chart, std::size_t degree);

  const ChartPtr& chart() const noexcept { return chart_; }
  std::size_t degree() const noexcept { return degree_; }
  CochainKind kind() const noexcept { return kind_; }
  const std::string& description() const noexcept { return description_; }
  const std::optional<TensorField>& tensor() const noexcept { return tensor_; }

  /// Throws std::invalid_argument on wrong arity, ChartMismatch on foreign fields.
  VectorField operator()(std::span<const VectorField> args) const;
  VectorField operator()(std::initializer_list<VectorField> args) const;

 private:
  ChartPtr chart_;
  std::size_t degree_ = 0;
  Evaluator eval_;
  CochainKind kind_ = CochainKind::Zero;
  std::string description_;
  std::optional<TensorField> tensor_;
};

Cochain operator+(const Cochain& a, const Cochain& b);
Cochain operator-(const Cochain& a, const Cochain& b);
Cochain operator-(const Cochain& a);
Cochain operator*(double s, const Cochain& a);

// ---------------------------------------------------------------------------
// Constructors

/// Z as a degree-0 cochain. Throws SetupError if the Jacobi probe fails.
Cochain jacobi_element(const KVContext& ctx, const VectorField& z);
/// X -> X.
Cochain identity_cochain(const ChartPtr& chart);
/// X -> f X.
Cochain scalar_cochain(const ChartPtr& chart, const Expr& f);
/// Y -> [Z, Y].
Cochain ad_cochain(const VectorField& z);
Cochain tensor_cochain(const TensorField& t, std::string description = "T");
/// (X, Y) -> omega(X) Y + omega(Y) X.
Cochain projective_cochain(const OneForm& omega);
/// (X, Y) -> -h(X, Y) V.
Cochain dual_projective_cochain(const Bilinear& h, const VectorField& v);
/// (X, Y) -> -g(X, Y) grad f + (X f) Y + (Y f) X.
Cochain conformal_cochain(const MetricField& g, const Expr& f);
/// nabla - D as a (1,2)-tensor.
Cochain conn_diff_cochain(const Connection& d, const KVContext& ctx);
/// (X, Y) -> D_X Y.
Cochain connection_cochain(const Connection& d);
/// (X, Y) -> nabla_X nabla_Y Z - nabla_{nabla_X Y} Z.
Cochain coboundary_candidate(const VectorField& z, const KVContext& ctx);
/// (X, Y, Z) -> R(X, Y) Z of the given connection.
Cochain curvature_cochain(const Connection& c);
/// The tensor with components theta(d_i1, .., d_in); equal to theta only when theta is tensorial.
Cochain materialize(const Cochain& theta);

// ---------------------------------------------------------------------------
// Differential

/// (nabla_X theta)(X1..Xn) = nabla_X(theta(X1..Xn)) - sum_k theta(.., nabla_X Xk, ..).
Cochain nabla_cochain(const KVContext& ctx, const VectorField& x, const Cochain& theta);

inline constexpr std::size_t kMaxDifferentialDegree = 3;

/// Degree 0: (dZ)(Y) = [Z, Y]. Degree n >= 1:
///   (d theta)(X1..Xn+1) = sum_{i=1}^n (-1)^i [(nabla_{Xi} theta)(X1..^Xi..Xn+1)
///                                             + nabla_{theta(X1..^Xi..Xn, Xi)} Xn+1].
/// Throws DegreeError above kMaxDifferentialDegree.
Cochain d_kv(const KVContext& ctx, const Cochain& theta);

// ---------------------------------------------------------------------------
// Probes. Each draws random polynomial vector fields per trial.

/// a(X1..Xn) against b(X1..Xn).
EqualityReport cochain_equal_probe(const Cochain& a, const Cochain& b, const ProbeConfig& cfg,
                                   std::string_view tag = "cochain");
/// d(d theta) against 0.
EqualityReport d2_probe(const KVContext& ctx, const Cochain& theta, const ProbeConfig& cfg);
/// nabla_X nabla_Y Z - nabla_{nabla_X Y} Z against 0.
EqualityReport jacobi_probe(const KVContext& ctx, const VectorField& z, const ProbeConfig& cfg);
/// theta(X, Y) - theta(Y, X) against 0.
EqualityReport symmetry_probe(const Cochain& theta, const ProbeConfig& cfg);
/// theta(.., f X, ..) against f theta(.., X, ..), worst over slots.
EqualityReport tensoriality_probe(const Cochain& theta, const ProbeConfig& cfg);
/// The same, restricted to one slot.
EqualityReport tensoriality_probe(const Cochain& theta, std::size_t slot, const ProbeConfig& cfg);
/// Additivity and real homogeneity in every slot.
EqualityReport multilinearity_probe(const Cochain& theta, const ProbeConfig& cfg);

// ---------------------------------------------------------------------------
// Random flat structures

/// A flat torsion-free connection with polynomial Christoffel symbols, given by
/// triangular polynomial affine coordinates u^k = x^k + p_k(x^{k+1}, ..).
struct FlatStructure {
  Connection connection;
  std::vector<Expr> affine_coordinates;
};

FlatStructure random_flat_structure(const ChartPtr& chart, Rng& rng);
/// Z^k = (J^-1)^k_a (A u + b)^a with J^a_i = d_i u^a: a Jacobi element of the structure.
VectorField affine_jacobi_field(const FlatStructure& s, std::span<const double> a, std::span<const double> b);
VectorField random_jacobi_field(const FlatStructure& s, Rng& rng);

/// (1,k)-tensor with random polynomial components.
TensorField random_tensor_field(const ChartPtr& chart, std::size_t rank, int degree, Rng& rng);

/// Gram-Schmidt on the coordinate frame.
std::vector<VectorField> orthonormal_frame(const MetricField& g);

}  // namespace kvg
