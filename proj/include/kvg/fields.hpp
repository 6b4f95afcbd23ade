#pragma once

// Tensor fields on a chart and the sampling probes used to compare them.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kvg/batch.hpp"
#include "kvg/chart.hpp"
#include "kvg/expr.hpp"
#include "kvg/rng.hpp"

namespace kvg {

using expr::Expr;

class ChartMismatch : public std::invalid_argument {
 public:
  ChartMismatch() : std::invalid_argument("fields live on different charts") {}
};

class SingularMetric : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void require_same_chart(const ChartPtr& a, const ChartPtr& b);

/// X = sum_k X^k d/dx^k.
class VectorField {
 public:
  VectorField() = default;
  VectorField(ChartPtr chart, std::vector<Expr> components);

  static VectorField zero(ChartPtr chart);
  static VectorField coordinate(ChartPtr chart, std::size_t i);
  /// Parses one component string per coordinate.
  static VectorField parse(ChartPtr chart, const std::vector<std::string>& components);

  const ChartPtr& chart() const noexcept { return chart_; }
  std::size_t dimension() const noexcept { return c_.size(); }
  const Expr& operator[](std::size_t k) const { return c_[k]; }
  const std::vector<Expr>& components() const noexcept { return c_; }

 private:
  ChartPtr chart_;
  std::vector<Expr> c_;
};

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a);
VectorField operator*(const Expr& f, const VectorField& a);

/// omega = sum_k omega_k dx^k.
class OneForm {
 public:
  OneForm() = default;
  OneForm(ChartPtr chart, std::vector<Expr> components);

  static OneForm zero(ChartPtr chart);
  static OneForm differential(ChartPtr chart, const Expr& f);
  static OneForm parse(ChartPtr chart, const std::vector<std::string>& components);

  const ChartPtr& chart() const noexcept { return chart_; }
  std::size_t dimension() const noexcept { return c_.size(); }
  const Expr& operator[](std::size_t k) const { return c_[k]; }
  const std::vector<Expr>& components() const noexcept { return c_; }

  Expr operator()(const VectorField& x) const;

 private:
  ChartPtr chart_;
  std::vector<Expr> c_;
};

OneForm operator+(const OneForm& a, const OneForm& b);
OneForm operator-(const OneForm& a, const OneForm& b);
OneForm operator*(const Expr& f, const OneForm& a);

/// (0,2)-tensor field b_ij, stored row-major.
class Bilinear {
 public:
  Bilinear() = default;
  Bilinear(ChartPtr chart, std::vector<Expr> components);

  static Bilinear zero(ChartPtr chart);

  const ChartPtr& chart() const noexcept { return chart_; }
  std::size_t dimension() const noexcept { return n_; }
  const Expr& operator()(std::size_t i, std::size_t j) const { return c_[i * n_ + j]; }
  const std::vector<Expr>& components() const noexcept { return c_; }

  Expr operator()(const VectorField& x, const VectorField& y) const;
  Bilinear transpose() const;

 private:
  ChartPtr chart_;
  std::size_t n_ = 0;
  std::vector<Expr> c_;
};

Bilinear operator-(const Bilinear& a, const Bilinear& b);

/// Symmetric nondegenerate (0,2)-tensor with its symbolic inverse.
class MetricField {
 public:
  MetricField() = default;
  /// Throws if g_ij and g_ji differ structurally.
  /// Checks |det g| > 1e-10 at the chart's validation points.
  MetricField(ChartPtr chart, std::vector<Expr> components);

  static MetricField euclidean(ChartPtr chart);
  static MetricField parse(ChartPtr chart, const std::vector<std::string>& components);
  /// g_ij = d_i d_j phi.
  static MetricField hessian_of(ChartPtr chart, const Expr& potential);
  /// e^{2f} g.
  MetricField conformal(const Expr& f) const;

  const ChartPtr& chart() const noexcept { return chart_; }
  std::size_t dimension() const noexcept { return n_; }
  const Expr& operator()(std::size_t i, std::size_t j) const { return g_[i * n_ + j]; }
  const Expr& inverse(std::size_t i, std::size_t j) const { return inv_[i * n_ + j]; }
  const Expr& determinant() const noexcept { return det_; }
  const std::vector<Expr>& components() const noexcept { return g_; }

  Expr operator()(const VectorField& x, const VectorField& y) const;
  Bilinear as_bilinear() const;

  /// Leading principal minors positive at every point.
  bool positive_definite_at(const PointSet& points) const;

 private:
  ChartPtr chart_;
  std::size_t n_ = 0;
  std::vector<Expr> g_;
  std::vector<Expr> inv_;
  Expr det_;
};

/// (1,k)-tensor field T^m_{i1..ik}; component (m, i1..ik) is stored at
/// m*n^k + i1*n^(k-1) + ... + ik.
class TensorField {
 public:
  TensorField() = default;
  TensorField(ChartPtr chart, std::size_t covariant_rank, std::vector<Expr> components);

  static TensorField zero(ChartPtr chart, std::size_t covariant_rank);

  const ChartPtr& chart() const noexcept { return chart_; }
  std::size_t dimension() const noexcept { return n_; }
  std::size_t rank() const noexcept { return k_; }
  const std::vector<Expr>& components() const noexcept { return c_; }

  const Expr& at(std::size_t m, std::span<const std::size_t> lower) const;
  std::size_t offset(std::size_t m, std::span<const std::size_t> lower) const;

  VectorField operator()(std::span<const VectorField> args) const;

 private:
  ChartPtr chart_;
  std::size_t n_ = 0;
  std::size_t k_ = 0;
  std::vector<Expr> c_;
};

TensorField operator+(const TensorField& a, const TensorField& b);
TensorField operator-(const TensorField& a, const TensorField& b);
TensorField operator*(double s, const TensorField& a);

/// Determinant of the row-major n x n matrix by cofactor expansion.
Expr determinant(std::span<const Expr> m, std::size_t n);
/// Adjugate divided by the determinant.
std::vector<Expr> inverse_matrix(std::span<const Expr> m, std::size_t n);

/// X f = sum_i X^i d_i f.
Expr vf_apply(const VectorField& x, const Expr& f);
/// [X,Y]^k = sum_i X^i d_i Y^k - Y^i d_i X^k.
VectorField lie_bracket(const VectorField& x, const VectorField& y);
/// (omega^#)^k = g^{kl} omega_l.
VectorField sharp(const OneForm& omega, const MetricField& g);
/// (X^flat)_k = g_kl X^l.
OneForm flat(const VectorField& x, const MetricField& g);

// ---------------------------------------------------------------------------
// Probes

enum class Backend { Parallel, Serial };

struct ProbeConfig {
  std::size_t samples = 100;
  double tolerance = 1e-9;
  std::uint64_t seed = 42;
  /// Random field tuples drawn per identity probe.
  std::size_t trials = 3;
  /// Total degree of random polynomial components.
  int field_degree = 2;
  Backend backend = Backend::Parallel;
};

struct EqualityReport {
  std::size_t sample_count = 0;
  PointSet points;
  std::vector<double> residuals;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::size_t worst_index = 0;

  friend bool operator==(const EqualityReport&, const EqualityReport&) = default;
};

EqualityReport make_report(PointSet points, std::vector<double> residuals, double tolerance);

/// Merges reports over the same points: pointwise maximum.
EqualityReport combine(const EqualityReport& a, const EqualityReport& b);

/// Sample points for a probe; deterministic in (chart, cfg.seed).
PointSet probe_points(const Chart& chart, const ProbeConfig& cfg);

/// One comparison group: residual at p is max_k |lhs_k - rhs_k| / (1 + max_k max(|lhs_k|, |rhs_k|)).
struct Comparison {
  std::vector<Expr> lhs;
  std::vector<Expr> rhs;
};

/// Residual per point, maximized over groups.
std::vector<double> pointwise_residuals(std::span<const Comparison> groups, const PointSet& points, Backend backend);

EqualityReport compare_on(std::span<const Comparison> groups, const PointSet& points, const ProbeConfig& cfg);

EqualityReport fields_equal_probe(const ChartPtr& chart, const Expr& a, const Expr& b, const ProbeConfig& cfg);
EqualityReport fields_equal_probe(const VectorField& a, const VectorField& b, const ProbeConfig& cfg);
EqualityReport fields_equal_probe(const OneForm& a, const OneForm& b, const ProbeConfig& cfg);
EqualityReport fields_equal_probe(const Bilinear& a, const Bilinear& b, const ProbeConfig& cfg);
EqualityReport fields_equal_probe(const TensorField& a, const TensorField& b, const ProbeConfig& cfg);

/// Draws `arity` random polynomial vector fields per trial and compares
/// the two sides produced by `identity`.
using FieldIdentity = std::function<Comparison(std::span<const VectorField>, Rng&)>;
EqualityReport probe_identity(const ChartPtr& chart, std::size_t arity, const FieldIdentity& identity,
                              const ProbeConfig& cfg, std::string_view tag = {});

/// Random polynomial in the chart coordinates with coefficients in [-1, 1].
Expr random_polynomial(std::size_t dimension, int degree, Rng& rng);
VectorField random_vector_field(const ChartPtr& chart, int degree, Rng& rng);
OneForm random_one_form(const ChartPtr& chart, int degree, Rng& rng);

}  // namespace kvg
