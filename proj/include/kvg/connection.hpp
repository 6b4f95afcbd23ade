#pragma once

// Affine connections given by Christoffel symbols on a single chart.
//
// Convention: nabla_{d_i} d_j = Gamma^k_{ij} d_k, so
//   (nabla_X Y)^k = X(Y^k) + Gamma^k_{ij} X^i Y^j.
// Curvature is R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_{[X,Y]} Z.

#include <string>
#include <vector>

#include "kvg/fields.hpp"

namespace kvg {

class Connection {
 public:
  Connection() = default;
  /// Christoffel symbols as the (1,2)-tensor Gamma(X, Y) = Gamma^k_{ij} X^i Y^j.
  explicit Connection(TensorField christoffel, std::string label = {});

  static Connection flat(ChartPtr chart);
  /// Gamma^k_{ij} given as strings ordered k, i, j.
  static Connection parse(ChartPtr chart, const std::vector<std::string>& symbols, std::string label = {});
  /// The flat connection whose affine coordinates are u^1..u^n:
  /// Gamma^k_{ij} = (J^-1)^k_a d_i d_j u^a with J^a_i = d_i u^a.
  static Connection affine_pullback(ChartPtr chart, const std::vector<Expr>& affine_coordinates,
                                    std::string label = {});

  const ChartPtr& chart() const noexcept { return gamma_.chart(); }
  std::size_t dimension() const noexcept { return gamma_.dimension(); }
  const Expr& gamma(std::size_t k, std::size_t i, std::size_t j) const;
  const TensorField& christoffel() const noexcept { return gamma_; }
  const std::string& label() const noexcept { return label_; }

  /// nabla + theta.
  Connection deformed(const TensorField& theta, std::string label = {}) const;
  /// this - other, a (1,2)-tensor.
  TensorField difference(const Connection& other) const;

 private:
  TensorField gamma_;
  std::string label_;
};

/// (a + b) / 2.
Connection midpoint(const Connection& a, const Connection& b);

VectorField covariant_derivative(const Connection& c, const VectorField& x, const VectorField& y);
/// (nabla_X omega)(Y) = X(omega(Y)) - omega(nabla_X Y).
OneForm covariant_derivative(const Connection& c, const VectorField& x, const OneForm& omega);
/// (nabla_X h)(Y,Z) = X(h(Y,Z)) - h(nabla_X Y, Z) - h(Y, nabla_X Z).
Bilinear covariant_derivative(const Connection& c, const VectorField& x, const Bilinear& h);

/// T^k_{ij} = Gamma^k_{ij} - Gamma^k_{ji}.
TensorField torsion_tensor(const Connection& c);
/// T(X,Y) = nabla_X Y - nabla_Y X - [X,Y].
VectorField torsion(const Connection& c, const VectorField& x, const VectorField& y);
/// Probes T(X,Y) against 0 on random field pairs.
EqualityReport torsion_probe(const Connection& c, const ProbeConfig& cfg);

VectorField curvature(const Connection& c, const VectorField& x, const VectorField& y, const VectorField& z);
/// R as a (1,3)-tensor with lower slots ordered (X, Y, Z) as in curvature():
/// R^k_{ijl} = d_i Gamma^k_{jl} - d_j Gamma^k_{il} + Gamma^k_{im} Gamma^m_{jl} - Gamma^k_{jm} Gamma^m_{il}.
TensorField riemann_tensor(const Connection& c);
/// Probes every curvature component against 0.
EqualityReport flatness_probe(const Connection& c, const ProbeConfig& cfg);

/// Gamma^k_{ij} = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij).
Connection levi_civita(const MetricField& g);
/// Z g(X,Y) = g(nabla_Z X, Y) + g(X, nabla*_Z Y) gives
/// Gamma*^m_{ij} = g^{ml} (d_i g_lj - Gamma^n_{il} g_nj).
Connection conjugate(const Connection& c, const MetricField& g);

/// Z g(X,Y) - g(nabla_Z X, Y) - g(X, nabla*_Z Y) on random triples.
EqualityReport conjugate_identity_probe(const Connection& c, const Connection& dual, const MetricField& g,
                                        const ProbeConfig& cfg);
/// nabla g = 0, componentwise.
EqualityReport metric_compatibility_probe(const Connection& c, const MetricField& g, const ProbeConfig& cfg);

/// (nabla_X h)(Y,Z) - (nabla_Y h)(X,Z).
Expr codazzi_residual(const Bilinear& h, const Connection& c, const VectorField& x, const VectorField& y,
                      const VectorField& z);
/// Probes the Codazzi residual on every triple of coordinate fields.
EqualityReport codazzi_probe(const Bilinear& h, const Connection& c, const ProbeConfig& cfg);

/// nabla V = 0, componentwise.
EqualityReport parallel_probe(const Connection& c, const VectorField& v, const ProbeConfig& cfg);

VectorField gradient(const Expr& f, const MetricField& g);
/// (nabla df)(X, Y) = (nabla_X df)(Y).
Bilinear hessian(const Expr& f, const Connection& c);
/// Trace of the Levi-Civita Hessian: g^{ij} (nabla df)_{ij}.
Expr laplacian(const Expr& f, const MetricField& g);

}  // namespace kvg
