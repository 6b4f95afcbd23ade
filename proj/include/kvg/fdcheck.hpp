#pragma once

// Symbolic derivatives against central differences on random expressions.

#include <cstdint>
#include <string>
#include <vector>

#include "kvg/expr.hpp"
#include "kvg/rng.hpp"

namespace kvg {

/// (f(p + h e_i) - f(p - h e_i)) / 2h.
double central_difference(const expr::Expr& e, std::vector<double> p, std::size_t i, double h);

/// A random expression tree of the given depth over `dimension` variables,
/// defined everywhere on [-1, 1]^dimension.
expr::Expr random_expression(Rng& rng, std::size_t dimension, int depth);

struct DerivativeCheck {
  std::size_t comparisons = 0;
  /// max |d_i e - fd| / (1 + |d_i e|).
  double max_relative = 0.0;
  std::string worst_expression;
  bool pass = false;
};

/// Every partial derivative of `expressions` random depth-3 trees on 2 variables,
/// at `points` uniform points of [-1, 1]^2, step h.
DerivativeCheck derivative_cross_check(std::uint64_t seed, std::size_t expressions, std::size_t points,
                                       double h = 1e-5, double tolerance = 1e-5);

}  // namespace kvg
