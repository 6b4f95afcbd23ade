#include "kvg/fdcheck.hpp"

#include <cmath>

#include "kvg/parser.hpp"

namespace kvg {

using expr::Expr;

double central_difference(const Expr& e, std::vector<double> p, std::size_t i, double h) {
  p[i] += h;
  const double up = expr::evaluate(e, p);
  p[i] -= 2 * h;
  const double down = expr::evaluate(e, p);
  return (up - down) / (2 * h);
}

Expr random_expression(Rng& rng, std::size_t dimension, int depth) {
  if (depth == 0) {
    const auto pick = rng.below(dimension + 1);
    if (pick < dimension) return Expr::variable(pick);
    return Expr(std::round(rng.uniform(-3.0, 3.0) * 4.0) / 4.0);
  }
  Expr a = random_expression(rng, dimension, depth - 1);
  Expr b = random_expression(rng, dimension, depth - 1);
  switch (rng.below(10)) {
    case 0: return a + b;
    case 1: return a - b;
    case 2: return a * b;
    case 3: return a / (2.0 + pow(b, 2));
    case 4: return pow(a, static_cast<int>(rng.below(3)) + 2);
    case 5: return expr::exp(a / (1.0 + pow(a, 2)));
    case 6: return expr::ln(1.0 + pow(a, 2));
    case 7: return expr::sqrt(3.0 + pow(a, 2) * pow(1.0 + pow(b, 2), -1));
    case 8: return expr::sin(a) * expr::cos(b);
    default: return expr::atan(a * b);
  }
}

DerivativeCheck derivative_cross_check(std::uint64_t seed, std::size_t expressions, std::size_t points, double h,
                                       double tolerance) {
  Rng rng(seed);
  DerivativeCheck out;
  for (std::size_t t = 0; t < expressions; ++t) {
    const Expr e = random_expression(rng, 2, 3);
    for (std::size_t var = 0; var < 2; ++var) {
      const Expr d = differentiate(e, var);
      for (std::size_t i = 0; i < points; ++i) {
        std::vector<double> p = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const double exact = expr::evaluate(d, p);
        const double rel = std::fabs(exact - central_difference(e, p, var, h)) / (1 + std::fabs(exact));
        ++out.comparisons;
        if (rel > out.max_relative) {
          out.max_relative = rel;
          out.worst_expression = expr::to_string(e);
        }
      }
    }
  }
  out.pass = out.max_relative <= tolerance;
  return out;
}

}  // namespace kvg
