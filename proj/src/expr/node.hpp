#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "kvg/expr.hpp"

namespace kvg::expr::detail {

struct Node {
  Op op = Op::Const;
  double value = 0.0;
  std::size_t index = 0;
  int exponent = 0;
  std::vector<Expr> args;
  std::vector<double> coeffs;
  std::uint64_t hash = 0;
  std::uint64_t vars = 0;
};

// Numeric primitives shared by the recursive evaluator and the tape so both
// paths produce bitwise-identical results.

inline double ipow(double base, int e) {
  unsigned n = e < 0 ? static_cast<unsigned>(-static_cast<long>(e)) : static_cast<unsigned>(e);
  double result = 1.0;
  double b = base;
  while (n != 0) {
    if (n & 1U) result *= b;
    b *= b;
    n >>= 1U;
  }
  return e < 0 ? 1.0 / result : result;
}

enum class Fault : std::uint8_t { None, DivisionByZero, LogDomain, SqrtDomain, Atan2Origin };

inline const char* fault_message(Fault f) {
  switch (f) {
    case Fault::DivisionByZero: return "division by zero";
    case Fault::LogDomain: return "ln of non-positive argument";
    case Fault::SqrtDomain: return "sqrt of negative argument";
    case Fault::Atan2Origin: return "atan2 at the origin";
    case Fault::None: break;
  }
  return "non-finite value";
}

inline double apply_unary(Op op, double a, Fault& fault) {
  switch (op) {
    case Op::Exp: return std::exp(a);
    case Op::Ln:
      if (!(a > 0.0)) fault = Fault::LogDomain;
      return std::log(a);
    case Op::Sqrt:
      if (a < 0.0) fault = Fault::SqrtDomain;
      return std::sqrt(a);
    case Op::Sin: return std::sin(a);
    case Op::Cos: return std::cos(a);
    case Op::Atan: return std::atan(a);
    default: break;
  }
  return a;
}

inline double apply_atan2(double y, double x, Fault& fault) {
  if (y == 0.0 && x == 0.0) fault = Fault::Atan2Origin;
  return std::atan2(y, x);
}

inline double apply_pow(double base, int e, Fault& fault) {
  if (e < 0 && base == 0.0) fault = Fault::DivisionByZero;
  return ipow(base, e);
}

}  // namespace kvg::expr::detail
