#pragma once

// Text syntax for scalar expressions.
//
//   expression := term { ("+" | "-") term }
//   term       := unary { ("*" | "/") unary }
//   unary      := ("+" | "-") unary | power
//   power      := primary [ "^" unary ]          (exponent must fold to an integer)
//   primary    := number | "pi" | coordinate | function "(" args ")" | "(" expression ")"
//   function   := "exp" | "ln" | "sqrt" | "sin" | "cos" | "atan"   (one argument)
//               | "atan2"                                           (two arguments)
//   number     := digits [ "." digits ] [ ("e" | "E") [sign] digits ]
//   inequality := expression (">" | "<") expression

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "kvg/expr.hpp"

namespace kvg::expr {

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, UnknownIdentifier, Arity, NonIntegerExponent };

  ParseError(Kind kind, std::size_t position, const std::string& message);

  Kind kind() const noexcept { return kind_; }
  std::size_t position() const noexcept { return position_; }

 private:
  Kind kind_;
  std::size_t position_;
};

Expr parse(std::string_view text, std::span<const std::string> variables);

/// `greater > lesser`.
struct Inequality {
  Expr greater;
  Expr lesser;
};

Inequality parse_inequality(std::string_view text, std::span<const std::string> variables);

bool is_reserved_name(std::string_view name);

}  // namespace kvg::expr
