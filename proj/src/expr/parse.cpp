#include "kvg/parser.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <vector>

namespace kvg::expr {

ParseError::ParseError(Kind kind, std::size_t position, const std::string& message)
    : std::runtime_error(message + " at position " + std::to_string(position)), kind_(kind), position_(position) {}

namespace {

struct FunctionInfo {
  std::string_view name;
  Op op;
  std::size_t arity;
};

constexpr FunctionInfo kFunctions[] = {
    {"exp", Op::Exp, 1},   {"ln", Op::Ln, 1},     {"sqrt", Op::Sqrt, 1}, {"sin", Op::Sin, 1},
    {"cos", Op::Cos, 1},   {"atan", Op::Atan, 1}, {"atan2", Op::Atan2, 2},
};

class Parser {
 public:
  Parser(std::string_view text, std::span<const std::string> variables) : text_(text), vars_(variables) {}

  Expr expression() {
    Expr lhs = term();
    for (;;) {
      skip();
      if (accept('+')) {
        lhs = lhs + term();
      } else if (accept('-')) {
        lhs = lhs - term();
      } else {
        return lhs;
      }
    }
  }

  char peek() {
    skip();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool at_end() {
    skip();
    return pos_ >= text_.size();
  }

  std::size_t position() const { return pos_; }

  [[noreturn]] void fail(ParseError::Kind kind, std::size_t at, const std::string& msg) const {
    throw ParseError(kind, at, msg);
  }

 private:
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      skip();
      if (accept('*')) {
        lhs = lhs * unary();
      } else if (accept('/')) {
        lhs = lhs / unary();
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (!accept('^')) return base;
    std::size_t at = pos_;
    Expr e = unary();
    if (!e.is_constant() || e.value() != std::trunc(e.value()) || std::fabs(e.value()) > 1e6) {
      fail(ParseError::Kind::NonIntegerExponent, at, "exponent must be an integer constant");
    }
    return pow(base, static_cast<int>(e.value()));
  }

  Expr primary() {
    skip();
    if (pos_ >= text_.size()) fail(ParseError::Kind::Syntax, pos_, "unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expression();
      if (!accept(')')) fail(ParseError::Kind::Syntax, pos_, "expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail(ParseError::Kind::Syntax, pos_, std::string("unexpected character '") + c + "'");
  }

  Expr number() {
    std::size_t start = pos_;
    auto digits = [this] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        digits();
      } else {
        pos_ = save;
      }
    }
    double v = 0.0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_) {
      fail(ParseError::Kind::Syntax, start, "malformed number");
    }
    return Expr::constant(v);
  }

  Expr identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    std::string_view name = text_.substr(start, pos_ - start);
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i] == name) return Expr::variable(i);
    }
    if (name == "pi") return Expr::pi();
    for (const auto& f : kFunctions) {
      if (f.name != name) continue;
      if (!accept('(')) fail(ParseError::Kind::Syntax, pos_, "expected '(' after " + std::string(name));
      std::vector<Expr> args;
      if (peek() != ')') {
        args.push_back(expression());
        while (accept(',')) args.push_back(expression());
      }
      if (!accept(')')) fail(ParseError::Kind::Syntax, pos_, "expected ')'");
      if (args.size() != f.arity) {
        fail(ParseError::Kind::Arity, start,
             std::string(name) + " expects " + std::to_string(f.arity) + " argument(s), got " +
                 std::to_string(args.size()));
      }
      switch (f.op) {
        case Op::Exp: return exp(args[0]);
        case Op::Ln: return ln(args[0]);
        case Op::Sqrt: return sqrt(args[0]);
        case Op::Sin: return sin(args[0]);
        case Op::Cos: return cos(args[0]);
        case Op::Atan: return atan(args[0]);
        default: return atan2(args[0], args[1]);
      }
    }
    fail(ParseError::Kind::UnknownIdentifier, start, "unknown identifier '" + std::string(name) + "'");
  }

  std::string_view text_;
  std::span<const std::string> vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, std::span<const std::string> variables) {
  Parser p(text, variables);
  Expr e = p.expression();
  if (!p.at_end()) p.fail(ParseError::Kind::Syntax, p.position(), "unexpected trailing input");
  return e;
}

Inequality parse_inequality(std::string_view text, std::span<const std::string> variables) {
  Parser p(text, variables);
  Expr lhs = p.expression();
  bool greater = false;
  if (p.accept('>')) {
    greater = true;
  } else if (!p.accept('<')) {
    p.fail(ParseError::Kind::Syntax, p.position(), "expected '>' or '<'");
  }
  Expr rhs = p.expression();
  if (!p.at_end()) p.fail(ParseError::Kind::Syntax, p.position(), "unexpected trailing input");
  return greater ? Inequality{lhs, rhs} : Inequality{rhs, lhs};
}

bool is_reserved_name(std::string_view name) {
  if (name == "pi") return true;
  for (const auto& f : kFunctions) {
    if (f.name == name) return true;
  }
  return false;
}

}  // namespace kvg::expr
