#include <charconv>
#include <cmath>
#include <string>
#include <vector>

#include "kvg/expr.hpp"

namespace kvg::expr {

namespace {

enum Prec : int { kSum = 1, kProduct = 2, kPower = 4, kAtom = 5 };

std::string number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

const char* function_name(Op op) {
  switch (op) {
    case Op::Exp: return "exp";
    case Op::Ln: return "ln";
    case Op::Sqrt: return "sqrt";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Atan: return "atan";
    case Op::Atan2: return "atan2";
    default: return "?";
  }
}

class Printer {
 public:
  explicit Printer(std::span<const std::string> names) : names_(names) {}

  std::string operator()(const Expr& e) { return print(e).text; }

 private:
  struct Out {
    std::string text;
    int prec;
  };

  std::string wrap(const Expr& e, int min_prec) {
    Out o = print(e);
    return o.prec < min_prec ? "(" + o.text + ")" : o.text;
  }

  std::string name(std::size_t i) const {
    if (i < names_.size()) return names_[i];
    return "x" + std::to_string(i + 1);
  }

  // magnitude * product(factors), magnitude > 0
  std::string product_text(double magnitude, std::span<const Expr> factors) {
    std::vector<std::string> num;
    std::vector<std::string> den;
    for (const auto& f : factors) {
      if (f.op() == Op::Pow && f.exponent() < 0) {
        int e = -f.exponent();
        std::string b = wrap(f.args()[0], kAtom);
        den.push_back(e == 1 ? b : b + "^" + std::to_string(e));
      } else {
        num.push_back(wrap(f, kPower));
      }
    }
    std::string text;
    if (magnitude != 1.0) text = number(magnitude);
    for (const auto& s : num) text += (text.empty() ? "" : "*") + s;
    if (text.empty()) text = "1";
    if (den.empty()) return text;
    if (den.size() == 1) return text + "/" + den[0];
    std::string d;
    for (const auto& s : den) d += (d.empty() ? "" : "*") + s;
    return text + "/(" + d + ")";
  }

  std::vector<Expr> factors_of(const Expr& t) {
    if (t.op() == Op::Mul) return {t.args().begin(), t.args().end()};
    return {t};
  }

  Out print(const Expr& e) {
    auto args = e.args();
    switch (e.op()) {
      case Op::Const: return {number(e.value()), e.value() < 0 ? kSum : kAtom};
      case Op::Pi: return {"pi", kAtom};
      case Op::Var: return {name(e.index()), kAtom};
      case Op::Add: {
        std::string text;
        auto coeffs = e.coefficients();
        for (std::size_t i = 0; i < args.size(); ++i) {
          double c = coeffs[i];
          std::string body;
          if (std::fabs(c) == 1.0 && args[i].op() != Op::Mul && !(args[i].op() == Op::Pow && args[i].exponent() < 0)) {
            body = wrap(args[i], kProduct);
          } else {
            auto fs = factors_of(args[i]);
            body = product_text(std::fabs(c), fs);
          }
          if (i == 0) {
            text = (c < 0 ? "-" : "") + body;
          } else {
            text += (c < 0 ? " - " : " + ") + body;
          }
        }
        if (e.value() != 0.0) {
          text += (e.value() < 0 ? " - " : " + ") + number(std::fabs(e.value()));
        }
        return {text, kSum};
      }
      case Op::Mul: {
        double c = e.value();
        std::string body = product_text(std::fabs(c), args);
        if (c < 0) return {"-" + body, kSum};
        return {body, kProduct};
      }
      case Op::Pow: {
        int k = e.exponent();
        std::string b = wrap(args[0], kAtom);
        if (k > 0) return {b + "^" + std::to_string(k), kPower};
        return {"1/" + (k == -1 ? b : b + "^" + std::to_string(-k)), kProduct};
      }
      case Op::Atan2: return {"atan2(" + print(args[0]).text + ", " + print(args[1]).text + ")", kAtom};
      default: return {std::string(function_name(e.op())) + "(" + print(args[0]).text + ")", kAtom};
    }
  }

  std::span<const std::string> names_;
};

}  // namespace

std::string to_string(const Expr& e, std::span<const std::string> names) { return Printer(names)(e); }

std::string to_string(const Expr& e) { return Printer({})(e); }

}  // namespace kvg::expr
