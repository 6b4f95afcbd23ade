#include "kvg/batch.hpp"

#include <bit>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "node.hpp"

namespace kvg {

using expr::Expr;
using expr::Op;

PointSet::PointSet(std::size_t dimension, std::vector<double> coords) : dim_(dimension), coords_(std::move(coords)) {
  if (dim_ == 0 ? !coords_.empty() : coords_.size() % dim_ != 0) {
    throw std::invalid_argument("point coordinates do not divide into the dimension");
  }
}

void PointSet::push_back(std::span<const double> p) {
  if (p.size() != dim_) throw std::invalid_argument("point dimension mismatch");
  coords_.insert(coords_.end(), p.begin(), p.end());
}

namespace {

struct KeyHash {
  std::size_t operator()(const std::vector<std::uint64_t>& k) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto v : k) {
      h ^= v;
      h *= 0x100000001b3ULL;
      h ^= h >> 29U;
    }
    return static_cast<std::size_t>(h);
  }
};

std::uint64_t bits(double v) { return std::bit_cast<std::uint64_t>(v); }

}  // namespace

Tape::Tape(std::span<const Expr> outputs) {
  std::unordered_map<const expr::detail::Node*, std::uint32_t> by_node;
  std::unordered_map<std::vector<std::uint64_t>, std::uint32_t, KeyHash> by_key;

  auto emit_rec = [&](auto&& self, const Expr& e) -> std::uint32_t {
    if (auto it = by_node.find(e.id()); it != by_node.end()) return it->second;
    std::vector<std::uint32_t> kids;
    kids.reserve(e.args().size());
    for (const auto& a : e.args()) kids.push_back(self(self, a));

    std::vector<std::uint64_t> key;
    key.reserve(4 + kids.size() + e.coefficients().size());
    key.push_back(static_cast<std::uint64_t>(e.op()));
    key.push_back(e.op() == Op::Var ? e.index() : bits(e.value()));
    key.push_back(static_cast<std::uint64_t>(static_cast<std::int64_t>(e.exponent())));
    for (auto k : kids) key.push_back(k);
    for (double w : e.coefficients()) key.push_back(bits(w));

    std::uint32_t reg = 0;
    if (auto it = by_key.find(key); it != by_key.end()) {
      reg = it->second;
    } else {
      Instr ins{e.op(), e.exponent(), e.value(), 0, 0};
      if (e.op() == Op::Var) {
        ins.first = static_cast<std::uint32_t>(e.index());
        if (e.index() + 1 > max_var_) max_var_ = e.index() + 1;
      } else {
        ins.first = static_cast<std::uint32_t>(operands_.size());
        ins.count = static_cast<std::uint32_t>(kids.size());
        operands_.insert(operands_.end(), kids.begin(), kids.end());
        if (e.op() == Op::Add) {
          coeffs_.resize(operands_.size());
          auto w = e.coefficients();
          for (std::size_t i = 0; i < w.size(); ++i) coeffs_[ins.first + i] = w[i];
        }
      }
      reg = static_cast<std::uint32_t>(code_.size());
      code_.push_back(ins);
      source_.push_back(e);
      by_key.emplace(std::move(key), reg);
    }
    by_node.emplace(e.id(), reg);
    return reg;
  };

  outputs_.reserve(outputs.size());
  for (const auto& e : outputs) outputs_.push_back(emit_rec(emit_rec, e));
  coeffs_.resize(operands_.size());
}

void Tape::run(std::span<const double> point, std::span<double> registers, std::span<double> out) const {
  using expr::detail::Fault;
  if (point.size() < max_var_) {
    throw std::invalid_argument("point has fewer coordinates than the tape references");
  }
  double* r = registers.data();
  const std::uint32_t* ops = operands_.data();
  const double* w = coeffs_.data();
  for (std::size_t pc = 0; pc < code_.size(); ++pc) {
    const Instr& ins = code_[pc];
    Fault fault = Fault::None;
    double v = 0.0;
    switch (ins.op) {
      case Op::Const:
      case Op::Pi: v = ins.value; break;
      case Op::Var: v = point[ins.first]; break;
      case Op::Add:
        v = ins.value;
        for (std::uint32_t i = 0; i < ins.count; ++i) v += w[ins.first + i] * r[ops[ins.first + i]];
        break;
      case Op::Mul:
        v = ins.value;
        for (std::uint32_t i = 0; i < ins.count; ++i) v *= r[ops[ins.first + i]];
        break;
      case Op::Pow: v = expr::detail::apply_pow(r[ops[ins.first]], ins.exponent, fault); break;
      case Op::Atan2: v = expr::detail::apply_atan2(r[ops[ins.first]], r[ops[ins.first + 1]], fault); break;
      default: v = expr::detail::apply_unary(ins.op, r[ops[ins.first]], fault); break;
    }
    if (fault != Fault::None || !std::isfinite(v)) {
      throw expr::DomainError(
          std::string(expr::detail::fault_message(fault)) + " in '" + expr::to_string(source_[pc]) + "'", source_[pc]);
    }
    r[pc] = v;
  }
  for (std::size_t i = 0; i < outputs_.size(); ++i) out[i] = r[outputs_[i]];
}

ValueTable evaluate_batch(const Tape& tape, const PointSet& points) {
  const std::size_t n = points.size();
  ValueTable table(n, tape.output_count());
  std::vector<std::exception_ptr> errors(n);
  bool failed = false;

#pragma omp parallel
  {
    std::vector<double> registers(tape.register_count());
#pragma omp for schedule(static) reduction(|| : failed)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      auto idx = static_cast<std::size_t>(i);
      try {
        tape.run(points[idx], registers, table.row(idx));
      } catch (...) {
        errors[idx] = std::current_exception();
        failed = true;
      }
    }
  }

  if (failed) {
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  return table;
}

ValueTable evaluate_batch(std::span<const Expr> exprs, const PointSet& points) {
  return evaluate_batch(Tape(exprs), points);
}

ValueTable evaluate_batch_serial(std::span<const Expr> exprs, const PointSet& points) {
  ValueTable table(points.size(), exprs.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = 0; j < exprs.size(); ++j) table(i, j) = expr::evaluate(exprs[j], points[i]);
  }
  return table;
}

}  // namespace kvg
