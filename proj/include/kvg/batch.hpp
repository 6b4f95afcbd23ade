#pragma once

// Batch evaluation of expression lists over point sets.
//
// A Tape flattens a list of expressions into straight-line code with shared
// subexpressions computed once. evaluate_batch runs the tape over all points
// with OpenMP; evaluate_batch_serial is the reference path through the
// recursive evaluator. Both apply the same arithmetic in the same order and
// agree bit for bit.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kvg/expr.hpp"

namespace kvg {

class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::size_t dimension) : dim_(dimension) {}
  PointSet(std::size_t dimension, std::vector<double> coords);

  std::size_t dimension() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const noexcept { return size() == 0; }

  std::span<const double> operator[](std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  void push_back(std::span<const double> p);

  const std::vector<double>& raw() const noexcept { return coords_; }

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

/// Row-major table: one row per point, one column per expression.
class ValueTable {
 public:
  ValueTable() = default;
  ValueTable(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  friend bool operator==(const ValueTable&, const ValueTable&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

class Tape {
 public:
  explicit Tape(std::span<const expr::Expr> outputs);

  std::size_t output_count() const noexcept { return outputs_.size(); }
  std::size_t instruction_count() const noexcept { return code_.size(); }
  std::size_t register_count() const noexcept { return code_.size(); }

  /// Evaluates one point. `registers` must hold register_count() doubles.
  /// Throws expr::DomainError on the first faulting instruction.
  void run(std::span<const double> point, std::span<double> registers, std::span<double> out) const;

 private:
  struct Instr {
    expr::Op op;
    int exponent;
    double value;
    std::uint32_t first;  // operand offset; Add coefficients use the same offset
    std::uint32_t count;
  };

  std::vector<Instr> code_;
  std::vector<std::uint32_t> operands_;
  std::vector<double> coeffs_;
  std::vector<std::uint32_t> outputs_;
  std::vector<expr::Expr> source_;
  std::size_t max_var_ = 0;
};

ValueTable evaluate_batch(const Tape& tape, const PointSet& points);
ValueTable evaluate_batch(std::span<const expr::Expr> exprs, const PointSet& points);
ValueTable evaluate_batch_serial(std::span<const expr::Expr> exprs, const PointSet& points);

}  // namespace kvg
