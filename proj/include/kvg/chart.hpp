#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kvg/batch.hpp"
#include "kvg/expr.hpp"
#include "kvg/parser.hpp"

namespace kvg {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A coordinate chart with a sampling box and a domain of strict inequalities.
/// A point is admitted when it lies in the box and every inequality holds
/// with margin: greater - lesser > standoff.
class Chart {
 public:
  Chart(std::vector<std::string> coordinates, std::vector<Interval> box,
        std::vector<expr::Inequality> domain = {}, double standoff = 0.0);

  std::size_t dimension() const noexcept { return names_.size(); }
  const std::vector<std::string>& coordinates() const noexcept { return names_; }
  const std::vector<Interval>& box() const noexcept { return box_; }
  const std::vector<expr::Inequality>& domain() const noexcept { return domain_; }
  double standoff() const noexcept { return standoff_; }

  expr::Expr coordinate(std::size_t i) const;
  std::size_t coordinate_index(std::string_view name) const;

  bool contains(std::span<const double> point) const;

  /// Fixed small point set used for construction-time checks.
  const PointSet& validation_points() const noexcept { return validation_; }

  /// Uniform rejection sampling from the box; gives up after 1000*count draws.
  PointSet sample(std::size_t count, std::uint64_t seed) const;

  expr::Expr parse(std::string_view text) const;
  expr::Inequality parse_inequality(std::string_view text) const;
  std::string format(const expr::Expr& e) const;

 private:
  std::vector<std::string> names_;
  std::vector<Interval> box_;
  std::vector<expr::Inequality> domain_;
  double standoff_;
  PointSet validation_;
};

using ChartPtr = std::shared_ptr<const Chart>;

ChartPtr make_chart(std::vector<std::string> coordinates, std::vector<Interval> box,
                    const std::vector<std::string>& domain = {}, double standoff = 0.0);

/// Euclidean coordinates named x, y (n = 2), x, y, z (n = 3), else x1..xn,
/// on the box [lo, hi]^n.
ChartPtr euclidean_chart(std::size_t n, double lo = -1.0, double hi = 1.0);

}  // namespace kvg
