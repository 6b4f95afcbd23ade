#include "kvg/chart.hpp"

#include <algorithm>
#include <cmath>

#include "kvg/rng.hpp"

namespace kvg {

namespace {

constexpr std::size_t kValidationPoints = 16;
constexpr std::uint64_t kValidationSeed = 0x5eed;

}  // namespace

Chart::Chart(std::vector<std::string> coordinates, std::vector<Interval> box, std::vector<expr::Inequality> domain,
             double standoff)
    : names_(std::move(coordinates)), box_(std::move(box)), domain_(std::move(domain)), standoff_(standoff) {
  if (names_.empty()) throw std::invalid_argument("chart needs at least one coordinate");
  if (box_.size() != names_.size()) throw std::invalid_argument("sampling box dimension differs from chart dimension");
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty() || expr::is_reserved_name(names_[i])) {
      throw std::invalid_argument("invalid coordinate name '" + names_[i] + "'");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (names_[i] == names_[j]) throw std::invalid_argument("duplicate coordinate name '" + names_[i] + "'");
    }
    if (!(box_[i].lo < box_[i].hi)) throw std::invalid_argument("empty sampling interval for " + names_[i]);
  }
  for (const auto& ineq : domain_) {
    std::uint64_t vars = ineq.greater.free_variables() | ineq.lesser.free_variables();
    if (names_.size() < 63 && (vars >> names_.size()) != 0) {
      throw std::invalid_argument("domain inequality references an unknown coordinate");
    }
  }
  // Nonempty check: throws SamplingError when box and domain do not meet.
  validation_ = sample(kValidationPoints, kValidationSeed);
}

expr::Expr Chart::coordinate(std::size_t i) const {
  if (i >= names_.size()) throw std::out_of_range("coordinate index out of range");
  return expr::Expr::variable(i);
}

std::size_t Chart::coordinate_index(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  throw std::invalid_argument("unknown coordinate '" + std::string(name) + "'");
}

bool Chart::contains(std::span<const double> point) const {
  if (point.size() != names_.size()) return false;
  for (std::size_t i = 0; i < point.size(); ++i) {
    if (!(point[i] >= box_[i].lo && point[i] <= box_[i].hi)) return false;
  }
  for (const auto& ineq : domain_) {
    try {
      double d = expr::evaluate(ineq.greater, point) - expr::evaluate(ineq.lesser, point);
      if (!(d > standoff_)) return false;
    } catch (const expr::DomainError&) {
      return false;
    }
  }
  return true;
}

PointSet Chart::sample(std::size_t count, std::uint64_t seed) const {
  Rng rng(seed);
  PointSet points(names_.size());
  std::vector<double> p(names_.size());
  const std::size_t limit = 1000 * std::max<std::size_t>(count, 1);
  std::size_t attempts = 0;
  while (points.size() < count) {
    if (attempts++ >= limit) {
      throw SamplingError("found " + std::to_string(points.size()) + " of " + std::to_string(count) +
                          " domain points in " + std::to_string(limit) + " attempts");
    }
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = rng.uniform(box_[i].lo, box_[i].hi);
    if (contains(p)) points.push_back(p);
  }
  return points;
}

expr::Expr Chart::parse(std::string_view text) const { return expr::parse(text, names_); }

expr::Inequality Chart::parse_inequality(std::string_view text) const { return expr::parse_inequality(text, names_); }

std::string Chart::format(const expr::Expr& e) const { return expr::to_string(e, names_); }

ChartPtr make_chart(std::vector<std::string> coordinates, std::vector<Interval> box,
                    const std::vector<std::string>& domain, double standoff) {
  std::vector<expr::Inequality> ineqs;
  ineqs.reserve(domain.size());
  for (const auto& text : domain) ineqs.push_back(expr::parse_inequality(text, coordinates));
  return std::make_shared<const Chart>(std::move(coordinates), std::move(box), std::move(ineqs), standoff);
}

ChartPtr euclidean_chart(std::size_t n, double lo, double hi) {
  std::vector<std::string> names;
  if (n == 2) {
    names = {"x", "y"};
  } else if (n == 3) {
    names = {"x", "y", "z"};
  } else {
    for (std::size_t i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
  }
  return make_chart(std::move(names), std::vector<Interval>(n, Interval{lo, hi}));
}

}  // namespace kvg
