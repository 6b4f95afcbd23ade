#pragma once

// Declarative scenarios: a chart, named bindings and a list of probe
// assertions, read from JSON and run with a shared seed.

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "kvg/fields.hpp"

namespace kvg {

/// Malformed scenario text or an unresolvable binding.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownScenario : public std::out_of_range {
 public:
  explicit UnknownScenario(const std::string& name) : std::out_of_range("unknown scenario: " + name) {}
};

enum class Expectation { Pass, Fail };

/// An expected failure counts only when some sample reaches this residual.
inline constexpr double kWitnessThreshold = 1e-3;

struct AssertionResult {
  std::string name;
  std::string reference;
  std::string probe;
  Expectation expected = Expectation::Pass;
  EqualityReport report;
  bool verdict = false;
};

struct Report {
  std::string scenario;
  std::string description;
  std::vector<AssertionResult> assertions;
  bool verdict = false;
  /// Non-empty when a binding failed its precondition (for example a
  /// context connection that is not flat); no assertions ran.
  std::string setup_error;
  std::uint64_t seed = 0;
  ProbeConfig config;
  double elapsed_ms = 0.0;
};

/// Verdict of one assertion given its expectation.
bool assertion_verdict(Expectation expected, const EqualityReport& report);

class Registry {
 public:
  /// The scenarios compiled into the library.
  static Registry builtin();

  /// Adds or replaces every *.json file in `dir`.
  void load_directory(const std::filesystem::path& dir);
  /// Adds or replaces one scenario given as JSON text; returns its name.
  std::string add(const std::string& json_text);

  std::vector<std::string> names() const;
  bool contains(const std::string& name) const { return sources_.count(name) != 0; }
  const std::string& source(const std::string& name) const;

 private:
  std::map<std::string, std::string> sources_;
};

/// Runs one scenario. Throws UnknownScenario or ScenarioError; setup
/// failures are reported in Report::setup_error.
Report run_scenario(const Registry& registry, const std::string& name, const ProbeConfig& cfg);
Report run_scenario_text(const std::string& json_text, const ProbeConfig& cfg);
std::vector<Report> run_all(const Registry& registry, const ProbeConfig& cfg);

/// The three-part non-primitive check for the conformal cocycle of
/// 1/2 ln(x^2 + y^2) on the punctured plane, run on a candidate primitive
/// component u (the closed form by default): the Hessian system on
/// both half planes, the jump of u_y(2, t) across t = 0, and non-extendability.
Report obstruction_check(const ProbeConfig& cfg,
                         const std::string& candidate = "x/2*ln(x^2+y^2) + y*atan(x/y)");

struct LimitEstimate {
  double upper = 0.0;
  double lower = 0.0;
  double jump() const noexcept { return upper - lower; }
};

/// One-sided limits of f(base with coordinate `along` set to t) as t -> 0+
/// and t -> 0-, from t = +-10^-k, k = 1..6, by Richardson extrapolation.
LimitEstimate one_sided_limits(const Expr& f, std::vector<double> base, std::size_t along);

/// d(d theta) on `trials` random cochains of the given degree on random flat
/// 2-D and 3-D structures.
Report d2_fuzz(std::size_t degree, std::size_t trials, const ProbeConfig& cfg);

std::string report_json(const std::vector<Report>& reports, bool timing = false);
std::string report_text(const std::vector<Report>& reports, bool verbose = true);

}  // namespace kvg
