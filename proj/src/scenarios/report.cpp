#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "kvg/scenarios.hpp"

namespace kvg {

using nlohmann::ordered_json;

namespace {

const char* word(bool ok) { return ok ? "pass" : "fail"; }

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

ordered_json assertion_json(const AssertionResult& a) {
  ordered_json j;
  j["name"] = a.name;
  j["reference"] = a.reference;
  j["probe"] = a.probe;
  j["max_residual"] = a.report.max_residual;
  j["mean_residual"] = a.report.mean_residual;
  j["tolerance"] = a.report.tolerance;
  j["samples"] = a.report.sample_count;
  if (!a.report.points.empty()) {
    auto p = a.report.points[a.report.worst_index];
    j["worst_point"] = std::vector<double>(p.begin(), p.end());
  }
  j["expected"] = a.expected == Expectation::Pass ? "pass" : "fail";
  j["observed"] = word(a.report.pass);
  j["verdict"] = word(a.verdict);
  return j;
}

}  // namespace

std::string report_json(const std::vector<Report>& reports, bool timing) {
  ordered_json all = ordered_json::array();
  bool verdict = true;
  for (const auto& r : reports) {
    ordered_json j;
    j["scenario"] = r.scenario;
    j["description"] = r.description;
    j["assertions"] = ordered_json::array();
    for (const auto& a : r.assertions) j["assertions"].push_back(assertion_json(a));
    j["verdict"] = r.setup_error.empty() ? word(r.verdict) : "error";
    if (!r.setup_error.empty()) j["error"] = r.setup_error;
    j["seed"] = r.seed;
    j["config"] = {{"samples", r.config.samples},
                   {"tolerance", r.config.tolerance},
                   {"trials", r.config.trials},
                   {"field_degree", r.config.field_degree}};
    j["elapsed_ms"] = timing ? r.elapsed_ms : 0.0;
    all.push_back(std::move(j));
    verdict = verdict && r.verdict;
  }
  ordered_json out;
  out["reports"] = std::move(all);
  out["verdict"] = word(verdict);
  return out.dump(2) + "\n";
}

std::string report_text(const std::vector<Report>& reports, bool verbose) {
  std::ostringstream out;
  std::size_t passed = 0;
  for (const auto& r : reports) {
    if (r.verdict) ++passed;
    out << (r.verdict ? "PASS " : "FAIL ") << r.scenario;
    if (!r.setup_error.empty()) out << "  setup error: " << r.setup_error;
    out << "\n";
    if (!verbose) continue;
    for (const auto& a : r.assertions) {
      out << "  " << (a.verdict ? "ok  " : "BAD ") << a.name << "  max=" << number(a.report.max_residual)
          << " tol=" << number(a.report.tolerance) << " expect=" << (a.expected == Expectation::Pass ? "pass" : "fail")
          << "\n";
    }
  }
  out << passed << "/" << reports.size() << " scenarios passed\n";
  return out.str();
}

}  // namespace kvg
