#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "kvg/kv.hpp"
#include "kvg/parser.hpp"
#include "kvg/scenarios.hpp"

namespace kvg {
namespace {

const std::vector<std::string> kRequired = {
    "example_3_1",        "example_3_2",         "theorem_3_3_forward",     "remark_3_4",
    "prop_4_1",           "thm_4_2_iii_iv",      "prop_4_3_parallel",       "prop_4_3_nonparallel",
    "prop_4_5_codazzi",   "prop_4_5_noncodazzi", "def_5_1_involution",      "lemma_5_2_midpoint",
    "thm_5_3_curvature",  "cor_5_4",             "thm_5_5_harmonic",        "thm_5_5_nonharmonic",
    "example_6_2_cocycle", "example_6_2_obstruction", "appendix_dnabla",    "appendix_flat_decomposition",
    "appendix_commuting_lemma"};

const char* kPlaneChart = R"("chart": {"coordinates": ["x", "y"], "box": [[-1, 1], [-1, 1]]})";

std::string scenario(const std::string& bindings, const std::string& assertions) {
  return std::string(R"({"name": "t", )") + kPlaneChart + R"(, "bindings": )" + bindings + R"(, "assertions": )" +
         assertions + "}";
}

TEST(Registry, CoversEveryStatement) {
  auto reg = Registry::builtin();
  for (const auto& n : kRequired) EXPECT_TRUE(reg.contains(n)) << n;
  auto names = reg.names();
  EXPECT_TRUE(std::is_sorted(names.begin(), names.end()));
}

TEST(Registry, UnknownScenarioThrows) {
  auto reg = Registry::builtin();
  EXPECT_THROW(run_scenario(reg, "nonexistent", {}), UnknownScenario);
  EXPECT_THROW(reg.source("nonexistent"), UnknownScenario);
}

TEST(Registry, LoadDirectoryAddsAndReplaces) {
  auto dir = std::filesystem::temp_directory_path() / "kvg_scenarios_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "a.json") << scenario(R"({"nabla": {"type": "connection", "flat": true}})",
                                              R"([{"probe": "flat", "args": {"connection": "nabla"}}])");
    std::ofstream(dir / "b.json") << R"({"name": "prop_4_1", "chart": {"coordinates": ["x"], "box": [[0, 1]]},
      "assertions": [{"probe": "scalar_equal", "args": {"a": "x", "b": "x"}}]})";
  }
  auto reg = Registry::builtin();
  const auto before = reg.names().size();
  reg.load_directory(dir);
  EXPECT_EQ(reg.names().size(), before + 1);
  EXPECT_TRUE(run_scenario(reg, "t", {}).verdict);
  EXPECT_EQ(run_scenario(reg, "prop_4_1", {}).assertions.size(), 1U);
  {
    std::ofstream(dir / "c.json") << "{ not json";
  }
  EXPECT_THROW(reg.load_directory(dir), ScenarioError);
  std::filesystem::remove_all(dir);
  EXPECT_THROW(reg.load_directory(dir), ScenarioError);
}

class Builtin : public ::testing::TestWithParam<std::string> {};

TEST_P(Builtin, Passes) {
  auto r = run_scenario(Registry::builtin(), GetParam(), {});
  EXPECT_TRUE(r.setup_error.empty()) << r.setup_error;
  for (const auto& a : r.assertions)
    EXPECT_TRUE(a.verdict) << a.name << " max=" << a.report.max_residual << " tol=" << a.report.tolerance;
  EXPECT_TRUE(r.verdict);
}

INSTANTIATE_TEST_SUITE_P(Scenarios, Builtin, ::testing::ValuesIn(Registry::builtin().names()),
                         [](const auto& info) { return info.param; });

TEST(Scenario, ExpectedFailuresAreWitnessed) {
  auto r = run_scenario(Registry::builtin(), "prop_4_3_nonparallel", {});
  ASSERT_EQ(r.assertions.size(), 1U);
  EXPECT_FALSE(r.assertions[0].report.pass);
  EXPECT_GE(r.assertions[0].report.max_residual, kWitnessThreshold);

  EqualityReport weak;
  weak.pass = false;
  weak.max_residual = 1e-6;
  EXPECT_FALSE(assertion_verdict(Expectation::Fail, weak));
  weak.max_residual = 2e-3;
  EXPECT_TRUE(assertion_verdict(Expectation::Fail, weak));
  weak.pass = true;
  EXPECT_FALSE(assertion_verdict(Expectation::Fail, weak));
}

TEST(Scenario, DeterministicReports) {
  auto reg = Registry::builtin();
  ProbeConfig cfg;
  auto a = report_json({run_scenario(reg, "thm_5_5_harmonic", cfg), run_scenario(reg, "appendix_dnabla", cfg)});
  auto b = report_json({run_scenario(reg, "thm_5_5_harmonic", cfg), run_scenario(reg, "appendix_dnabla", cfg)});
  EXPECT_EQ(a, b);
  cfg.seed = 7;
  auto c = report_json({run_scenario(reg, "thm_5_5_harmonic", cfg), run_scenario(reg, "appendix_dnabla", cfg)});
  EXPECT_NE(a, c);
}

TEST(Scenario, SerialAndParallelBackendsAgree) {
  auto reg = Registry::builtin();
  ProbeConfig cfg;
  cfg.backend = Backend::Serial;
  auto serial = report_json({run_scenario(reg, "example_6_2_cocycle", cfg)});
  cfg.backend = Backend::Parallel;
  auto parallel = report_json({run_scenario(reg, "example_6_2_cocycle", cfg)});
  EXPECT_EQ(serial, parallel);
}

TEST(Scenario, TimingOnlyWhenAsked) {
  auto r = run_scenario(Registry::builtin(), "example_3_1", {});
  EXPECT_GT(r.elapsed_ms, 0.0);
  EXPECT_NE(report_json({r}).find("\"elapsed_ms\": 0.0"), std::string::npos);
  EXPECT_EQ(report_json({r}, true).find("\"elapsed_ms\": 0.0"), std::string::npos);
}

TEST(Scenario, NonFlatContextIsASetupError) {
  auto text = scenario(R"j({
      "g": {"type": "metric", "components": ["1", "0", "0", "exp(2*x)"]},
      "nabla": {"type": "connection", "levi_civita": "g"},
      "id": {"type": "cochain", "constructor": "identity"},
      "did": {"type": "cochain", "constructor": "d", "of": "id"}})j",
                       R"([{"probe": "symmetric", "args": {"of": "did"}}])");
  auto r = run_scenario_text(text, {});
  EXPECT_FALSE(r.verdict);
  EXPECT_NE(r.setup_error.find("context 'nabla'"), std::string::npos) << r.setup_error;
  EXPECT_TRUE(r.assertions.empty());
  EXPECT_NE(report_json({r}).find("\"verdict\": \"error\""), std::string::npos);
}

TEST(Scenario, NonJacobiDegreeZeroIsASetupError) {
  auto text = scenario(R"({
      "nabla": {"type": "connection", "flat": true},
      "z": {"type": "vector", "components": ["x^2", "0"]},
      "zc": {"type": "cochain", "constructor": "jacobi", "z": "z"}})",
                       R"([{"probe": "d2", "args": {"of": "zc"}}])");
  auto r = run_scenario_text(text, {});
  EXPECT_FALSE(r.setup_error.empty());
}

TEST(Scenario, MalformedInputs) {
  const std::string flat = R"({"nabla": {"type": "connection", "flat": true}})";
  EXPECT_THROW(run_scenario_text("[1, 2", {}), ScenarioError);
  EXPECT_THROW(run_scenario_text(R"({"name": "t"})", {}), ScenarioError);
  EXPECT_THROW(run_scenario_text(scenario(flat, "[]"), {}), ScenarioError);
  EXPECT_THROW(run_scenario_text(scenario(flat, R"([{"probe": "nope", "args": {}}])"), {}), ScenarioError);
  EXPECT_THROW(run_scenario_text(scenario(flat, R"([{"probe": "flat", "args": {"connection": "missing"}}])"), {}),
               ScenarioError);
  EXPECT_THROW(run_scenario_text(scenario(flat, R"([{"probe": "jacobi", "args": {"z": "nabla"}}])"), {}),
               ScenarioError);
  EXPECT_THROW(run_scenario_text(scenario(R"({"a": {"type": "scalar", "expr": "x +* y"}})",
                                          R"([{"probe": "scalar_equal", "args": {"a": "a", "b": 0}}])"),
                                 {}),
               ScenarioError);
  EXPECT_THROW(
      run_scenario_text(scenario(R"({"a": {"type": "cochain", "constructor": "sum", "terms": ["b"]},
                                     "b": {"type": "cochain", "constructor": "sum", "terms": ["a"]}})",
                                 R"([{"probe": "symmetric", "args": {"of": "a"}}])"),
                        {}),
      ScenarioError);
  EXPECT_THROW(run_scenario_text(scenario(flat, R"([{"probe": "flat", "expect": "maybe",
                                                     "args": {"connection": "nabla"}}])"),
                                 {}),
               ScenarioError);
}

TEST(Scenario, ToleranceOverride) {
  auto text = scenario("{}", R"([{"probe": "scalar_equal", "tolerance": 0.5, "args": {"a": "x", "b": "x + 0.25"}},
                                 {"probe": "scalar_equal", "args": {"a": "x", "b": "x + 0.25"}, "expect": "fail"}])");
  auto r = run_scenario_text(text, {});
  EXPECT_TRUE(r.verdict);
  EXPECT_EQ(r.assertions[0].report.tolerance, 0.5);
  EXPECT_EQ(r.assertions[1].name, "assertion_1");
}

TEST(Limits, OneSidedLimitsOfAngle) {
  const std::vector<std::string> xy = {"x", "y"};
  auto lim = one_sided_limits(expr::parse("atan(x/y)", xy), {2.0, 0.0}, 1);
  EXPECT_NEAR(lim.upper, std::numbers::pi / 2, 1e-12);
  EXPECT_NEAR(lim.lower, -std::numbers::pi / 2, 1e-12);
  EXPECT_NEAR(lim.jump(), std::numbers::pi, 1e-12);
  // Smooth functions have no jump; extrapolation recovers f(0).
  auto smooth = one_sided_limits(expr::parse("exp(y) + x", xy), {2.0, 0.0}, 1);
  EXPECT_NEAR(smooth.upper, 3.0, 1e-10);
  EXPECT_NEAR(smooth.jump(), 0.0, 1e-10);
  auto removable = one_sided_limits(expr::parse("sin(y)/y", xy), {0.0, 0.0}, 1);
  EXPECT_NEAR(removable.upper, 1.0, 1e-12);
  EXPECT_NEAR(removable.lower, 1.0, 1e-12);
  EXPECT_THROW(one_sided_limits(expr::parse("x", xy), {0.0, 0.0}, 2), std::out_of_range);
}

TEST(Obstruction, PrintedCandidate) {
  auto r = obstruction_check({});
  ASSERT_EQ(r.assertions.size(), 4U);
  // The closed form solves the system with the opposite sign.
  EXPECT_FALSE(r.assertions[0].verdict);
  EXPECT_FALSE(r.assertions[1].verdict);
  EXPECT_TRUE(r.assertions[2].verdict);
  EXPECT_NEAR(r.assertions[2].report.max_residual, 0.0, 1e-6);
  EXPECT_TRUE(r.assertions[3].verdict);
  EXPECT_FALSE(r.verdict);
}

TEST(Obstruction, NegatedCandidateAndAffineInvariance) {
  auto neg = obstruction_check({}, "-(x/2*ln(x^2+y^2) + y*atan(x/y))");
  EXPECT_TRUE(neg.assertions[0].verdict);
  EXPECT_TRUE(neg.assertions[1].verdict);
  // Jump is -pi for the negated branch.
  EXPECT_NEAR(neg.assertions[2].report.max_residual, 2 * std::numbers::pi, 1e-6);
  auto shifted = obstruction_check({}, "x/2*ln(x^2+y^2) + y*atan(x/y) + 5*x - 3*y + 2");
  EXPECT_TRUE(shifted.assertions[2].verdict);
  EXPECT_TRUE(shifted.assertions[3].verdict);
}

TEST(D2Fuzz, SmallRuns) {
  ProbeConfig cfg;
  cfg.samples = 30;
  for (std::size_t degree : {0U, 1U, 2U}) {
    auto r = d2_fuzz(degree, 2, cfg);
    EXPECT_TRUE(r.verdict) << degree;
    EXPECT_EQ(r.assertions.size(), 2U);
  }
  EXPECT_THROW(d2_fuzz(3, 1, cfg), DegreeError);
}

TEST(Report, TextSummary) {
  auto r = run_scenario(Registry::builtin(), "remark_3_4", {});
  auto text = report_text({r});
  EXPECT_NE(text.find("PASS remark_3_4"), std::string::npos);
  EXPECT_NE(text.find("1/1 scenarios passed"), std::string::npos);
  EXPECT_EQ(report_text({r}, false).find("antisymmetric_part"), std::string::npos);
}

}  // namespace
}  // namespace kvg
