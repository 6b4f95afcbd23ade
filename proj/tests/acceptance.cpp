// Acceptance run: one PASS/FAIL line per criterion, exit 0 only if all pass.
// Usage: kvg_acceptance <path to kvg cli>

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "kvg/fdcheck.hpp"
#include "kvg/kv.hpp"
#include "kvg/scenarios.hpp"

namespace {

using namespace kvg;

// Tolerances, fixed here and not read from scenario files.
constexpr double kD2Tol = 1e-9;
constexpr double kD2Seconds = 60.0;
constexpr double kExactTol = 1e-12;
constexpr double kCoboundaryTol = 1e-9;
constexpr double kBracketTol = 1e-10;
constexpr double kCocycleTol = 1e-9;
constexpr double kWitness = 1e-3;
constexpr double kCurvatureTol = 1e-8;
constexpr double kMidpointTol = 1e-10;
constexpr double kLaplacianTol = 1e-10;
constexpr double kFlatTol = 1e-9;
constexpr double kHessianSystemTol = 1e-9;
constexpr double kJumpTol = 1e-6;
constexpr double kDecompositionTol = 1e-12;
constexpr double kFdTol = 1e-5;

struct Line {
  bool ok = true;
  std::ostringstream detail;

  /// Requires the named assertion's max residual to be at most tol.
  void at_most(const Report& r, const std::string& name, double tol) {
    const AssertionResult* a = find(r, name);
    const double m = a ? a->report.max_residual : -1.0;
    const bool pass = a && m <= tol;
    note(r.scenario + "/" + name, m, pass, "<=", tol);
  }
  /// Requires a witness sample with residual at least kWitness.
  void witnessed(const Report& r, const std::string& name) {
    const AssertionResult* a = find(r, name);
    const double m = a ? a->report.max_residual : -1.0;
    note(r.scenario + "/" + name, m, a && m >= kWitness, ">=", kWitness);
  }
  void check(const std::string& what, bool pass) {
    ok = ok && pass;
    detail << " " << what << (pass ? "=yes" : "=no!");
  }
  void value(const std::string& what, double v, bool pass, const char* rel, double bound) { note(what, v, pass, rel, bound); }

 private:
  static const AssertionResult* find(const Report& r, const std::string& name) {
    for (const auto& a : r.assertions)
      if (a.name == name) return &a;
    return nullptr;
  }
  void note(const std::string& what, double v, bool pass, const char* rel, double bound) {
    ok = ok && pass;
    char buf[200];
    std::snprintf(buf, sizeof buf, " %s=%.2e (%s %g)%s", what.c_str(), v, rel, bound, pass ? "" : "!");
    detail << buf;
  }
};

int failures = 0;

void print(int id, const std::string& title, Line& line) {
  if (!line.ok) ++failures;
  std::cout << (line.ok ? "PASS" : "FAIL") << " [" << id << "] " << title << ":" << line.detail.str() << std::endl;
}

Report scenario(const std::string& name) { return run_scenario(Registry::builtin(), name, ProbeConfig{}); }

struct Captured {
  int status = -1;
  std::string out;
};

Captured shell(const std::string& cmd) {
  Captured c;
  FILE* p = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (!p) return c;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) c.out.append(buf.data(), n);
  const int raw = pclose(p);
  c.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return c;
}

void criterion_1() {
  Line line;
  ProbeConfig cfg;
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::size_t count = 0;
  bool all = true;
  for (std::size_t degree = 0; degree <= 2; ++degree) {
    Report r = d2_fuzz(degree, 20, cfg);
    for (const auto& a : r.assertions) {
      worst = std::max(worst, a.report.max_residual);
      all = all && a.report.sample_count == 100;
      ++count;
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  line.value("max_residual", worst, worst <= kD2Tol, "<=", kD2Tol);
  line.check("cochains_60", count == 60);
  line.check("samples_100", all);
  line.value("seconds", seconds, seconds < kD2Seconds, "<", kD2Seconds);
  print(1, "d(d theta) = 0 on 20 random cochains per degree 0, 1, 2", line);
}

void criterion_2() {
  Line line;
  Report r = scenario("prop_4_1");
  line.at_most(r, "minus_identity", kExactTol);
  line.at_most(r, "cocycle", kExactTol);
  print(2, "d(-Id) = nabla and d(nabla) = 0", line);
}

void criterion_3() {
  Line line;
  Report r = scenario("theorem_3_3_forward");
  double worst = 0.0;
  std::size_t n = 0;
  for (const auto& a : r.assertions) {
    worst = std::max(worst, a.report.max_residual);
    ++n;
  }
  line.value("ad_symmetric_tensorial", worst, worst <= kCoboundaryTol && n == 20, "<=", kCoboundaryTol);
  line.at_most(scenario("example_3_2"), "differential_of_ad", kCoboundaryTol);
  line.at_most(scenario("remark_3_4"), "antisymmetric_part", kBracketTol);
  print(3, "d(ad Z) symmetric and tensorial for 10 Z; antisymmetric part of d(Id) is [Y,X]", line);
}

void criterion_4() {
  Line line;
  line.at_most(scenario("prop_4_3_parallel"), "cocycle", kCocycleTol);
  line.witnessed(scenario("prop_4_3_nonparallel"), "not_cocycle");
  print(4, "projective cochain on R^3: dx cocycle, x dy witnessed non-cocycle", line);
}

void criterion_5() {
  Line line;
  line.at_most(scenario("prop_4_5_codazzi"), "cocycle", kCocycleTol);
  // The non-Codazzi example exactly as stated: h = diag(1 + x^2, 1), V = d/dx.
  ChartPtr chart = euclidean_chart(2, -1.5, 1.5);
  ProbeConfig cfg;
  KVContext flat(Connection::flat(chart), cfg);
  auto h = MetricField::parse(chart, {"1 + x^2", "0", "0", "1"}).as_bilinear();
  auto dtheta = d_kv(flat, dual_projective_cochain(h, VectorField::coordinate(chart, 0)));
  auto r = cochain_equal_probe(dtheta, Cochain::zero(chart, 3), cfg);
  line.value("diag(1+x^2,1)_witness", r.max_residual, r.max_residual >= kWitness, ">=", kWitness);
  print(5, "dual-projective: Codazzi pair cocycle, diag(1+x^2,1) witnessed non-cocycle", line);
}

void criterion_6() {
  Line line;
  line.at_most(scenario("thm_5_3_curvature"), "differential_is_4r", kCurvatureTol);
  line.at_most(scenario("lemma_5_2_midpoint"), "midpoint", kMidpointTol);
  line.at_most(scenario("cor_5_4"), "cocycle", kCurvatureTol);
  print(6, "g = Hess(e^x + e^y): d(nabla*) = 4R, midpoint = Levi-Civita, dR = 0", line);
}

void criterion_7() {
  Line line;
  Report h = scenario("thm_5_5_harmonic");
  for (const char* tag : {"xy", "saddle", "log"}) {
    const std::string t = tag;
    line.at_most(h, "harmonic_" + t, kLaplacianTol);
    line.at_most(h, "cocycle_" + t, kCocycleTol);
    line.at_most(h, "flat_" + t, kFlatTol);
  }
  Report n = scenario("thm_5_5_nonharmonic");
  line.at_most(n, "laplacian_is_two", 0.0);
  line.at_most(n, "component_e1_e2_e2", kCocycleTol);
  line.witnessed(n, "not_flat");
  print(7, "conformal cochain: harmonic f cocycle and flat; f = x^2 Laplacian 2, component identity, not flat", line);
}

void criterion_8() {
  Line line;
  Report o = obstruction_check(ProbeConfig{});
  line.at_most(o, "hessian_system_upper", kHessianSystemTol);
  line.at_most(o, "hessian_system_lower", kHessianSystemTol);
  line.at_most(o, "jump_is_pi", kJumpTol);
  const AssertionResult* ext = nullptr;
  for (const auto& a : o.assertions)
    if (a.name == "not_extendable") ext = &a;
  line.check("non_extendable_verdict", ext && ext->verdict);
  line.at_most(scenario("example_6_2_cocycle"), "cocycle", kCocycleTol);
  print(8, "obstruction: Hessian system on both half planes, jump pi, non-extendable, cocycle", line);
}

void criterion_9() {
  Line line;
  Report r = scenario("appendix_dnabla");
  for (int i = 0; i < 10; ++i) line.at_most(r, "square_zero_" + std::to_string(i), kCocycleTol);
  line.at_most(r, "curvature_identity_hessian", kCurvatureTol);
  line.at_most(r, "curvature_identity_3d", kCurvatureTol);
  Report d = scenario("appendix_flat_decomposition");
  for (const char* n : {"logarithmic_form", "position_field", "random_form"}) line.at_most(d, n, kDecompositionTol);
  line.check("commuting_lemma", scenario("appendix_commuting_lemma").verdict);
  print(9, "d^nabla: square zero when flat, curvature identity, d + d decomposition, commuting lemma", line);
}

void criterion_10(const std::string& cli) {
  Line line;
  const std::string base = "\"" + cli + "\" ";
  Captured a = shell(base + "run all --seed 42 --samples 100 --format json");
  Captured b = shell(base + "run all --seed 42 --samples 100 --format json");
  line.check("identical_json", !a.out.empty() && a.out == b.out);
  line.check("run_all_exit_0", a.status == 0 && b.status == 0);
  line.check("d2_exit_0", shell(base + "d2 --degree 2 --trials 20").status == 0);
  line.check("list_exit_0", shell(base + "list").status == 0);
  line.check("unknown_exit_2", shell(base + "run nonexistent").status == 2);
  line.check("bad_flag_exit_2", shell(base + "run all --samples banana").status == 2);
  auto tmp = std::filesystem::temp_directory_path() / "kvg_acceptance_failing.json";
  {
    std::ofstream(tmp) << R"({"name": "failing", "chart": {"coordinates": ["x"], "box": [[0, 1]]},
      "assertions": [{"probe": "scalar_equal", "args": {"a": "x", "b": "x + 1"}}]})";
  }
  line.check("failure_exit_1", shell(base + "run \"" + tmp.string() + "\"").status == 1);
  std::filesystem::remove(tmp);
  DerivativeCheck fd = derivative_cross_check(derive_seed(42, "acceptance/fd"), 40, 100);
  line.value("fd_relative", fd.max_relative, fd.pass && fd.max_relative <= kFdTol, "<=", kFdTol);
  print(10, "byte-identical reports, exit codes, symbolic vs finite differences", line);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: kvg_acceptance <kvg cli>\n";
    return 2;
  }
  const std::vector<std::function<void()>> criteria = {criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                                                       criterion_6, criterion_7, criterion_8, criterion_9};
  for (const auto& c : criteria) {
    try {
      c();
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "FAIL (exception: " << e.what() << ")" << std::endl;
    }
  }
  try {
    criterion_10(argv[1]);
  } catch (const std::exception& e) {
    ++failures;
    std::cout << "FAIL [10] (exception: " << e.what() << ")" << std::endl;
  }
  std::cout << (10 - failures) << "/10 criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
