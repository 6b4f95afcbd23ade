// kvg: run verification scenarios and d^2 fuzzing from the command line.
//
// Exit status: 0 when everything executed passes, 1 on a failed scenario,
// 2 on bad usage or an unknown scenario.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "kvg/kv.hpp"
#include "kvg/scenarios.hpp"

namespace {

struct Options {
  std::uint64_t seed = 42;
  std::size_t samples = 100;
  double tol = 1e-9;
  std::size_t trials = 3;
  std::string format = "text";
  std::string scenario_dir;
  bool timing = false;
  std::string output;
};

int emit(const std::vector<kvg::Report>& reports, const Options& o) {
  const std::string text = o.format == "json" ? kvg::report_json(reports, o.timing) : kvg::report_text(reports);
  if (o.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(o.output, std::ios::binary);
    if (!out) {
      std::cerr << "kvg: cannot write " << o.output << "\n";
      return 2;
    }
    out << text;
  }
  for (const auto& r : reports)
    if (!r.verdict) return 1;
  return 0;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Koszul-Vinberg cochain verification scenarios"};
  app.fallthrough();
  app.require_subcommand(1);
  Options o;
  app.add_option("--seed", o.seed, "Global RNG seed")->capture_default_str();
  app.add_option("--samples", o.samples, "Sample points per probe")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--tol", o.tol, "Default probe tolerance")->capture_default_str()->check(CLI::NonNegativeNumber);
  app.add_option("--trials", o.trials, "Random-field trials per probe")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--format", o.format, "Report format")->capture_default_str()->check(CLI::IsMember({"text", "json"}));
  app.add_option("--scenario-dir", o.scenario_dir, "Extra directory of *.json scenarios")->check(CLI::ExistingDirectory);
  app.add_flag("--timing", o.timing, "Include wall times in JSON reports");

  std::string target;
  auto* run = app.add_subcommand("run", "Run one scenario (name or .json file) or all");
  run->add_option("scenario", target, "Scenario name, scenario file, or 'all'")->required();
  run->add_option("--output", o.output, "Write the report to a file");

  auto* list = app.add_subcommand("list", "List scenario names");

  std::size_t degree = 0, fuzz_trials = 20;
  auto* d2 = app.add_subcommand("d2", "d(d theta) = 0 on random cochains");
  d2->add_option("--degree", degree, "Cochain degree")->required()->check(CLI::Range(0, 2));
  d2->add_option("--trials", fuzz_trials, "Number of random cochains")->capture_default_str();
  d2->add_option("--output", o.output, "Write the report to a file");

  auto* report = app.add_subcommand("report", "Run every scenario and write the full report");
  report->add_option("--output", o.output, "Write the report to a file");

  std::string candidate = "x/2*ln(x^2+y^2) + y*atan(x/y)";
  auto* obstruction = app.add_subcommand("obstruction", "Non-primitive check on a candidate primitive component");
  obstruction->add_option("--candidate", candidate, "Candidate u(x, y)")->capture_default_str();
  obstruction->add_option("--output", o.output, "Write the report to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  kvg::ProbeConfig cfg;
  cfg.seed = o.seed;
  cfg.samples = o.samples;
  cfg.tolerance = o.tol;
  cfg.trials = o.trials;

  try {
    kvg::Registry registry = kvg::Registry::builtin();
    if (!o.scenario_dir.empty()) registry.load_directory(o.scenario_dir);

    if (*list) {
      for (const auto& n : registry.names()) std::cout << n << "\n";
      return 0;
    }
    if (*run) {
      if (target == "all") return emit(kvg::run_all(registry, cfg), o);
      if (!registry.contains(target) && target.size() > 5 && target.ends_with(".json") &&
          std::filesystem::is_regular_file(target))
        return emit({kvg::run_scenario_text(read_file(target), cfg)}, o);
      return emit({kvg::run_scenario(registry, target, cfg)}, o);
    }
    if (*report) return emit(kvg::run_all(registry, cfg), o);
    if (*d2) return emit({kvg::d2_fuzz(degree, fuzz_trials, cfg)}, o);
    if (*obstruction) return emit({kvg::obstruction_check(cfg, candidate)}, o);
  } catch (const kvg::UnknownScenario& e) {
    std::cerr << "kvg: " << e.what() << "\n";
    return 2;
  } catch (const kvg::ScenarioError& e) {
    std::cerr << "kvg: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "kvg: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
