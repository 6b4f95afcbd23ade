#include <cmath>

#include <json.hpp>

#include "kvg/kv.hpp"
#include "kvg/scenarios.hpp"

namespace kvg {

using nlohmann::json;

LimitEstimate one_sided_limits(const Expr& f, std::vector<double> base, std::size_t along) {
  if (along >= base.size()) throw std::out_of_range("one_sided_limits: coordinate");
  constexpr int kLevels = 6;
  auto extrapolate = [&](double sign) {
    // Richardson table in powers of t with step ratio 10.
    std::vector<double> r(kLevels);
    for (int k = 0; k < kLevels; ++k) {
      base[along] = sign * std::pow(10.0, -(k + 1));
      r[k] = expr::evaluate(f, base);
    }
    double factor = 1.0;
    for (int level = 1; level < kLevels; ++level) {
      factor *= 10.0;
      for (int k = 0; k + level < kLevels; ++k) r[k] = (factor * r[k + 1] - r[k]) / (factor - 1.0);
    }
    return r[0];
  };
  LimitEstimate out;
  out.upper = extrapolate(1.0);
  out.lower = extrapolate(-1.0);
  return out;
}

Report obstruction_check(const ProbeConfig& cfg, const std::string& candidate) {
  const json half = {{"coordinates", {"x", "y"}}, {"box", {{-2, 2}, {-2, 2}}}, {"standoff", 1e-3}};
  json upper = half;
  upper["domain"] = {"y > 0"};
  json lower = half;
  lower["domain"] = {"y < 0"};
  json plane = half;
  plane["domain"] = {"x^2 + y^2 > 0"};
  const json system = {{"u", candidate}, {"factor", "-(x^2+y^2)"}, {"matrix", {"x", "y", "y", "-x"}}};
  json on_upper = system;
  on_upper["chart"] = "upper";
  json on_lower = system;
  on_lower["chart"] = "lower";
  const json limits = {{"u", candidate}, {"derivative", "y"}, {"at", {2.0, 0.0}}, {"along", "y"}};
  json jump = limits;
  jump["equals"] = "pi";
  json doc = {
      {"name", "obstruction_check"},
      {"description", "candidate primitive component u of the conformal cocycle of 1/2 ln(x^2+y^2)"},
      {"chart", plane},
      {"charts", {{"upper", upper}, {"lower", lower}}},
      {"assertions",
       {{{"name", "hessian_system_upper"},
         {"reference", "-(x^2+y^2) Hess(u) = [[x, y], [y, -x]] on y > 0"},
         {"probe", "hessian_system"},
         {"args", on_upper},
         {"tolerance", 1e-9}},
        {{"name", "hessian_system_lower"},
         {"reference", "-(x^2+y^2) Hess(u) = [[x, y], [y, -x]] on y < 0"},
         {"probe", "hessian_system"},
         {"args", on_lower},
         {"tolerance", 1e-9}},
        {{"name", "jump_is_pi"},
         {"reference", "u_y(2,t) -> pi/2 + b as t -> 0+, -pi/2 + b as t -> 0-"},
         {"probe", "one_sided_jump"},
         {"args", jump},
         {"tolerance", 1e-6}},
        {{"name", "not_extendable"},
         {"reference", "t -> u_y(2,t) cannot be extended continuously"},
         {"probe", "continuity"},
         {"args", limits},
         {"expect", "fail"},
         {"tolerance", 1e-6}}}}};
  return run_scenario_text(doc.dump(), cfg);
}

Report d2_fuzz(std::size_t degree, std::size_t trials, const ProbeConfig& cfg) {
  if (degree > 2) throw DegreeError("d2 fuzzing takes degree 0, 1 or 2");
  Report report;
  report.scenario = "d2_degree_" + std::to_string(degree);
  report.description = "d_KV(d_KV theta) = 0 on random cochains over random flat structures";
  report.seed = cfg.seed;
  report.config = cfg;
  report.verdict = true;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t dim = 2 + t % 2;
    ChartPtr chart = euclidean_chart(dim);
    Rng rng(derive_seed(cfg.seed, report.scenario, t));
    FlatStructure flat = random_flat_structure(chart, rng);
    ProbeConfig pc = cfg;
    pc.seed = derive_seed(cfg.seed, report.scenario + "/probe", t);
    KVContext ctx(flat.connection, pc);
    Cochain theta;
    std::string what;
    if (degree == 0) {
      theta = jacobi_element(ctx, random_jacobi_field(flat, rng));
      what = "jacobi";
    } else if (degree == 1) {
      theta = tensor_cochain(random_tensor_field(chart, 1, cfg.field_degree, rng)) +
              ad_cochain(random_vector_field(chart, cfg.field_degree, rng));
      what = "tensor+ad";
    } else {
      theta = tensor_cochain(random_tensor_field(chart, 2, cfg.field_degree, rng)) +
              connection_cochain(Connection(random_tensor_field(chart, 2, 1, rng)));
      what = "tensor+connection";
    }
    AssertionResult r;
    r.name = "trial_" + std::to_string(t) + "_dim" + std::to_string(dim) + "_" + what;
    r.reference = "d_KV o d_KV = 0";
    r.probe = "d2";
    r.report = d2_probe(ctx, theta, pc);
    r.verdict = assertion_verdict(Expectation::Pass, r.report);
    report.verdict = report.verdict && r.verdict;
    report.assertions.push_back(std::move(r));
  }
  return report;
}

}  // namespace kvg
