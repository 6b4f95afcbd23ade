#include <chrono>
#include <map>
#include <optional>
#include <set>
#include <variant>

#include <json.hpp>

#include "kvg/connection.hpp"
#include "kvg/derham.hpp"
#include "kvg/kv.hpp"
#include "kvg/scenarios.hpp"

namespace kvg {

using nlohmann::json;

namespace {

using Value = std::variant<Expr, VectorField, OneForm, MetricField, Bilinear, Connection, Cochain, TwistedForm>;

const char* type_name(const Value& v) {
  static const char* names[] = {"scalar", "vector", "one_form", "metric", "bilinear", "connection", "cochain",
                                "twisted_form"};
  return names[v.index()];
}

std::vector<std::string> strings(const json& j, const std::string& what) {
  if (!j.is_array()) throw ScenarioError(what + ": expected an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (e.is_string()) out.push_back(e.get<std::string>());
    else if (e.is_number()) out.push_back(e.dump());
    else throw ScenarioError(what + ": expected strings");
  }
  return out;
}

ChartPtr parse_chart(const json& j) {
  try {
    auto names = j.at("coordinates").get<std::vector<std::string>>();
    std::vector<Interval> box;
    for (const auto& b : j.at("box")) box.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
    std::vector<std::string> domain = j.value("domain", std::vector<std::string>{});
    return make_chart(names, box, domain, j.value("standoff", 0.0));
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("chart: ") + e.what());
  }
}

class Scenario {
 public:
  Scenario(json doc, ProbeConfig cfg) : doc_(std::move(doc)), cfg_(cfg) {
    if (!doc_.is_object()) throw ScenarioError("scenario must be a JSON object");
    name_ = doc_.value("name", std::string());
    if (name_.empty()) throw ScenarioError("scenario without a name");
    if (!doc_.contains("chart")) throw ScenarioError(name_ + ": no chart");
    charts_["main"] = parse_chart(doc_["chart"]);
    if (doc_.contains("charts"))
      for (const auto& [k, v] : doc_["charts"].items()) charts_[k] = parse_chart(v);
    bindings_ = doc_.value("bindings", json::object());
  }

  Report run() {
    Report report;
    report.scenario = name_;
    report.description = doc_.value("description", std::string());
    report.seed = cfg_.seed;
    report.config = cfg_;
    const auto& assertions = doc_.value("assertions", json::array());
    if (!assertions.is_array() || assertions.empty()) throw ScenarioError(name_ + ": no assertions");
    std::vector<AssertionResult> results;
    try {
      std::size_t index = 0;
      for (const auto& a : assertions) results.push_back(run_assertion(a, index++));
    } catch (const SetupError& e) {
      report.setup_error = e.what();
      report.verdict = false;
      return report;
    }
    report.assertions = std::move(results);
    report.verdict = true;
    for (const auto& r : report.assertions) report.verdict = report.verdict && r.verdict;
    return report;
  }

 private:
  json doc_;
  ProbeConfig cfg_;
  std::string name_;
  std::map<std::string, ChartPtr> charts_;
  json bindings_;
  std::map<std::string, Value> cache_;
  std::set<std::string> resolving_;
  std::map<std::string, KVContext> contexts_;

  ChartPtr chart_of(const json& j) const {
    std::string key = j.is_object() ? j.value("chart", std::string("main")) : "main";
    auto it = charts_.find(key);
    if (it == charts_.end()) throw ScenarioError(name_ + ": unknown chart '" + key + "'");
    return it->second;
  }

  Rng rng_for(const std::string& binding) const { return Rng(derive_seed(cfg_.seed, name_ + "/" + binding)); }

  // -------------------------------------------------------------------------
  // Bindings

  const Value& resolve(const std::string& name) {
    if (auto it = cache_.find(name); it != cache_.end()) return it->second;
    if (!bindings_.contains(name)) throw ScenarioError(name_ + ": unknown binding '" + name + "'");
    if (!resolving_.insert(name).second) throw ScenarioError(name_ + ": binding cycle through '" + name + "'");
    Value v = build(name, bindings_[name]);
    resolving_.erase(name);
    return cache_.emplace(name, std::move(v)).first->second;
  }

  template <class T>
  T get(const json& j, const std::string& what) {
    if (!j.is_string()) throw ScenarioError(name_ + ": " + what + " must name a binding");
    const Value& v = resolve(j.get<std::string>());
    if (const T* t = std::get_if<T>(&v)) return *t;
    if constexpr (std::is_same_v<T, Bilinear>) {
      if (const auto* m = std::get_if<MetricField>(&v)) return m->as_bilinear();
    }
    throw ScenarioError(name_ + ": binding '" + j.get<std::string>() + "' is a " + type_name(v) + ", not usable as " +
                        what);
  }

  const json& arg(const json& j, const char* key) const {
    if (!j.contains(key)) throw ScenarioError(name_ + ": missing '" + key + "' in " + j.dump());
    return j.at(key);
  }

  /// A scalar binding name, a number, or an expression on `chart`.
  Expr scalar(const json& j, const ChartPtr& chart) {
    if (j.is_number()) return Expr(j.get<double>());
    if (!j.is_string()) throw ScenarioError(name_ + ": expected a scalar");
    const std::string s = j.get<std::string>();
    if (bindings_.contains(s)) return get<Expr>(j, "scalar");
    try {
      return chart->parse(s);
    } catch (const std::exception& e) {
      throw ScenarioError(name_ + ": cannot parse '" + s + "': " + e.what());
    }
  }

  std::vector<Expr> expressions(const json& j, const ChartPtr& chart) {
    if (!j.is_array()) throw ScenarioError(name_ + ": expected an array of expressions");
    std::vector<Expr> out;
    for (const auto& e : j) out.push_back(scalar(e, chart));
    return out;
  }

  const KVContext& context(const json& j) {
    std::string key = j.is_object() ? j.value("context", doc_.value("context", std::string("nabla")))
                                    : doc_.value("context", std::string("nabla"));
    if (auto it = contexts_.find(key); it != contexts_.end()) return it->second;
    Connection c = get<Connection>(json(key), "context connection");
    ProbeConfig pc = cfg_;
    pc.seed = derive_seed(cfg_.seed, name_ + "/context/" + key);
    try {
      return contexts_.emplace(key, KVContext(c, pc)).first->second;
    } catch (const SetupError& e) {
      throw SetupError("context '" + key + "': " + e.what());
    }
  }

  Value build(const std::string& name, const json& j) {
    const std::string type = j.value("type", std::string());
    ChartPtr chart = chart_of(j);
    try {
      if (type == "scalar") return build_scalar(j, chart);
      if (type == "vector") return build_vector(name, j, chart);
      if (type == "one_form") return build_one_form(name, j, chart);
      if (type == "metric") return build_metric(j, chart);
      if (type == "bilinear") return build_bilinear(j, chart);
      if (type == "connection") return build_connection(name, j, chart);
      if (type == "cochain") return build_cochain(name, j, chart);
      if (type == "twisted_form") return build_twisted(name, j, chart);
    } catch (const ScenarioError&) {
      throw;
    } catch (const SetupError&) {
      throw;
    } catch (const std::exception& e) {
      throw ScenarioError(name_ + ": binding '" + name + "': " + e.what());
    }
    throw ScenarioError(name_ + ": binding '" + name + "' has unknown type '" + type + "'");
  }

  Value build_scalar(const json& j, const ChartPtr& chart) {
    if (j.contains("expr")) return scalar(j["expr"], chart);
    if (j.contains("laplacian")) return laplacian(scalar(j["laplacian"], chart), get<MetricField>(arg(j, "metric"), "metric"));
    throw ScenarioError(name_ + ": scalar needs 'expr' or 'laplacian'");
  }

  Value build_vector(const std::string& name, const json& j, const ChartPtr& chart) {
    if (j.contains("components")) return VectorField(chart, expressions(j["components"], chart));
    if (j.contains("coordinate")) return VectorField::coordinate(chart, j["coordinate"].get<std::size_t>());
    if (j.contains("random_degree")) {
      Rng rng = rng_for(name);
      return random_vector_field(chart, j["random_degree"].get<int>(), rng);
    }
    if (j.contains("gradient"))
      return gradient(scalar(j["gradient"], chart), get<MetricField>(arg(j, "metric"), "metric"));
    throw ScenarioError(name_ + ": vector needs 'components', 'coordinate', 'random_degree' or 'gradient'");
  }

  Value build_one_form(const std::string& name, const json& j, const ChartPtr& chart) {
    if (j.contains("components")) return OneForm(chart, expressions(j["components"], chart));
    if (j.contains("differential")) return OneForm::differential(chart, scalar(j["differential"], chart));
    if (j.contains("random_degree")) {
      Rng rng = rng_for(name);
      return random_one_form(chart, j["random_degree"].get<int>(), rng);
    }
    throw ScenarioError(name_ + ": one_form needs 'components', 'differential' or 'random_degree'");
  }

  Value build_metric(const json& j, const ChartPtr& chart) {
    if (j.contains("components")) return MetricField(chart, expressions(j["components"], chart));
    if (j.contains("hessian_of")) return MetricField::hessian_of(chart, scalar(j["hessian_of"], chart));
    if (j.value("euclidean", false)) return MetricField::euclidean(chart);
    if (j.contains("conformal")) {
      const json& c = j["conformal"];
      return get<MetricField>(arg(c, "metric"), "metric").conformal(scalar(arg(c, "f"), chart));
    }
    throw ScenarioError(name_ + ": metric needs 'components', 'hessian_of', 'euclidean' or 'conformal'");
  }

  Value build_bilinear(const json& j, const ChartPtr& chart) {
    if (j.contains("components")) return Bilinear(chart, expressions(j["components"], chart));
    if (j.contains("metric")) return get<MetricField>(j["metric"], "metric").as_bilinear();
    if (j.contains("hessian"))
      return hessian(scalar(j["hessian"], chart), get<Connection>(arg(j, "connection"), "connection"));
    throw ScenarioError(name_ + ": bilinear needs 'components', 'metric' or 'hessian'");
  }

  Value build_connection(const std::string& name, const json& j, const ChartPtr& chart) {
    if (j.value("flat", false)) return Connection::flat(chart);
    if (j.contains("christoffel")) return Connection::parse(chart, strings(j["christoffel"], name), name);
    if (j.contains("levi_civita")) return levi_civita(get<MetricField>(j["levi_civita"], "metric"));
    if (j.contains("conjugate"))
      return conjugate(get<Connection>(j["conjugate"], "connection"), get<MetricField>(arg(j, "metric"), "metric"));
    if (j.contains("midpoint")) {
      const json& m = j["midpoint"];
      return midpoint(get<Connection>(m.at(0), "connection"), get<Connection>(m.at(1), "connection"));
    }
    if (j.contains("affine")) return Connection::affine_pullback(chart, expressions(j["affine"], chart), name);
    if (j.contains("deform")) {
      Connection base = get<Connection>(j["deform"], "connection");
      Cochain theta = materialize(get<Cochain>(arg(j, "by"), "cochain"));
      if (theta.degree() != 2) throw ScenarioError(name_ + ": deformation by a cochain of degree != 2");
      return base.deformed(j.value("factor", 1.0) * *theta.tensor(), name);
    }
    throw ScenarioError(name_ + ": connection needs one of flat, christoffel, levi_civita, conjugate, midpoint, "
                        "affine, deform");
  }

  Value build_twisted(const std::string& name, const json& j, const ChartPtr& chart) {
    if (j.contains("terms")) {
      TwistedForm t = TwistedForm::zero(chart, j.at("degree").get<std::size_t>());
      for (const auto& term : j["terms"]) {
        auto lower = term.at("lower").get<std::vector<std::size_t>>();
        t = t.with(term.at("target").get<std::size_t>(), lower, scalar(term.at("expr"), chart));
      }
      return t;
    }
    if (j.contains("vector")) return TwistedForm::from_vector_field(get<VectorField>(j["vector"], "vector"));
    if (j.contains("random_degree")) {
      Rng rng = rng_for(name);
      return random_twisted_form(chart, j["random_degree"].get<std::size_t>(), j.value("poly_degree", 2), rng);
    }
    if (j.contains("d_nabla"))
      return d_nabla(get<Connection>(arg(j, "connection"), "connection"), get<TwistedForm>(j["d_nabla"], "form"));
    throw ScenarioError(name_ + ": twisted_form needs 'terms', 'vector', 'random_degree' or 'd_nabla'");
  }

  Value build_cochain(const std::string& name, const json& j, const ChartPtr& chart) {
    const std::string ctor = j.value("constructor", std::string());
    if (ctor == "zero") return Cochain::zero(chart, j.at("degree").get<std::size_t>());
    if (ctor == "identity") return identity_cochain(chart);
    if (ctor == "scalar") return scalar_cochain(chart, scalar(arg(j, "f"), chart));
    if (ctor == "ad") return ad_cochain(get<VectorField>(arg(j, "z"), "vector"));
    if (ctor == "jacobi") return jacobi_element(context(j), get<VectorField>(arg(j, "z"), "vector"));
    if (ctor == "projective") return projective_cochain(get<OneForm>(arg(j, "omega"), "one_form"));
    if (ctor == "dual_projective")
      return dual_projective_cochain(get<Bilinear>(arg(j, "h"), "bilinear"), get<VectorField>(arg(j, "v"), "vector"));
    if (ctor == "conformal")
      return conformal_cochain(get<MetricField>(arg(j, "metric"), "metric"), scalar(arg(j, "f"), chart));
    if (ctor == "conn_diff") return conn_diff_cochain(get<Connection>(arg(j, "connection"), "connection"), context(j));
    if (ctor == "connection") return connection_cochain(get<Connection>(arg(j, "connection"), "connection"));
    if (ctor == "coboundary") return coboundary_candidate(get<VectorField>(arg(j, "z"), "vector"), context(j));
    if (ctor == "curvature") return curvature_cochain(get<Connection>(arg(j, "connection"), "connection"));
    if (ctor == "tensor") {
      const std::size_t degree = j.at("degree").get<std::size_t>();
      return tensor_cochain(TensorField(chart, degree, expressions(arg(j, "components"), chart)), name);
    }
    if (ctor == "random_tensor") {
      Rng rng = rng_for(name);
      return tensor_cochain(
          random_tensor_field(chart, j.at("degree").get<std::size_t>(), j.value("poly_degree", 2), rng), name);
    }
    if (ctor == "d") return d_kv(context(j), get<Cochain>(arg(j, "of"), "cochain"));
    if (ctor == "nabla")
      return nabla_cochain(context(j), get<VectorField>(arg(j, "x"), "vector"), get<Cochain>(arg(j, "of"), "cochain"));
    if (ctor == "scale") return j.at("factor").get<double>() * get<Cochain>(arg(j, "of"), "cochain");
    if (ctor == "sum") {
      const json& terms = arg(j, "terms");
      if (!terms.is_array() || terms.empty()) throw ScenarioError(name_ + ": sum needs terms");
      Cochain total = get<Cochain>(terms[0], "cochain");
      for (std::size_t i = 1; i < terms.size(); ++i) total = total + get<Cochain>(terms[i], "cochain");
      return total;
    }
    if (ctor == "materialize") return materialize(get<Cochain>(arg(j, "of"), "cochain"));
    return build_display(name, ctor, j, chart);
  }

  /// Closed-form expansions used as independent oracles for d_KV.
  Value build_display(const std::string& name, const std::string& ctor, const json& j, const ChartPtr& chart) {
    if (ctor == "scalar_long_form" || ctor == "scalar_short_form") {
      const KVContext ctx = context(j);
      Expr f = scalar(arg(j, "f"), chart);
      if (ctor == "scalar_short_form")
        return Cochain(
            chart, 2, [ctx, f](std::span<const VectorField> a) { return -ctx.nabla(a[0], f * a[1]); },
            CochainKind::Custom, name);
      return Cochain(
          chart, 2,
          [ctx, f](std::span<const VectorField> a) {
            return -ctx.nabla(a[0], f * a[1]) + f * ctx.nabla(a[0], a[1]) - ctx.nabla(f * a[0], a[1]);
          },
          CochainKind::Custom, name);
    }
    if (ctor == "degree1_display") {
      const KVContext ctx = context(j);
      Cochain t = get<Cochain>(arg(j, "of"), "cochain");
      return Cochain(
          chart, 2,
          [ctx, t](std::span<const VectorField> a) {
            return -ctx.nabla(a[0], t({a[1]})) + t({ctx.nabla(a[0], a[1])}) - ctx.nabla(t({a[0]}), a[1]);
          },
          CochainKind::Custom, name);
    }
    if (ctor == "degree2_display" || ctor == "difference_display") {
      const KVContext ctx = context(j);
      Cochain t = get<Cochain>(arg(j, "of"), "cochain");
      const bool full = ctor == "degree2_display";
      return Cochain(
          chart, 3,
          [ctx, t, full](std::span<const VectorField> a) {
            const VectorField &x = a[0], &y = a[1], &z = a[2];
            VectorField out = nabla_cochain(ctx, y, t)({x, z}) - nabla_cochain(ctx, x, t)({y, z});
            if (full) out = out + ctx.nabla(t({x, y}) - t({y, x}), z);
            return out;
          },
          CochainKind::Custom, name);
    }
    if (ctor == "projective_nabla") {
      const KVContext ctx = context(j);
      OneForm w = get<OneForm>(arg(j, "omega"), "one_form");
      VectorField x = get<VectorField>(arg(j, "x"), "vector");
      OneForm nw = covariant_derivative(ctx.connection(), x, w);
      return Cochain(
          chart, 2, [nw](std::span<const VectorField> a) { return nw(a[0]) * a[1] + nw(a[1]) * a[0]; },
          CochainKind::Custom, name);
    }
    if (ctor == "dual_projective_nabla") {
      const KVContext ctx = context(j);
      Bilinear h = get<Bilinear>(arg(j, "h"), "bilinear");
      VectorField v = get<VectorField>(arg(j, "v"), "vector");
      VectorField x = get<VectorField>(arg(j, "x"), "vector");
      Bilinear nh = covariant_derivative(ctx.connection(), x, h);
      return Cochain(
          chart, 2, [nh, v](std::span<const VectorField> a) { return -(nh(a[0], a[1]) * v); }, CochainKind::Custom,
          name);
    }
    if (ctor == "theta_commutator") {
      Cochain t = get<Cochain>(arg(j, "of"), "cochain");
      return Cochain(
          chart, 3,
          [t](std::span<const VectorField> a) { return t({a[1], t({a[0], a[2]})}) - t({a[0], t({a[1], a[2]})}); },
          CochainKind::Custom, name);
    }
    throw ScenarioError(name_ + ": unknown cochain constructor '" + ctor + "'");
  }

  // -------------------------------------------------------------------------
  // Assertions

  AssertionResult run_assertion(const json& a, std::size_t index) {
    AssertionResult r;
    r.name = a.value("name", "assertion_" + std::to_string(index));
    r.reference = a.value("reference", std::string());
    r.probe = a.value("probe", std::string());
    const std::string expect = a.value("expect", std::string("pass"));
    if (expect != "pass" && expect != "fail") throw ScenarioError(name_ + ": expect must be pass or fail");
    r.expected = expect == "pass" ? Expectation::Pass : Expectation::Fail;
    ProbeConfig pc = cfg_;
    pc.seed = derive_seed(cfg_.seed, name_, index);
    if (a.contains("tolerance")) pc.tolerance = a["tolerance"].get<double>();
    if (a.contains("trials")) pc.trials = a["trials"].get<std::size_t>();
    const json& args = a.value("args", json::object());
    try {
      r.report = probe(r.probe, args, pc);
    } catch (const ScenarioError&) {
      throw;
    } catch (const SetupError&) {
      throw;
    } catch (const std::exception& e) {
      throw ScenarioError(name_ + ": assertion '" + r.name + "': " + e.what());
    }
    r.verdict = assertion_verdict(r.expected, r.report);
    return r;
  }

  EqualityReport probe(const std::string& kind, const json& a, const ProbeConfig& pc) {
    if (kind == "cochain_equal")
      return cochain_equal_probe(get<Cochain>(arg(a, "a"), "cochain"), get<Cochain>(arg(a, "b"), "cochain"), pc);
    if (kind == "cochain_zero") {
      Cochain c = get<Cochain>(arg(a, "a"), "cochain");
      return cochain_equal_probe(c, Cochain::zero(c.chart(), c.degree()), pc);
    }
    if (kind == "d2") {
      const json& of = arg(a, "of");
      return d2_probe(context(a), get<Cochain>(of, "cochain"), pc);
    }
    if (kind == "jacobi") return jacobi_probe(context(a), get<VectorField>(arg(a, "z"), "vector"), pc);
    if (kind == "symmetric") return symmetry_probe(get<Cochain>(arg(a, "of"), "cochain"), pc);
    if (kind == "tensorial") {
      Cochain c = get<Cochain>(arg(a, "of"), "cochain");
      if (a.contains("slot")) return tensoriality_probe(c, a["slot"].get<std::size_t>(), pc);
      return tensoriality_probe(c, pc);
    }
    if (kind == "multilinear") return multilinearity_probe(get<Cochain>(arg(a, "of"), "cochain"), pc);
    if (kind == "antisymmetric_part_bracket") {
      Cochain t = get<Cochain>(arg(a, "of"), "cochain");
      return probe_identity(
          t.chart(), 2,
          [&](std::span<const VectorField> f, Rng&) {
            return Comparison{(t({f[0], f[1]}) - t({f[1], f[0]})).components(), lie_bracket(f[1], f[0]).components()};
          },
          pc, "antisymmetric");
    }
    if (kind == "flat") return flatness_probe(get<Connection>(arg(a, "connection"), "connection"), pc);
    if (kind == "torsion_free") return torsion_probe(get<Connection>(arg(a, "connection"), "connection"), pc);
    if (kind == "connection_equal")
      return fields_equal_probe(get<Connection>(arg(a, "a"), "connection").christoffel(),
                                get<Connection>(arg(a, "b"), "connection").christoffel(), pc);
    if (kind == "codazzi")
      return codazzi_probe(get<Bilinear>(arg(a, "h"), "bilinear"), get<Connection>(arg(a, "connection"), "connection"),
                           pc);
    if (kind == "parallel")
      return parallel_probe(get<Connection>(arg(a, "connection"), "connection"), get<VectorField>(arg(a, "v"), "vector"),
                            pc);
    if (kind == "conjugate_identity")
      return conjugate_identity_probe(get<Connection>(arg(a, "connection"), "connection"),
                                      get<Connection>(arg(a, "dual"), "connection"),
                                      get<MetricField>(arg(a, "metric"), "metric"), pc);
    if (kind == "metric_compatible")
      return metric_compatibility_probe(get<Connection>(arg(a, "connection"), "connection"),
                                        get<MetricField>(arg(a, "metric"), "metric"), pc);
    if (kind == "scalar_equal") {
      ChartPtr chart = chart_of(a);
      return fields_equal_probe(chart, scalar(arg(a, "a"), chart), scalar(arg(a, "b"), chart), pc);
    }
    if (kind == "vector_equal")
      return fields_equal_probe(get<VectorField>(arg(a, "a"), "vector"), get<VectorField>(arg(a, "b"), "vector"), pc);
    if (kind == "frame_component") return frame_component(a, pc);
    if (kind == "hessian_system") return hessian_system(a, pc);
    if (kind == "one_sided_jump" || kind == "continuity") return jump(kind, a, pc);
    if (kind == "twisted_equal") {
      TwistedForm x = get<TwistedForm>(arg(a, "a"), "twisted_form");
      TwistedForm y = get<TwistedForm>(arg(a, "b"), "twisted_form");
      const Comparison groups[] = {{x.components(), y.components()}};
      return compare_on(groups, probe_points(*x.chart(), pc), pc);
    }
    if (kind == "dnabla_square_zero") {
      Connection c = get<Connection>(arg(a, "connection"), "connection");
      TwistedForm t = get<TwistedForm>(arg(a, "form"), "twisted_form");
      TwistedForm dd = d_nabla(c, d_nabla(c, t));
      const Comparison groups[] = {{dd.components(), std::vector<Expr>(dd.components().size(), Expr(0.0))}};
      return compare_on(groups, probe_points(*t.chart(), pc), pc);
    }
    if (kind == "curvature_identity" || kind == "dnabla_formula" || kind == "dnabla_display" ||
        kind == "dnabla_antisymmetric" || kind == "dnabla_decomposition") {
      Connection c = get<Connection>(arg(a, "connection"), "connection");
      TwistedForm t = get<TwistedForm>(arg(a, "form"), "twisted_form");
      if (kind == "curvature_identity") return curvature_identity_probe(c, t, pc);
      if (kind == "dnabla_formula") return d_nabla_formula_probe(c, t, pc);
      if (kind == "dnabla_display") return d_nabla_display_probe(c, t, pc);
      if (kind == "dnabla_antisymmetric") return antisymmetry_probe(c, t, pc);
      return scalar_decomposition_probe(c, t, pc);
    }
    if (kind.rfind("commuting_", 0) == 0) {
      CommutingCheck check = commuting_lemma_check(get<VectorField>(arg(a, "v"), "vector"), pc);
      if (kind == "commuting_coordinate_stage") return check.coordinate_stage;
      if (kind == "commuting_euler_stage") return check.euler_stage;
      if (kind == "commuting_euler_identity") return check.euler_identity;
      if (kind == "commuting_lemma") {
        // Holds vacuously once a bracket is nonzero; otherwise X must vanish.
        if (check.commutes()) return check.vanishing;
        const auto& p = check.coordinate_stage.points;
        return make_report(p, std::vector<double>(p.size(), 0.0), pc.tolerance);
      }
    }
    throw ScenarioError(name_ + ": unknown probe '" + kind + "'");
  }

  /// g(theta(e_i, e_j, e_k), e_l) against factor * value on an orthonormal frame.
  EqualityReport frame_component(const json& a, const ProbeConfig& pc) {
    Cochain t = get<Cochain>(arg(a, "of"), "cochain");
    MetricField g = get<MetricField>(arg(a, "metric"), "metric");
    auto slots = arg(a, "slots").get<std::vector<std::size_t>>();
    const std::size_t project = arg(a, "project").get<std::size_t>();
    auto frame = orthonormal_frame(g);
    if (slots.size() != t.degree()) throw ScenarioError(name_ + ": frame_component slot count");
    std::vector<VectorField> args;
    for (auto s : slots) args.push_back(frame.at(s));
    Expr lhs = g(t(args), frame.at(project));
    Expr rhs = Expr(a.value("factor", 1.0)) * scalar(arg(a, "equals"), t.chart());
    return fields_equal_probe(t.chart(), lhs, rhs, pc);
  }

  /// factor * (d_i d_j u) against a matrix of expressions.
  EqualityReport hessian_system(const json& a, const ProbeConfig& pc) {
    ChartPtr chart = chart_of(a);
    Expr u = scalar(arg(a, "u"), chart);
    Expr factor = scalar(a.value("factor", json(1.0)), chart);
    auto matrix = expressions(arg(a, "matrix"), chart);
    const std::size_t n = chart->dimension();
    if (matrix.size() != n * n) throw ScenarioError(name_ + ": hessian_system matrix size");
    std::vector<Expr> lhs;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) lhs.push_back(factor * differentiate(differentiate(u, i), j));
    const Comparison groups[] = {{lhs, matrix}};
    return compare_on(groups, probe_points(*chart, pc), pc);
  }

  /// One-sided limits of d_var u at `at` with coordinate `along` -> 0.
  EqualityReport jump(const std::string& kind, const json& a, const ProbeConfig& pc) {
    ChartPtr chart = chart_of(a);
    Expr u = scalar(arg(a, "u"), chart);
    const std::size_t var = chart->coordinate_index(arg(a, "derivative").get<std::string>());
    auto at = arg(a, "at").get<std::vector<double>>();
    const std::size_t along = chart->coordinate_index(arg(a, "along").get<std::string>());
    LimitEstimate lim = one_sided_limits(differentiate(u, var), at, along);
    double residual;
    if (kind == "continuity") {
      residual = std::abs(lim.jump()) / (1.0 + std::max(std::abs(lim.upper), std::abs(lim.lower)));
    } else {
      const double expected = expr::evaluate(scalar(arg(a, "equals"), chart), at);
      residual = std::abs(lim.jump() - expected);
    }
    at[along] = 0.0;
    PointSet points(chart->dimension(), at);
    return make_report(std::move(points), {residual}, pc.tolerance);
  }
};

}  // namespace

bool assertion_verdict(Expectation expected, const EqualityReport& report) {
  if (expected == Expectation::Pass) return report.pass;
  return !report.pass && report.max_residual >= kWitnessThreshold;
}

Report run_scenario_text(const std::string& json_text, const ProbeConfig& cfg) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("scenario JSON: ") + e.what());
  }
  const auto start = std::chrono::steady_clock::now();
  Scenario s(std::move(doc), cfg);
  Report r = s.run();
  r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace kvg
