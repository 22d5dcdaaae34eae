#include "app.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "model_file.hpp"

namespace riskmdp::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string command;
  std::string file;
  std::string out_dir = ".";
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

class OutputError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Writes result tables and the report into the output directory.
class Writer {
 public:
  explicit Writer(const Options& opts) : opts_(opts) {}

  void table(const std::string& stem, const std::vector<std::string>& header,
             const std::vector<std::vector<std::string>>& rows) {
    if (opts_.format == "json") {
      Json arr = Json::array();
      for (const auto& row : rows) {
        Json obj = Json::object();
        for (std::size_t i = 0; i < header.size(); ++i) obj[header[i]] = cell(row[i]);
        arr.push_back(std::move(obj));
      }
      write(stem + ".json", arr.dump(2) + "\n");
      return;
    }
    std::string text;
    for (std::size_t i = 0; i < header.size(); ++i) text += (i ? "," : "") + header[i];
    text += "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) text += (i ? "," : "") + row[i];
      text += "\n";
    }
    write(stem + ".csv", text);
  }

  void json(const std::string& name, const Json& doc) { write(name, doc.dump(2) + "\n"); }

  const std::vector<std::string>& written() const noexcept { return written_; }

 private:
  static Json cell(const std::string& text) {
    Json v = Json::parse(text, nullptr, false);
    return v.is_discarded() ? Json(text) : v;
  }

  void write(const std::string& name, const std::string& text) {
    const fs::path dir(opts_.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    const fs::path path = dir / name;
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) throw OutputError("cannot write " + path.string());
    written_.push_back(path.string());
  }

  const Options& opts_;
  std::vector<std::string> written_;
};

struct Context {
  const Options& opts;
  Writer& writer;
  std::ostream& out;
  std::ostream& err;
};

struct Outcome {
  int code = kExitOk;
  Json report = Json::object();
  std::optional<FiniteSolveResult> finite;
  std::optional<InfiniteSolveResult> infinite;
};

std::string integer(std::size_t v) { return std::to_string(v); }

Json params_for(const Json& task, const std::string& kind) {
  const auto it = task.find("kind");
  if (it == task.end() || (it->is_string() && it->get<std::string>() == kind)) return task;
  return Json::object();
}

double param_number(const Json& p, const char* key, double fallback) {
  const auto it = p.find(key);
  if (it == p.end()) return fallback;
  if (!it->is_number()) throw ParseError({std::string("task.") + key + ": expected a number"});
  return it->get<double>();
}

std::optional<std::size_t> param_count(const Json& p, const char* key) {
  const auto it = p.find(key);
  if (it == p.end()) return std::nullopt;
  if (!it->is_number_integer() || it->get<long long>() < 0) {
    throw ParseError({std::string("task.") + key + ": expected a nonnegative integer"});
  }
  return it->get<std::size_t>();
}

bool param_bool(const Json& p, const char* key, bool fallback) {
  const auto it = p.find(key);
  if (it == p.end()) return fallback;
  if (!it->is_boolean()) throw ParseError({std::string("task.") + key + ": expected a boolean"});
  return it->get<bool>();
}

std::size_t required_horizon(const Json& p) {
  const auto n = param_count(p, "horizon");
  if (!n) throw ParseError({"task.horizon: missing"});
  return *n;
}

std::uint64_t seed_for(const Context& ctx, const Json& p) {
  if (ctx.opts.seed) return *ctx.opts.seed;
  return param_count(p, "seed").value_or(0);
}

const MdpModel& require_model(const ModelFile& f) {
  if (!f.model) throw ParseError({"model: missing"});
  return *f.model;
}

const RiskMeasure& single_risk(const ModelFile& f) {
  if (f.risk.empty()) throw ParseError({"risk: missing"});
  if (f.risk.size() != 1) throw ParseError({"risk: this task takes a single risk measure"});
  return f.risk.front();
}

Json risk_names(const std::vector<RiskMeasure>& rms) {
  Json names = Json::array();
  for (const auto& rm : rms) names.push_back(rm.describe());
  return names;
}

/// Constant bounds at the largest admissible |cost| when the file has none.
BoundingSpec bounds_or_default(const ModelFile& f, const RiskMeasure& rm, Json& report) {
  if (f.bounds) {
    report["bounds_source"] = "file";
    return *f.bounds;
  }
  const auto& m = *f.model;
  double k = 0.0;
  for (StateIndex x = 0; x < m.n_states(); ++x) {
    for (ActionIndex a : m.admissible(x)) {
      for (DisturbanceIndex z = 0; z < m.n_disturbances(); ++z) {
        k = std::max(k, std::abs(m.cost(x, a, z)));
      }
    }
  }
  report["bounds_source"] = "derived";
  return BoundingSpec::constant(m.n_states(), k, 1.0,
                                rm.is_coherent() ? BoundingMode::Coherent : BoundingMode::BoundedCost);
}

std::string label_of(const MdpModel& m, StateIndex x) {
  return m.has_state_labels() ? format_number(m.state_labels()[x]) : integer(x);
}

void write_values(Context& ctx, const MdpModel& m, const std::vector<ValueFunction>& values) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t n = 0; n < values.size(); ++n) {
    for (StateIndex x = 0; x < m.n_states(); ++x) {
      rows.push_back({integer(n), integer(x), label_of(m, x), format_number(values[n][x])});
    }
  }
  ctx.writer.table("values", {"stage", "state", "label", "value"}, rows);
}

void write_policy(Context& ctx, const MdpModel& m, const Policy& pi) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t n = 0; n < pi.stages.size(); ++n) {
    for (StateIndex x = 0; x < m.n_states(); ++x) {
      rows.push_back({integer(n), integer(x), integer(pi.stages[n][x])});
    }
  }
  ctx.writer.table("policy", {"stage", "state", "action"}, rows);
}

Json witness_json(const AxiomWitness& w) {
  return {{"probs", w.sample.probs}, {"x", w.sample.x}, {"y", w.sample.y},
          {"scalar", w.scalar},      {"lhs", w.lhs},    {"rhs", w.rhs},
          {"detail", w.detail}};
}

Json axiom_report_json(const AxiomReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    Json j{{"axiom", to_string(c.axiom)}, {"status", c.status()}, {"asserted", c.asserted},
           {"holds", c.holds},            {"trials", c.trials}};
    if (c.witness) j["witness"] = witness_json(*c.witness);
    checks.push_back(std::move(j));
  }
  return {{"measure", r.measure}, {"trials", r.trials}, {"seed", r.seed},
          {"ok", r.ok()},         {"checks", checks}};
}

Json bounds_report_json(const BoundsReport& r) {
  Json violations = Json::array();
  for (const auto& v : r.violations) {
    Json j{{"state", v.state}, {"condition", v.condition}, {"lhs", v.lhs}, {"rhs", v.rhs}};
    if (v.action) j["action"] = *v.action;
    if (v.disturbance) j["disturbance"] = *v.disturbance;
    violations.push_back(std::move(j));
  }
  Json j{{"mode", to_string(r.mode)}, {"alpha", r.alpha},
         {"modulus", r.modulus},      {"ok", r.ok},
         {"terminal_within", r.terminal_within}, {"violations", violations},
         {"weight", r.weight}};
  if (r.global_lb) j["global_lb"] = *r.global_lb;
  if (r.global_ub) j["global_ub"] = *r.global_ub;
  return j;
}

// ---- Tasks ----------------------------------------------------------------

Outcome solve_finite_task(Context& ctx, const ModelFile& f, const Json& p) {
  const auto& m = require_model(f);
  if (f.risk.empty()) throw ParseError({"risk: missing"});
  const std::size_t horizon = required_horizon(p);
  auto result = solve_finite(m, f.risk, horizon);
  write_values(ctx, m, result.values);
  write_policy(ctx, m, result.policy);
  Outcome o;
  o.report = {{"task", "solve-finite"}, {"horizon", horizon}, {"risk", risk_names(f.risk)}};
  o.finite = std::move(result);
  return o;
}

Outcome solve_infinite_task(Context& ctx, const ModelFile& f, const Json& p) {
  const auto& m = require_model(f);
  const auto& rm = single_risk(f);
  Outcome o;
  o.report = {{"task", "solve-infinite"}, {"risk", rm.describe()}};
  const auto spec = bounds_or_default(f, rm, o.report);
  InfiniteOptions opts;
  opts.tol = param_number(p, "tol", opts.tol);
  opts.max_iter = param_count(p, "max_iter");
  auto r = solve_infinite(m, rm, spec, opts);
  write_values(ctx, m, {r.value});
  write_policy(ctx, m, r.policy);
  std::vector<std::vector<std::string>> rows;
  for (const auto& t : r.trace) {
    rows.push_back({integer(t.iteration), format_number(t.residual), format_number(t.error_bound)});
  }
  ctx.writer.table("trace", {"iteration", "residual", "error_bound"}, rows);
  o.report["tol"] = opts.tol;
  o.report["iterations"] = r.iterations;
  o.report["residual"] = r.residual;
  o.report["error_bound"] = r.error_bound;
  o.report["modulus"] = r.modulus;
  o.report["converged"] = r.converged;
  o.report["bounds"] = bounds_to_json(spec);
  if (!r.converged) {
    ctx.err << "error: value iteration stopped after " << r.iterations
            << " iterations with error bound " << format_number(r.error_bound) << " above tol "
            << format_number(opts.tol) << "\n";
    o.code = kExitNotConverged;
  }
  o.infinite = std::move(r);
  return o;
}

Outcome verify_axioms_task(Context&, const ModelFile& f, const Json& p, std::uint64_t seed) {
  if (f.risk.empty()) throw ParseError({"risk: missing"});
  const std::size_t trials = param_count(p, "trials").value_or(500);
  Outcome o;
  Json reports = Json::array();
  bool ok = true;
  for (const auto& rm : f.risk) {
    const auto r = check_axioms(rm, trials, seed);
    ok = ok && r.ok();
    reports.push_back(axiom_report_json(r));
  }
  o.report = {{"task", "verify-axioms"}, {"ok", ok}, {"reports", reports}};
  if (!ok) o.code = kExitCheckFailed;
  return o;
}

Outcome verify_bounds_task(Context&, const ModelFile& f) {
  const auto& m = require_model(f);
  const auto& rm = single_risk(f);
  Outcome o;
  o.report = {{"task", "verify-bounds"}, {"risk", rm.describe()}};
  const auto spec = bounds_or_default(f, rm, o.report);
  const auto r = verify_bounds(m, rm, spec);
  o.report["report"] = bounds_report_json(r);
  o.report["ok"] = r.ok;
  if (!r.ok) o.code = kExitCheckFailed;
  return o;
}

Outcome check_contraction_task(Context&, const ModelFile& f, const Json& p, std::uint64_t seed) {
  const auto& m = require_model(f);
  const auto& rm = single_risk(f);
  Outcome o;
  o.report = {{"task", "check-contraction"}, {"risk", rm.describe()}};
  const auto spec = bounds_or_default(f, rm, o.report);
  const std::size_t trials = param_count(p, "trials").value_or(200);
  const auto r = check_contraction(m, rm, spec, trials, seed);
  o.report["seed"] = seed;
  o.report["max_ratio"] = r.max_ratio;
  o.report["modulus"] = r.modulus;
  o.report["pairs"] = r.pairs;
  o.report["skipped"] = r.skipped;
  o.report["ok"] = r.within();
  if (!r.within()) o.code = kExitCheckFailed;
  return o;
}

Outcome robust_check_task(Context& ctx, const ModelFile& f, const Json& p) {
  const auto& m = require_model(f);
  const auto& rm = single_risk(f);
  Outcome o;
  std::vector<std::vector<std::string>> rows;
  const auto horizon = param_count(p, "horizon");
  if (horizon) {
    const double tol = param_number(p, "tol", 1e-10);
    const auto r = verify_equivalence(m, rm, *horizon, tol, param_bool(p, "enumerate", true));
    o.report = {{"task", "robust-check"}, {"risk", rm.describe()}, {"horizon", r.horizon},
                {"tol", r.tol},           {"dp_gap", r.dp_gap},     {"enumerated", r.enumerated},
                {"policies", r.policies}, {"ok", r.ok}};
    if (r.enumeration_gap) o.report["enumeration_gap"] = *r.enumeration_gap;
    if (r.interchange_ok) o.report["interchange_ok"] = *r.interchange_ok;
    rows = {{"horizon", integer(r.horizon)},
            {"tol", format_number(r.tol)},
            {"dp_gap", format_number(r.dp_gap)},
            {"enumerated", r.enumerated ? "1" : "0"},
            {"policies", integer(r.policies)},
            {"enumeration_gap", r.enumeration_gap ? format_number(*r.enumeration_gap) : ""},
            {"interchange_ok", r.interchange_ok ? (*r.interchange_ok ? "1" : "0") : ""},
            {"ok", r.ok ? "1" : "0"}};
    if (!r.ok) o.code = kExitCheckFailed;
  } else {
    o.report = {{"task", "robust-check"}, {"risk", rm.describe()}, {"horizon", "infinite"}};
    const auto spec = bounds_or_default(f, rm, o.report);
    const double tol = param_number(p, "tol", 1e-8);
    const auto r = verify_equivalence_infinite(m, rm, spec, tol);
    o.report["tol"] = tol;
    o.report["gap"] = r.gap;
    o.report["allowed"] = r.allowed;
    o.report["ok"] = r.ok;
    rows = {{"tol", format_number(tol)},
            {"gap", format_number(r.gap)},
            {"allowed", format_number(r.allowed)},
            {"ok", r.ok ? "1" : "0"}};
    if (!r.ok) o.code = kExitCheckFailed;
  }
  if (ctx.opts.format == "csv") {
    std::vector<std::vector<std::string>> csv;
    for (auto& row : rows) csv.push_back(std::move(row));
    ctx.writer.table("equivalence", {"field", "value"}, csv);
  }
  return o;
}

Outcome dispatch(Context& ctx, const std::string& kind, const ModelFile& f, const Json& p);

// ---- Examples -------------------------------------------------------------

void analyse_example(const std::string& name, const Json& params, const ModelFile& f,
                     Outcome& o) {
  Json a = Json::object();
  if (name == "casino" && o.finite) {
    const auto cp = casino_params_from_json(params);
    const auto& rm = f.risk.front();
    const std::size_t horizon = o.finite->policy.stages.size();
    double worst = 0.0;
    for (StateIndex x = 0; x <= cp.max_capital; ++x) {
      const double want = casino_closed_form(cp.p, rm, horizon, static_cast<double>(x));
      worst = std::max(worst, std::abs(o.finite->values[0][x] - want));
    }
    a = {{"rho_minus_z", casino_rho_minus_z(cp.p, rm)}, {"closed_form_max_error", worst}};
  } else if (name == "house-selling" && o.finite) {
    const auto hp = house_selling_params_from_json(params);
    const auto t = house_selling_thresholds(hp, f.risk, *o.finite);
    Json stages = Json::array();
    for (std::size_t n = 0; n < t.size(); ++n) {
      const auto& stage = o.finite->policy.stages[n];
      const std::vector<ActionIndex> rule(stage.begin(), stage.end() - 1);
      const auto th = extract_threshold(rule, hp.offers);
      Json s{{"stage", n}, {"continuation_value", t[n]}, {"is_threshold", th.is_threshold}};
      if (th.is_threshold && std::isfinite(th.threshold)) s["largest_stopping_offer"] = th.threshold;
      if (th.witness) s["witness"] = *th.witness;
      stages.push_back(std::move(s));
    }
    a = {{"thresholds", stages}};
  } else if (name == "cash-balance" && o.infinite) {
    const auto tt = extract_two_thresholds(*f.model, o.infinite->policy.rule(0));
    a = {{"is_two_threshold", tt.is_two_threshold},
         {"boundary_active", tt.boundary_active},
         {"convex", !convexity_witness(o.infinite->value.values, 1e-9).has_value()}};
    if (tt.is_two_threshold) {
      a["s_minus"] = tt.s_minus;
      a["s_plus"] = tt.s_plus;
    }
    if (tt.witness) a["witness"] = *tt.witness;
  } else if (name == "var-myopic" && o.finite) {
    const auto* var = std::get_if<RiskMeasure::ValueAtRisk>(&f.risk.front().kind());
    if (var && f.risk.size() == 1) {
      const auto r = verify_myopia(*f.model, var->level, o.finite->policy.stages.size());
      a = {{"myopia_holds", r.holds},
           {"myopic_rule", r.myopic_rule},
           {"mismatches", r.mismatches.size()},
           {"solver_stationary", r.solver_stationary}};
    }
  }
  if (!a.empty()) o.report["example"] = {{"name", name}, {"analysis", a}};
}

Outcome example_task(Context& ctx, const ModelFile& f, const Json& p) {
  const auto name_it = p.find("name");
  if (name_it == p.end() || !name_it->is_string()) throw ParseError({"task.name: missing"});
  const std::string name = name_it->get<std::string>();
  const auto params_it = p.find("params");
  const Json params = params_it == p.end() ? Json::object() : *params_it;

  ModelFile built;
  built.model = build_example(name, params);
  built.risk = f.risk.empty() ? std::vector<RiskMeasure>{RiskMeasure::expectation()} : f.risk;
  const auto then_it = p.find("then");
  if (then_it != p.end()) built.task = *then_it;
  ctx.writer.json("model.json", to_json(built));

  if (then_it == p.end()) {
    return {kExitOk, {{"task", "example"}, {"name", name}}, std::nullopt, std::nullopt};
  }
  if (!then_it->is_object() || !then_it->contains("kind") || !(*then_it)["kind"].is_string()) {
    throw ParseError({"task.then.kind: missing"});
  }
  const std::string kind = (*then_it)["kind"].get<std::string>();
  if (kind == "example") throw ParseError({"task.then.kind: examples do not nest"});
  Outcome o = dispatch(ctx, kind, built, *then_it);
  analyse_example(name, params, built, o);
  return o;
}

Outcome dispatch(Context& ctx, const std::string& kind, const ModelFile& f, const Json& p) {
  if (f.model && kind != "example") {
    const auto diags = validate_model(*f.model);
    if (!diags.empty()) {
      for (const auto& d : diags) ctx.err << "error: " << to_string(d) << "\n";
      Outcome o;
      o.code = kExitInvalidInput;
      return o;
    }
  }
  if (kind == "solve-finite") return solve_finite_task(ctx, f, p);
  if (kind == "solve-infinite") return solve_infinite_task(ctx, f, p);
  if (kind == "verify-axioms") return verify_axioms_task(ctx, f, p, seed_for(ctx, p));
  if (kind == "verify-bounds") return verify_bounds_task(ctx, f);
  if (kind == "check-contraction") return check_contraction_task(ctx, f, p, seed_for(ctx, p));
  if (kind == "robust-check") return robust_check_task(ctx, f, p);
  if (kind == "example") return example_task(ctx, f, p);
  throw ParseError({"task.kind: unknown task '" + kind + "'"});
}

const std::vector<std::pair<std::string, std::string>>& subcommands() {
  static const std::vector<std::pair<std::string, std::string>> list{
      {"solve-finite", "Backward induction over task.horizon stages"},
      {"solve-infinite", "Value iteration to the fixed point"},
      {"verify-axioms", "Randomized axiom probes for each risk measure"},
      {"verify-bounds", "Check the bounding conditions"},
      {"check-contraction", "Sample the Lipschitz ratio of the Bellman operator"},
      {"robust-check", "Compare recursive, minimax and enumerated values"},
      {"example", "Build an example model, write model.json and run task.then"},
  };
  return list;
}

int execute(const Options& opts, std::ostream& out, std::ostream& err) {
  Writer writer(opts);
  Context ctx{opts, writer, out, err};
  try {
    std::ifstream in(opts.file, std::ios::binary);
    if (!in) {
      err << "error: cannot open " << opts.file << "\n";
      return kExitInvalidInput;
    }
    Json doc;
    try {
      doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
      err << "error: " << opts.file << ": " << e.what() << "\n";
      return kExitInvalidInput;
    }
    const ModelFile file = parse_model_file(doc);
    if (opts.command == "example") {
      const auto kind = file.task.find("kind");
      if (kind == file.task.end() || *kind != "example") {
        throw ParseError({"task.kind: the example subcommand needs an example task"});
      }
    }
    Outcome o = dispatch(ctx, opts.command, file, params_for(file.task, opts.command));
    if (o.code == kExitInvalidInput) return o.code;
    writer.json("report.json", o.report);
    if (!opts.quiet) {
      out << opts.command << ": " << (o.code == kExitOk ? "ok" : "check failed") << "\n";
      for (const auto& path : writer.written()) out << "  wrote " << path << "\n";
    }
    return o.code;
  } catch (const ParseError& e) {
    for (const auto& msg : e.messages()) err << "error: " << msg << "\n";
    return kExitInvalidInput;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const OutputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Risk-sensitive MDP solver and verifier", "riskmdp"};
  app.require_subcommand(1);
  Options opts;
  std::uint64_t seed = 0;
  for (const auto& [name, help] : subcommands()) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("file", opts.file, "Model file (JSON)")->required();
    sub->add_option("--out", opts.out_dir, "Output directory");
    sub->add_option("--format", opts.format, "Table format")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", seed, "Seed for randomized checks; overrides task.seed");
    sub->add_flag("--quiet", opts.quiet, "Suppress the summary on stdout");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitInvalidInput;
  }
  const auto* chosen = app.get_subcommands().front();
  opts.command = chosen->get_name();
  if (chosen->count("--seed") > 0) opts.seed = seed;
  return execute(opts, out, err);
}

}  // namespace riskmdp::cli
