#include "model_file.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace riskmdp::cli {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ParseError({path + ": " + msg});
}

std::string at(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

const Json& field(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing");
  return *it;
}

const Json* optional_field(const Json& j, const char* key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

double number_or(const Json& j, const char* key, double fallback, const std::string& path) {
  const Json* f = optional_field(j, key);
  return f ? number(*f, path + "." + key) : fallback;
}

std::size_t count(const Json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    fail(path, "expected a nonnegative integer");
  }
  return j.get<std::size_t>();
}

const Json& array(const Json& j, const std::string& path, std::optional<std::size_t> size = {}) {
  if (!j.is_array()) fail(path, "expected an array");
  if (size && j.size() != *size) {
    fail(path, "expected " + std::to_string(*size) + " entries, found " + std::to_string(j.size()));
  }
  return j;
}

std::vector<double> numbers(const Json& j, const std::string& path,
                            std::optional<std::size_t> size = {}) {
  array(j, path, size);
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], at(path, i)));
  return out;
}

template <class F>
void for_each_cell(const Json& table, const std::string& path, std::size_t nx, std::size_t na,
                   std::size_t nz, F&& f) {
  array(table, path, nx);
  for (std::size_t x = 0; x < nx; ++x) {
    const auto px = at(path, x);
    array(table[x], px, na);
    for (std::size_t a = 0; a < na; ++a) {
      const auto pa = at(px, a);
      array(table[x][a], pa, nz);
      for (std::size_t z = 0; z < nz; ++z) f(x, a, z, table[x][a][z], at(pa, z));
    }
  }
}

std::vector<double> cost_table(const MdpModel& m, const Json& table, const std::string& path) {
  std::vector<double> out(m.n_states() * m.n_actions() * m.n_disturbances());
  for_each_cell(table, path, m.n_states(), m.n_actions(), m.n_disturbances(),
                [&](std::size_t x, std::size_t a, std::size_t z, const Json& v,
                    const std::string& p) { out[m.flat(x, a, z)] = number(v, p); });
  return out;
}

Json table_json(const MdpModel& m, const std::vector<double>& flat) {
  Json t = Json::array();
  for (StateIndex x = 0; x < m.n_states(); ++x) {
    Json row = Json::array();
    for (ActionIndex a = 0; a < m.n_actions(); ++a) {
      Json cell = Json::array();
      for (DisturbanceIndex z = 0; z < m.n_disturbances(); ++z) cell.push_back(flat[m.flat(x, a, z)]);
      row.push_back(std::move(cell));
    }
    t.push_back(std::move(row));
  }
  return t;
}

std::string kind_of(const Json& j, const std::string& path) {
  const Json& k = field(j, "kind", path);
  if (!k.is_string()) fail(path + ".kind", "expected a string");
  return k.get<std::string>();
}

DistortionFunction distortion_from_json(const Json& j, const std::string& path) {
  const auto kind = kind_of(j, path);
  if (kind == "identity") return DistortionFunction::identity();
  if (kind == "var") return DistortionFunction::var_indicator(number(field(j, "level", path), path + ".level"));
  if (kind == "es") return DistortionFunction::es_cap(number(field(j, "level", path), path + ".level"));
  if (kind == "piecewise-linear") {
    const auto& knots = array(field(j, "knots", path), path + ".knots");
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < knots.size(); ++i) {
      const auto v = numbers(knots[i], at(path + ".knots", i), 2);
      pts.emplace_back(v[0], v[1]);
    }
    return DistortionFunction::piecewise_linear(std::move(pts));
  }
  fail(path + ".kind", "unknown distortion '" + kind + "'");
}

Json distortion_to_json(const DistortionFunction& g) {
  struct Visitor {
    Json operator()(const DistortionFunction::Identity&) const { return {{"kind", "identity"}}; }
    Json operator()(const DistortionFunction::VarIndicator& v) const {
      return {{"kind", "var"}, {"level", v.level}};
    }
    Json operator()(const DistortionFunction::EsCap& e) const {
      return {{"kind", "es"}, {"level", e.level}};
    }
    Json operator()(const DistortionFunction::PiecewiseLinear& p) const {
      Json knots = Json::array();
      for (const auto& [u, v] : p.knots) knots.push_back({u, v});
      return {{"kind", "piecewise-linear"}, {"knots", knots}};
    }
  };
  return std::visit(Visitor{}, g.representation());
}

RiskMeasure risk_at(const Json& j, const std::string& path) {
  const auto kind = kind_of(j, path);
  auto level = [&] { return number(field(j, "level", path), path + ".level"); };
  if (kind == "expectation") return RiskMeasure::expectation();
  if (kind == "value_at_risk" || kind == "var") return RiskMeasure::value_at_risk(level());
  if (kind == "expected_shortfall" || kind == "es") return RiskMeasure::expected_shortfall(level());
  if (kind == "entropic") return RiskMeasure::entropic(number(field(j, "gamma", path), path + ".gamma"));
  if (kind == "distortion") {
    return RiskMeasure::distortion(distortion_from_json(field(j, "g", path), path + ".g"));
  }
  if (kind == "spectral") {
    const auto& steps = array(field(j, "steps", path), path + ".steps");
    std::vector<StepSpectrum::Step> out;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const auto v = numbers(steps[i], at(path + ".steps", i), 2);
      out.push_back({v[0], v[1]});
    }
    const Json* norm = optional_field(j, "normalize");
    const bool normalize = norm && norm->is_boolean() && norm->get<bool>();
    return RiskMeasure::spectral(normalize ? StepSpectrum::normalized(std::move(out))
                                           : StepSpectrum(std::move(out)));
  }
  if (kind == "mixture") {
    return RiskMeasure::mixture(number(field(j, "weight", path), path + ".weight"),
                                risk_at(field(j, "first", path), path + ".first"),
                                risk_at(field(j, "second", path), path + ".second"));
  }
  fail(path + ".kind", "unknown risk measure '" + kind + "'");
}

}  // namespace

ParseError::ParseError(std::vector<std::string> messages)
    : std::runtime_error(messages.empty() ? "parse error" : messages.front()),
      messages_(std::move(messages)) {}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

MdpModel model_from_json(const Json& j) {
  const std::string root = "model";
  const Json& states = field(j, "states", root);
  const std::size_t nx = count(field(states, "count", root + ".states"), root + ".states.count");
  const std::size_t na = count(field(j, "actions", root), root + ".actions");
  const Json& dist = field(j, "disturbances", root);
  auto probs = numbers(field(dist, "probs", root + ".disturbances"), root + ".disturbances.probs");
  const std::size_t nz = probs.size();

  MdpModel m(nx, na, std::move(probs));
  if (const Json* labels = optional_field(dist, "labels")) {
    m.set_disturbance_labels(numbers(*labels, root + ".disturbances.labels", nz));
  }
  if (const Json* labels = optional_field(states, "labels")) {
    m.set_state_labels(numbers(*labels, root + ".states.labels", nx));
  }

  const auto& adm = array(field(j, "admissible", root), root + ".admissible", nx);
  for (StateIndex x = 0; x < nx; ++x) {
    const auto px = at(root + ".admissible", x);
    array(adm[x], px);
    std::vector<ActionIndex> d;
    for (std::size_t i = 0; i < adm[x].size(); ++i) d.push_back(count(adm[x][i], at(px, i)));
    m.set_admissible(x, std::move(d));
  }

  for_each_cell(field(j, "transition", root), root + ".transition", nx, na, nz,
                [&](std::size_t x, std::size_t a, std::size_t z, const Json& v,
                    const std::string& p) {
                  if (!v.is_number_integer()) fail(p, "expected an integer state index");
                  const long long t = v.get<long long>();
                  m.set_transition(x, a, z, t < 0 ? kInvalidState : static_cast<StateIndex>(t));
                });
  const auto cost = cost_table(m, field(j, "cost", root), root + ".cost");
  for (StateIndex x = 0; x < nx; ++x) {
    for (ActionIndex a = 0; a < na; ++a) {
      for (DisturbanceIndex z = 0; z < nz; ++z) m.set_cost(x, a, z, cost[m.flat(x, a, z)]);
    }
  }
  if (const Json* stages = optional_field(j, "stage_costs")) {
    array(*stages, root + ".stage_costs");
    std::vector<std::vector<double>> tables;
    for (std::size_t n = 0; n < stages->size(); ++n) {
      tables.push_back(cost_table(m, (*stages)[n], at(root + ".stage_costs", n)));
    }
    m.set_stage_costs(std::move(tables));
  }
  if (const Json* terminal = optional_field(j, "terminal_cost")) {
    m.set_terminal_cost(numbers(*terminal, root + ".terminal_cost", nx));
  }
  m.set_discount(number_or(j, "discount", 1.0, root));
  return m;
}

Json model_to_json(const MdpModel& m) {
  Json states{{"count", m.n_states()}};
  if (m.has_state_labels()) states["labels"] = m.state_labels();
  Json dist{{"probs", m.disturbance_probs()}};
  if (!m.disturbance_labels().empty()) dist["labels"] = m.disturbance_labels();
  Json adm = Json::array();
  for (StateIndex x = 0; x < m.n_states(); ++x) adm.push_back(m.admissible(x));

  Json transition = Json::array();
  for (StateIndex x = 0; x < m.n_states(); ++x) {
    Json row = Json::array();
    for (ActionIndex a = 0; a < m.n_actions(); ++a) {
      Json cell = Json::array();
      for (DisturbanceIndex z = 0; z < m.n_disturbances(); ++z) {
        const StateIndex t = m.transition(x, a, z);
        cell.push_back(t == kInvalidState ? Json(-1) : Json(t));
      }
      row.push_back(std::move(cell));
    }
    transition.push_back(std::move(row));
  }

  Json j{{"states", states},
         {"actions", m.n_actions()},
         {"disturbances", dist},
         {"admissible", adm},
         {"transition", transition},
         {"cost", table_json(m, m.cost_table())}};
  if (!m.stage_costs().empty()) {
    Json stages = Json::array();
    for (const auto& t : m.stage_costs()) stages.push_back(table_json(m, t));
    j["stage_costs"] = stages;
  }
  j["terminal_cost"] = m.terminal_cost();
  j["discount"] = m.discount();
  return j;
}

RiskMeasure risk_from_json(const Json& j) { return risk_at(j, "risk"); }

Json risk_to_json(const RiskMeasure& rm) {
  struct Visitor {
    Json operator()(const RiskMeasure::Expectation&) const { return {{"kind", "expectation"}}; }
    Json operator()(const RiskMeasure::ValueAtRisk& v) const {
      return {{"kind", "value_at_risk"}, {"level", v.level}};
    }
    Json operator()(const RiskMeasure::ExpectedShortfall& e) const {
      return {{"kind", "expected_shortfall"}, {"level", e.level}};
    }
    Json operator()(const RiskMeasure::Distortion& d) const {
      return {{"kind", "distortion"}, {"g", distortion_to_json(d.g)}};
    }
    Json operator()(const RiskMeasure::Spectral& s) const {
      Json steps = Json::array();
      for (const auto& st : s.phi.steps()) steps.push_back({st.from, st.value});
      return {{"kind", "spectral"}, {"steps", steps}};
    }
    Json operator()(const RiskMeasure::Entropic& e) const {
      return {{"kind", "entropic"}, {"gamma", e.gamma}};
    }
    Json operator()(const RiskMeasure::Mixture& m) const {
      return {{"kind", "mixture"},
              {"weight", m.weight},
              {"first", risk_to_json(*m.first)},
              {"second", risk_to_json(*m.second)}};
    }
  };
  return std::visit(Visitor{}, rm.kind());
}

BoundingSpec bounds_from_json(const Json& j, std::size_t n_states) {
  const std::string root = "bounds";
  if (!j.is_object()) fail(root, "expected an object");
  BoundingMode mode = BoundingMode::Coherent;
  if (const Json* name = optional_field(j, "mode")) {
    if (!name->is_string()) fail(root + ".mode", "expected a string");
    mode = bounding_mode_from_string(name->get<std::string>());
  }
  const double alpha = number_or(j, "alpha", 1.0, root);
  BoundingSpec spec;
  if (const Json* k = optional_field(j, "constant")) {
    spec = BoundingSpec::constant(n_states, number(*k, root + ".constant"), alpha, mode);
  } else {
    spec.lb = numbers(field(j, "lb", root), root + ".lb", n_states);
    spec.ub = numbers(field(j, "ub", root), root + ".ub", n_states);
    spec.alpha = alpha;
    spec.mode = mode;
  }
  spec.eps_lower = number_or(j, "eps_lower", spec.eps_lower, root);
  spec.eps_upper = number_or(j, "eps_upper", spec.eps_upper, root);
  return spec;
}

Json bounds_to_json(const BoundingSpec& spec) {
  return {{"mode", to_string(spec.mode)},
          {"alpha", spec.alpha},
          {"lb", spec.lb},
          {"ub", spec.ub},
          {"eps_lower", spec.eps_lower},
          {"eps_upper", spec.eps_upper}};
}

ModelFile parse_model_file(const Json& doc) {
  if (!doc.is_object()) fail("$", "expected an object");
  ModelFile f;
  if (const Json* m = optional_field(doc, "model")) f.model = model_from_json(*m);
  if (const Json* r = optional_field(doc, "risk")) {
    if (r->is_array()) {
      for (std::size_t i = 0; i < r->size(); ++i) f.risk.push_back(risk_at((*r)[i], at("risk", i)));
    } else {
      f.risk.push_back(risk_from_json(*r));
    }
  }
  if (const Json* b = optional_field(doc, "bounds")) {
    if (!f.model) fail("bounds", "needs a model section");
    f.bounds = bounds_from_json(*b, f.model->n_states());
  }
  if (const Json* t = optional_field(doc, "task")) {
    if (!t->is_object()) fail("task", "expected an object");
    f.task = *t;
  }
  return f;
}

Json to_json(const ModelFile& file) {
  Json doc = Json::object();
  if (file.model) doc["model"] = model_to_json(*file.model);
  if (file.risk.size() == 1) {
    doc["risk"] = risk_to_json(file.risk.front());
  } else if (!file.risk.empty()) {
    Json list = Json::array();
    for (const auto& rm : file.risk) list.push_back(risk_to_json(rm));
    doc["risk"] = list;
  }
  if (file.bounds) doc["bounds"] = bounds_to_json(*file.bounds);
  if (!file.task.empty()) doc["task"] = file.task;
  return doc;
}

namespace {

std::vector<int> integers(const Json& j, const std::string& path) {
  array(j, path);
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_integer()) fail(at(path, i), "expected an integer");
    out.push_back(j[i].get<int>());
  }
  return out;
}

std::size_t count_or(const Json& j, const char* key, std::size_t fallback, const std::string& path) {
  const Json* f = optional_field(j, key);
  return f ? count(*f, path + "." + key) : fallback;
}

}  // namespace

CasinoParams casino_params_from_json(const Json& j) {
  const std::string root = "params";
  if (!j.is_object()) fail(root, "expected an object");
  CasinoParams p;
  p.p = number(field(j, "p", root), root + ".p");
  p.horizon = count(field(j, "horizon", root), root + ".horizon");
  p.max_capital = count_or(j, "max_capital", p.max_capital, root);
  return p;
}

HouseSellingParams house_selling_params_from_json(const Json& j) {
  const std::string root = "params";
  if (!j.is_object()) fail(root, "expected an object");
  HouseSellingParams p;
  p.offers = numbers(field(j, "offers", root), root + ".offers");
  p.offer_probs = numbers(field(j, "offer_probs", root), root + ".offer_probs");
  p.rent = number(field(j, "rent", root), root + ".rent");
  p.discount = number_or(j, "discount", p.discount, root);
  p.horizon = count(field(j, "horizon", root), root + ".horizon");
  return p;
}

CashBalanceParams cash_balance_params_from_json(const Json& j) {
  const std::string root = "params";
  if (!j.is_object()) fail(root, "expected an object");
  CashBalanceParams p;
  const Json* radius = optional_field(j, "radius");
  if (radius && !radius->is_number_integer()) fail(root + ".radius", "expected an integer");
  if (radius) p.radius = radius->get<int>();
  if (const Json* h = optional_field(j, "holding")) {
    p.holding = numbers(*h, root + ".holding");
  } else {
    p.holding = CashBalanceParams::quadratic(p.radius, number_or(j, "holding_scale", 1.0, root));
  }
  p.cost_up = number_or(j, "cost_up", p.cost_up, root);
  p.cost_down = number_or(j, "cost_down", p.cost_down, root);
  p.shocks = integers(field(j, "shocks", root), root + ".shocks");
  p.shock_probs = numbers(field(j, "shock_probs", root), root + ".shock_probs");
  p.discount = number_or(j, "discount", p.discount, root);
  return p;
}

VarMyopicParams var_myopic_params_from_json(const Json& j) {
  const std::string root = "params";
  if (!j.is_object()) fail(root, "expected an object");
  VarMyopicParams p;
  p.labels = numbers(field(j, "labels", root), root + ".labels");
  p.action_shifts = integers(field(j, "action_shifts", root), root + ".action_shifts");
  p.shocks = integers(field(j, "shocks", root), root + ".shocks");
  p.shock_probs = numbers(field(j, "shock_probs", root), root + ".shock_probs");
  p.cost_now = number_or(j, "cost_now", p.cost_now, root);
  p.cost_next = number_or(j, "cost_next", p.cost_next, root);
  p.cost_next_sq = number_or(j, "cost_next_sq", p.cost_next_sq, root);
  p.discount = number_or(j, "discount", p.discount, root);
  return p;
}

MdpModel build_example(const std::string& name, const Json& params) {
  if (name == "casino") return build_casino(casino_params_from_json(params));
  if (name == "house-selling") return build_house_selling(house_selling_params_from_json(params));
  if (name == "cash-balance") return build_cash_balance(cash_balance_params_from_json(params));
  if (name == "var-myopic") return build_var_myopic(var_myopic_params_from_json(params));
  fail("task.name", "unknown example '" + name + "'");
}

}  // namespace riskmdp::cli
