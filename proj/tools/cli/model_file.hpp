#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "riskmdp/riskmdp.hpp"

namespace riskmdp::cli {

using Json = nlohmann::json;

/// Malformed input document. Each entry names the offending JSON path.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(std::vector<std::string> messages);
  const std::vector<std::string>& messages() const noexcept { return messages_; }

 private:
  std::vector<std::string> messages_;
};

/// In-memory form of a model file. Every section is optional at parse time;
/// each subcommand asks for the sections it needs.
struct ModelFile {
  std::optional<MdpModel> model;
  std::vector<RiskMeasure> risk;
  std::optional<BoundingSpec> bounds;
  Json task = Json::object();
};

ModelFile parse_model_file(const Json& doc);
Json to_json(const ModelFile& file);

/// Transition entries that are negative or not representable become
/// kInvalidState so model validation reports them with their (x, a, z).
MdpModel model_from_json(const Json& j);
Json model_to_json(const MdpModel& m);

RiskMeasure risk_from_json(const Json& j);
Json risk_to_json(const RiskMeasure& rm);

/// Either explicit `lb`/`ub` arrays or a `constant` k; see BoundingSpec::constant.
BoundingSpec bounds_from_json(const Json& j, std::size_t n_states);
Json bounds_to_json(const BoundingSpec& spec);

CasinoParams casino_params_from_json(const Json& j);
HouseSellingParams house_selling_params_from_json(const Json& j);
/// `holding` lists L on the grid; `holding_scale` s gives L(x) = s x^2 instead.
CashBalanceParams cash_balance_params_from_json(const Json& j);
VarMyopicParams var_myopic_params_from_json(const Json& j);

/// Names: casino, house-selling, cash-balance, var-myopic.
MdpModel build_example(const std::string& name, const Json& params);

/// `%.17g`, so every double round-trips.
std::string format_number(double v);

}  // namespace riskmdp::cli
