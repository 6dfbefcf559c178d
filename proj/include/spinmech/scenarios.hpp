#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "spinmech/config.hpp"
#include "spinmech/dynamics.hpp"

namespace spinmech {

/// Named-column numeric table; one CSV file per table.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  std::vector<double> column(const std::string& column_name) const;
};

struct ScenarioResult {
  std::vector<Table> tables;
  nlohmann::json summary = nlohmann::json::object();
};

struct RunContext {
  IntegratorOptions integrator;
  std::uint64_t seed = 0;
};

struct Scenario {
  std::string id;
  std::string description;
  std::vector<ParamSpec> params;
  std::function<ScenarioResult(const ParamSet&, const RunContext&)> run;
};

/// Integrator, disorder and output keys shared by every scenario.
const std::vector<ParamSpec>& common_params();
const std::vector<Scenario>& scenario_registry();
/// Throws ConfigError for unknown ids.
const Scenario& find_scenario(const std::string& id);

/// Two-spin GHZ generation in the interaction picture: fidelity and concurrence at the
/// phonon-decoupling times 2 pi n / Delta_m for each r, with and without dissipation.
ScenarioResult ghz_scenario(const ParamSet& params, const RunContext& context);

/// Builds IntegratorOptions from the resolved integrator keys.
IntegratorOptions integrator_from_params(const ParamSet& params);

}  // namespace spinmech
