#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spinmech/config.hpp"
#include "spinmech/models.hpp"
#include "spinmech/scenarios.hpp"

namespace spinmech {

/// Per-spin detuning offsets and coupling factors applied on top of homogeneous parameters.
struct DisorderSpec {
  std::vector<double> delta_dg_offsets;
  std::vector<double> lambda_factors;
  double bound = 0.05;

  /// Uniform draws in [-bound, bound] (offsets, lambda units) and [1 - bound, 1 + bound].
  static DisorderSpec sample(int n_spins, std::uint64_t seed, double bound = 0.05);
  /// Throws ConfigError if sizes differ from n_spins or any entry exceeds the bound.
  void validate(int n_spins) const;
  void apply(ModelParams& params) const;
};

struct ScenarioConfig {
  std::string scenario_id;
  std::map<std::string, std::string> overrides;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
  std::optional<double> fixed_step;  ///< switches to the fixed-step integrator
};

/// Folds an INI document into `config`: [output] dir sets output_dir, [disorder] seed sets
/// the seed, every other key becomes an override checked against its section.
void apply_config_sections(ScenarioConfig& config, const IniSections& sections);

/// Scenario defaults, then overrides. Unknown keys raise ConfigError.
ParamSet resolve_parameters(const ScenarioConfig& config);

/// Runs without writing files.
ScenarioResult execute_scenario(const ScenarioConfig& config);

struct RunOutput {
  std::filesystem::path directory;
  std::vector<std::filesystem::path> csv_files;
  std::filesystem::path manifest;
  ScenarioResult result;
};

/// Runs and writes <output_dir>/<scenario>/<table>.csv plus manifest.json.
RunOutput run_scenario(const ScenarioConfig& config);

struct SweepOutput {
  std::filesystem::path aggregated_csv;
  std::filesystem::path manifest;
  std::vector<RunOutput> members;
};

/// One run per value of `axis` (executed concurrently), merged into sweep_<axis>.csv.
SweepOutput sweep(const ScenarioConfig& base, const std::string& axis,
                  const std::vector<std::string>& values, unsigned max_parallel = 0);

/// Rebuilds the configuration recorded in a run manifest.
ScenarioConfig config_from_manifest(const std::filesystem::path& manifest);

void write_csv(const Table& table, const std::filesystem::path& path);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace spinmech
