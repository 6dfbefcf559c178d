// sim: command-line front end for the scenario registry.
#include <spdlog/spdlog.h>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spinmech/errors.hpp"
#include "spinmech/harness.hpp"

namespace {

using namespace spinmech;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitInstability = 4;

struct RunArgs {
  std::string scenario;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> fixed_step;
  std::string config_file;
  std::string manifest;
};

ScenarioConfig build_config(const RunArgs& args) {
  ScenarioConfig cfg;
  if (!args.manifest.empty()) {
    cfg = config_from_manifest(args.manifest);
    if (!args.scenario.empty() && args.scenario != cfg.scenario_id) {
      throw ConfigError("--scenario disagrees with the manifest");
    }
  } else {
    if (args.scenario.empty()) throw ConfigError("--scenario is required");
    cfg.scenario_id = args.scenario;
    find_scenario(cfg.scenario_id);
  }
  if (!args.config_file.empty()) apply_config_sections(cfg, read_config_file(args.config_file));
  for (const auto& s : args.sets) {
    auto [key, value] = parse_assignment(s);
    cfg.overrides[key] = value;
  }
  if (args.seed) cfg.seed = *args.seed;
  if (args.out) cfg.output_dir = *args.out;
  if (args.fixed_step) {
    if (!(*args.fixed_step > 0.0)) throw ConfigError("--fixed-step must be positive");
    cfg.fixed_step = args.fixed_step;
  }
  resolve_parameters(cfg);
  return cfg;
}

void add_run_options(CLI::App* cmd, RunArgs& args) {
  cmd->add_option("--scenario,-s", args.scenario, "scenario id (see `sim list`)");
  cmd->add_option("--set", args.sets, "override, key=value or section.key=value")->take_all();
  cmd->add_option("--seed", args.seed, "disorder seed");
  cmd->add_option("--out,-o", args.out, "output directory");
  cmd->add_option("--fixed-step", args.fixed_step, "use fixed-step RK4 with this step");
  cmd->add_option("--config,-c", args.config_file, "INI config file")->check(CLI::ExistingFile);
}

void list_scenarios() {
  for (const auto& s : scenario_registry()) {
    std::cout << s.id << "\n    " << s.description << '\n';
    for (const auto& p : s.params) {
      std::cout << "      " << p.section << '.' << p.key << " = "
                << (p.default_value.empty() ? "\"\"" : p.default_value) << "    " << p.help << '\n';
    }
  }
  std::cout << "common\n";
  for (const auto& p : common_params()) {
    std::cout << "      " << p.section << '.' << p.key << " = "
              << (p.default_value.empty() ? "\"\"" : p.default_value) << "    " << p.help << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Squeezed-cantilever spin simulations"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off");

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "run one scenario and write CSV tables plus a manifest");
  add_run_options(run, run_args);
  run->add_option("--manifest", run_args.manifest, "replay the run recorded in a manifest")
      ->check(CLI::ExistingFile);

  RunArgs sweep_args;
  std::string axis;
  std::vector<std::string> values;
  unsigned jobs = 0;
  auto* sw = app.add_subcommand("sweep", "run a scenario once per value of one parameter");
  add_run_options(sw, sweep_args);
  sw->add_option("--axis", axis, "parameter to vary")->required();
  sw->add_option("--values", values, "comma-separated values")->required()->delimiter(',');
  sw->add_option("--jobs,-j", jobs, "concurrent members (0 = hardware threads)");

  app.add_subcommand("list", "print scenarios and parameter defaults");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (app.got_subcommand("list")) {
      list_scenarios();
    } else if (app.got_subcommand(run)) {
      const RunOutput out = run_scenario(build_config(run_args));
      std::cout << out.manifest.string() << '\n';
    } else {
      const SweepOutput out = sweep(build_config(sweep_args), axis, values, jobs);
      std::cout << out.aggregated_csv.string() << '\n';
    }
  } catch (const InstabilityError& e) {
    spdlog::error("instability: {}", e.what());
    return kExitInstability;
  } catch (const NumericalFailure& e) {
    spdlog::error("numerical failure: {}", e.what());
    return kExitNumerical;
  } catch (const Error& e) {
    spdlog::error("configuration error: {}", e.what());
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  }
  return 0;
}
