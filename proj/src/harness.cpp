#include "spinmech/harness.hpp"

#include <openssl/evp.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "spinmech/errors.hpp"

namespace spinmech {

namespace fs = std::filesystem;
using nlohmann::json;

DisorderSpec DisorderSpec::sample(int n_spins, std::uint64_t seed, double bound) {
  if (n_spins < 1) throw ConfigError("disorder needs at least one spin");
  if (!(bound >= 0.0)) throw ConfigError("disorder bound must be non-negative");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-bound, bound);
  DisorderSpec d;
  d.bound = bound;
  for (int j = 0; j < n_spins; ++j) d.delta_dg_offsets.push_back(u(rng));
  for (int j = 0; j < n_spins; ++j) d.lambda_factors.push_back(1.0 + u(rng));
  return d;
}

void DisorderSpec::validate(int n_spins) const {
  const auto n = static_cast<std::size_t>(n_spins);
  if (delta_dg_offsets.size() != n || lambda_factors.size() != n) {
    throw ConfigError("disorder vectors need " + std::to_string(n_spins) + " entries each");
  }
  const double slack = 1e-12;
  for (double o : delta_dg_offsets) {
    if (!(std::abs(o) <= bound + slack)) {
      throw ConfigError("detuning offset " + format_number(o) + " exceeds the disorder bound");
    }
  }
  for (double f : lambda_factors) {
    if (!(std::abs(f - 1.0) <= bound + slack)) {
      throw ConfigError("coupling factor " + format_number(f) + " exceeds the disorder bound");
    }
  }
}

void DisorderSpec::apply(ModelParams& params) const {
  validate(params.n_spins);
  for (std::size_t j = 0; j < delta_dg_offsets.size(); ++j) {
    params.delta_dg[j] += delta_dg_offsets[j];
    params.lambda_j[j] *= lambda_factors[j];
  }
}

namespace {

std::map<std::string, ParamSpec> declared_params(const Scenario& scenario) {
  std::map<std::string, ParamSpec> out;
  for (const auto& p : common_params()) out[p.key] = p;
  for (const auto& p : scenario.params) out[p.key] = p;
  return out;
}

// "section.key" -> key, checking the section against the declaration.
std::string resolve_key(const std::string& raw, const std::map<std::string, ParamSpec>& declared,
                        const std::string& scenario_id) {
  std::string key = raw;
  std::string section;
  if (const auto dot = raw.find('.'); dot != std::string::npos) {
    section = raw.substr(0, dot);
    key = raw.substr(dot + 1);
  }
  const auto it = declared.find(key);
  if (it == declared.end()) {
    throw ConfigError("scenario '" + scenario_id + "' has no parameter '" + key + "'");
  }
  if (!section.empty() && section != it->second.section) {
    throw ConfigError("parameter '" + key + "' belongs to [" + it->second.section + "], not [" +
                      section + "]");
  }
  return key;
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out << text;
    if (!out) throw ConfigError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  return line + '\n';
}

void flatten(const json& j, const std::string& prefix, std::map<std::string, std::string>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_number()) {
    out[prefix] = format_number(j.get<double>());
  } else if (j.is_boolean()) {
    out[prefix] = j.get<bool>() ? "1" : "0";
  }
}

json config_json(const ScenarioConfig& config) {
  json j = {{"scenario", config.scenario_id},
            {"overrides", config.overrides},
            {"seed", config.seed},
            {"output_dir", config.output_dir.string()}};
  j["fixed_step"] = config.fixed_step ? json(*config.fixed_step) : json(nullptr);
  return j;
}

}  // namespace

void apply_config_sections(ScenarioConfig& config, const IniSections& sections) {
  const auto& scenario = find_scenario(config.scenario_id);
  const auto declared = declared_params(scenario);
  static const std::set<std::string> known{"model", "device", "integrator", "disorder", "output"};
  for (const auto& [section, entries] : sections) {
    if (!known.count(section)) throw ConfigError("unknown config section [" + section + "]");
    for (const auto& [key, value] : entries) {
      if (section == "output" && key == "dir") {
        config.output_dir = value;
      } else if (section == "disorder" && key == "seed") {
        ParamSet tmp({{"seed", value}});
        config.seed = tmp.get_u64("seed");
      } else {
        config.overrides[resolve_key(section + "." + key, declared, config.scenario_id)] = value;
      }
    }
  }
}

ParamSet resolve_parameters(const ScenarioConfig& config) {
  const Scenario& scenario = find_scenario(config.scenario_id);
  const auto declared = declared_params(scenario);
  ParamSet params;
  for (const auto& [key, spec] : declared) params.set(key, spec.default_value);
  params.set("seed", std::to_string(config.seed));
  params.set("dir", config.output_dir.string());
  for (const auto& [raw, value] : config.overrides) {
    params.set(resolve_key(raw, declared, config.scenario_id), value);
  }
  if (config.fixed_step) {
    params.set("stepper", "fixed");
    params.set("fixed_step", format_number(*config.fixed_step));
  }
  return params;
}

ScenarioResult execute_scenario(const ScenarioConfig& config) {
  const Scenario& scenario = find_scenario(config.scenario_id);
  const ParamSet params = resolve_parameters(config);
  RunContext ctx;
  ctx.integrator = integrator_from_params(params);
  ctx.seed = params.get_u64("seed");
  return scenario.run(params, ctx);
}

void write_csv(const Table& table, const fs::path& path) {
  std::string text = csv_line(table.columns);
  std::vector<std::string> cells;
  for (const auto& row : table.rows) {
    cells.clear();
    for (double v : row) cells.push_back(format_number(v));
    text += csv_line(cells);
  }
  write_text_atomic(path, text);
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw NumericalFailure("SHA-256 initialisation failed");
  }
  char buf[1 << 15];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

RunOutput run_scenario(const ScenarioConfig& config) {
  const ParamSet params = resolve_parameters(config);
  const auto start = std::chrono::steady_clock::now();
  RunOutput out;
  out.result = execute_scenario(config);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  out.directory = config.output_dir / config.scenario_id;
  fs::create_directories(out.directory);
  json files = json::array();
  for (const auto& table : out.result.tables) {
    const fs::path path = out.directory / (table.name + ".csv");
    write_csv(table, path);
    out.csv_files.push_back(path);
    files.push_back({{"file", path.filename().string()}, {"sha256", sha256_file(path)},
                     {"rows", table.rows.size()}});
  }
  const IntegratorOptions integ = integrator_from_params(params);
  json manifest = {
      {"config", config_json(config)},
      {"parameters", params.values()},
      {"integrator",
       {{"stepper", integ.stepper == Stepper::kAdaptive ? "adaptive" : "fixed"},
        {"rtol", integ.rtol},
        {"atol", integ.atol},
        {"fixed_step", integ.fixed_step},
        {"trace_tolerance", integ.trace_tolerance}}},
      {"summary", out.result.summary},
      {"files", files},
      {"wall_time_s", wall}};
  out.manifest = out.directory / "manifest.json";
  write_text_atomic(out.manifest, manifest.dump(2) + "\n");
  spdlog::info("{}: {} table(s) written to {} in {:.2f} s", config.scenario_id,
               out.result.tables.size(), out.directory.string(), wall);
  return out;
}

SweepOutput sweep(const ScenarioConfig& base, const std::string& axis,
                  const std::vector<std::string>& values, unsigned max_parallel) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  const Scenario& scenario = find_scenario(base.scenario_id);
  const std::string key = resolve_key(axis, declared_params(scenario), base.scenario_id);
  if (max_parallel == 0) max_parallel = std::max(1u, std::thread::hardware_concurrency());

  const fs::path root = base.output_dir / (base.scenario_id + "_sweep_" + key);
  fs::create_directories(root);
  std::vector<ScenarioConfig> configs;
  for (const auto& v : values) {
    ScenarioConfig c = base;
    c.overrides[key] = v;
    c.output_dir = root / (key + "=" + v);
    configs.push_back(std::move(c));
  }

  SweepOutput out;
  out.members.resize(configs.size());
  std::vector<bool> done(configs.size(), false);
  std::string failure;
  std::exception_ptr first_error;
  for (std::size_t begin = 0; begin < configs.size() && failure.empty(); begin += max_parallel) {
    const std::size_t end = std::min(configs.size(), begin + max_parallel);
    std::vector<std::future<RunOutput>> batch;
    for (std::size_t i = begin; i < end; ++i) {
      batch.push_back(std::async(std::launch::async, [&configs, i] { return run_scenario(configs[i]); }));
    }
    for (std::size_t i = begin; i < end; ++i) {
      try {
        out.members[i] = batch[i - begin].get();
        done[i] = true;
      } catch (const std::exception& e) {
        if (failure.empty()) {
          failure = key + "=" + values[i] + ": " + e.what();
          first_error = std::current_exception();
        }
      }
    }
  }

  json members = json::array();
  for (std::size_t i = 0; i < configs.size(); ++i) {
    members.push_back({{"value", values[i]},
                       {"status", done[i] ? "ok" : "not completed"},
                       {"manifest", done[i] ? out.members[i].manifest.string() : ""}});
  }
  out.manifest = root / "sweep_manifest.json";
  json manifest = {{"config", config_json(base)}, {"axis", key}, {"members", members}};
  if (!failure.empty()) {
    manifest["status"] = "failed";
    manifest["error"] = failure;
    write_text_atomic(out.manifest, manifest.dump(2) + "\n");
    std::rethrow_exception(first_error);
  }

  std::vector<std::map<std::string, std::string>> flat(configs.size());
  std::set<std::string> columns;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    flatten(out.members[i].result.summary, "", flat[i]);
    for (const auto& [k, v] : flat[i]) columns.insert(k);
  }
  std::vector<std::string> header{key};
  header.insert(header.end(), columns.begin(), columns.end());
  std::string text = csv_line(header);
  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::vector<std::string> row{values[i]};
    for (const auto& c : columns) {
      const auto it = flat[i].find(c);
      row.push_back(it == flat[i].end() ? "" : it->second);
    }
    text += csv_line(row);
  }
  out.aggregated_csv = root / ("sweep_" + key + ".csv");
  write_text_atomic(out.aggregated_csv, text);
  manifest["status"] = "ok";
  manifest["aggregated"] = {{"file", out.aggregated_csv.filename().string()},
                            {"sha256", sha256_file(out.aggregated_csv)}};
  write_text_atomic(out.manifest, manifest.dump(2) + "\n");
  return out;
}

ScenarioConfig config_from_manifest(const fs::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw ConfigError("cannot open manifest " + manifest.string());
  json j;
  try {
    in >> j;
    ScenarioConfig c;
    const json& cfg = j.at("config");
    c.scenario_id = cfg.at("scenario").get<std::string>();
    c.seed = cfg.at("seed").get<std::uint64_t>();
    c.output_dir = cfg.at("output_dir").get<std::string>();
    if (!cfg.at("fixed_step").is_null()) c.fixed_step = cfg.at("fixed_step").get<double>();
    // Resolved parameters pin every default, so a replay does not depend on registry drift.
    for (const auto& [k, v] : j.at("parameters").items()) {
      if (k != "seed" && k != "dir") c.overrides[k] = v.get<std::string>();
    }
    return c;
  } catch (const json::exception& e) {
    throw ConfigError("malformed manifest " + manifest.string() + ": " + e.what());
  }
}

}  // namespace spinmech
