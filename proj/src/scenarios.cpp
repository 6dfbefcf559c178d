#include "spinmech/scenarios.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spinmech/device.hpp"
#include "spinmech/errors.hpp"
#include "spinmech/harness.hpp"
#include "spinmech/metrics.hpp"
#include "spinmech/transforms.hpp"

namespace spinmech {

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) {
    throw InvalidArgument("table '" + name + "': row width does not match the header");
  }
  rows.push_back(std::move(row));
}

std::vector<double> Table::column(const std::string& column_name) const {
  const auto it = std::find(columns.begin(), columns.end(), column_name);
  if (it == columns.end()) throw InvalidArgument("table '" + name + "' has no column " + column_name);
  const auto c = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[c]);
  return out;
}

namespace {

constexpr int kTruncationCap = 256;

std::string tag(double v) { return format_number(v); }

std::vector<double> per_spin(const ParamSet& p, const std::string& key, int n) {
  std::vector<double> v = p.get_list(key);
  if (v.size() == 1 && n > 1) v.assign(static_cast<std::size_t>(n), v.front());
  if (static_cast<int>(v.size()) != n) {
    throw ConfigError("parameter '" + key + "' needs 1 or " + std::to_string(n) + " values");
  }
  return v;
}

std::vector<double> time_grid(const ParamSet& p) {
  const double t_final = p.get_double("t_final");
  const int n = p.get_int("n_times");
  if (!(t_final > 0.0) || n < 2) throw ConfigError("t_final must be positive and n_times >= 2");
  return linspace(0.0, t_final, static_cast<std::size_t>(n));
}

Operator ground_projector(int spin, const SpaceSignature& sig, std::size_t first_slot) {
  const Operator id = Operator::identity(sig);
  return 0.5 * (id - spin_operator(PauliAxis::kZ, spin, sig, first_slot));
}

std::vector<CollapseChannel> channels_for(const SpaceSignature& sig, double gamma_m_s,
                                          const std::vector<double>& gamma_nv, bool has_boson) {
  std::vector<CollapseChannel> out;
  const std::size_t first = has_boson ? 1 : 0;
  if (has_boson && gamma_m_s > 0.0) out.push_back({boson_annihilation(sig), gamma_m_s, "a"});
  for (std::size_t j = 0; j < gamma_nv.size(); ++j) {
    if (gamma_nv[j] > 0.0) {
      out.push_back({spin_operator(PauliAxis::kZ, static_cast<int>(j), sig, first), gamma_nv[j],
                     "sz" + std::to_string(j + 1)});
    }
  }
  return out;
}

std::vector<VectorXc> spin_kets(const std::string& labels, int n_spins) {
  std::vector<VectorXc> kets;
  for (char c : labels) {
    if (c == 'g' || c == 'G') kets.push_back(spin_ket(false));
    else if (c == 'd' || c == 'D' || c == 'e' || c == 'E') kets.push_back(spin_ket(true));
    else if (c == ',' || c == ' ') continue;
    else throw ConfigError(std::string("initial spin label '") + c + "' is not g or d");
  }
  if (kets.size() == 1 && n_spins > 1) kets.assign(static_cast<std::size_t>(n_spins), kets.front());
  if (static_cast<int>(kets.size()) != n_spins) {
    throw ConfigError("initial spin labels do not match n_spins");
  }
  return kets;
}

QuantumState initial_state(const SpaceSignature& sig, bool has_boson, const std::string& labels,
                           int n_spins) {
  std::vector<VectorXc> factors;
  if (has_boson) factors.push_back(fock_ket(sig.dim(0) - 1, 0));
  for (auto& k : spin_kets(labels, n_spins)) factors.push_back(std::move(k));
  return product_state(sig, factors);
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

nlohmann::json diagnostics_json(const Diagnostics& d) {
  return {{"trace_drift", d.trace_drift},
          {"max_tail", d.max_tail},
          {"min_eigenvalue", d.min_eigenvalue},
          {"accepted_steps", d.accepted_steps},
          {"rejected_steps", d.rejected_steps},
          {"rhs_evaluations", d.rhs_evaluations},
          {"failed", d.failed}};
}

IntegratorOptions spins_only(IntegratorOptions o) {
  o.tail_slot = -1;
  return o;
}

struct TruncatedRun {
  Trajectory trajectory;
  int n_max;
};

TruncatedRun truncated(const std::function<Trajectory(int)>& simulate, const ParamSet& p) {
  TruncationChoice c =
      choose_truncation(simulate, p.get_int("n_max"), p.get_double("tail_tolerance"), kTruncationCap);
  return {std::move(*c.trajectory), c.n_max};
}

// -- fig2 -------------------------------------------------------------------

ScenarioResult run_fig2(const ParamSet& p, const RunContext& ctx, const std::string& name) {
  const double delta_m = p.get_double("delta_m");
  const double delta_dg = p.get_double("delta_dg");
  const double gm = p.get_double("gamma_m_s");
  const double gnv = p.get_double("gamma_nv");
  const auto times = time_grid(p);
  const auto r_values = p.get_list("r_values");
  if (r_values.empty()) throw ConfigError("r_values is empty");

  ScenarioResult res;
  Table table{name, {"t"}, {}};
  std::vector<std::vector<double>> cols;
  for (double r : r_values) {
    auto sim = [&](int n_max) {
      ModelParams mp = ModelParams::homogeneous(1, delta_m, pump_for_squeezing(delta_m, r), n_max,
                                                1.0, gnv, gm);
      mp.delta_dg = {delta_dg};
      const SqueezeParams sq = derive_squeeze_params(mp);
      const SpaceSignature sig = mp.signature();
      const Operator h = build_squeezed_rabi(mp, sq, sig);
      const auto rho0 = initial_state(sig, true, "d", 1);
      return evolve_lindblad(h, channels_for(sig, gm, mp.gamma_nv, true), rho0, times,
                             {{"n", boson_number(sig)}, {"sz", spin_operator(PauliAxis::kZ, 0, sig)}},
                             ctx.integrator);
    };
    const TruncatedRun run = truncated(sim, p);
    table.columns.push_back("n_r" + tag(r));
    table.columns.push_back("sz_r" + tag(r));
    cols.push_back(run.trajectory.real("n"));
    cols.push_back(run.trajectory.real("sz"));
    const double omega_p = pump_for_squeezing(delta_m, r);
    res.summary["r=" + tag(r)] = {{"n_max", run.n_max},
                                   {"lambda_eff", std::exp(r) / 2.0},
                                   {"delta_m_eff", delta_m / std::cosh(2.0 * r)},
                                   {"omega_p_amp", omega_p},
                                   {"diagnostics", diagnostics_json(run.trajectory.diagnostics())}};
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::vector<double> row{times[i]};
    for (const auto& c : cols) row.push_back(c[i]);
    table.add_row(std::move(row));
  }
  res.tables.push_back(std::move(table));
  return res;
}

// -- fig3 / figS5 (closed form) -------------------------------------------

ScenarioResult run_fig3(const ParamSet& p, const RunContext&) {
  const double lambda0 = p.get_double("lambda0");
  const double r_max = p.get_double("r_max");
  const int n_r = p.get_int("n_r");
  const double x_min = p.get_double("x_min");
  const int n_x = p.get_int("n_x");
  const auto etas = p.get_list("eta_values");
  if (n_r < 2 || n_x < 2 || !(x_min >= 0.0 && x_min < 1.0)) throw ConfigError("bad fig3 grid");

  ScenarioResult res;
  Table a{"fig3a", {"r", "enhancement", "Lambda"}, {}};
  for (double eta : etas) {
    a.columns.push_back("delta_m_eta" + tag(eta));
    a.columns.push_back("Lambda_eta" + tag(eta));
  }
  for (double r : linspace(0.0, r_max, static_cast<std::size_t>(n_r))) {
    const double enh = (1.0 + std::exp(4.0 * r)) / 2.0;
    std::vector<double> row{r, enh, lambda0 * enh};
    for (double eta : etas) {
      const double dm = lamb_dicke_boundary(r, eta);
      row.push_back(dm);
      row.push_back(oat_coupling(r, dm));
    }
    a.add_row(std::move(row));
  }
  // Omega_p / delta_m in [x_min, 1): stop one grid step short of the threshold.
  Table b{"fig3b", {"omega_p_over_delta_m", "r", "enhancement", "Lambda"}, {}};
  Table c{"fig3c", {"omega_p_over_delta_m", "r"}, {}};
  const double dx = (1.0 - x_min) / n_x;
  for (int i = 0; i < n_x; ++i) {
    const double x = x_min + dx * i;
    const double r = 0.5 * std::atanh(x);
    const double enh = (1.0 + std::exp(4.0 * r)) / 2.0;
    b.add_row({x, r, enh, lambda0 * enh});
    c.add_row({x, r});
  }
  res.summary["enhancement_at_r_1.33"] = (1.0 + std::exp(4.0 * 1.33)) / 2.0;
  res.summary["delta_m_for_lambda0"] = 1.0 / (4.0 * lambda0);
  res.tables = {std::move(a), std::move(b), std::move(c)};
  return res;
}

ScenarioResult run_figS5(const ParamSet& p, const RunContext&) {
  const auto etas = p.get_list("eta_values");
  const double r_max = p.get_double("r_max");
  const int n_r = p.get_int("n_r");
  if (n_r < 2) throw ConfigError("n_r must be >= 2");
  Table t{"figS5", {"r"}, {}};
  for (double eta : etas) {
    t.columns.push_back("delta_m_eta" + tag(eta));
    t.columns.push_back("approx_eta" + tag(eta));
  }
  for (double r : linspace(0.0, r_max, static_cast<std::size_t>(n_r))) {
    std::vector<double> row{r};
    for (double eta : etas) {
      row.push_back(lamb_dicke_boundary(r, eta));
      row.push_back(std::exp(3.0 * r) / (4.0 * eta));
    }
    t.add_row(std::move(row));
  }
  ScenarioResult res;
  res.tables.push_back(std::move(t));
  return res;
}

// -- fig4 -------------------------------------------------------------------

ScenarioResult run_fig4(const ParamSet& p, const RunContext& ctx) {
  const int n = p.get_int("n_spins");
  const double lambda0 = p.get_double("lambda0");
  const double gamma = p.get_double("gamma_nv");
  const auto r_values = p.get_list("r_values");
  const auto times = time_grid(p);
  const double delta_m = 1.0 / (4.0 * lambda0);
  if (n < 2) throw ConfigError("fig4 needs n_spins >= 2");

  ScenarioResult res;
  res.summary["delta_m"] = delta_m;
  Table table{"fig4", {"t"}, {}};
  std::vector<std::vector<double>> cols;
  for (double r : r_values) {
    const double lam = oat_coupling(r, delta_m);
    const Operator h = build_oat(lam, n);
    const SpaceSignature sig = h.signature();
    std::vector<double> xs(times.size()), xr(times.size()), gain(times.size());
    double identity_defect = 0.0;
    auto observer = [&](std::size_t i, double, const QuantumState& s) {
      const SqueezingReport rep = spin_squeezing(s);
      xs[i] = rep.xi_s_sq;
      xr[i] = rep.xi_r_sq;
      gain[i] = rep.gain;
      identity_defect = std::max(identity_defect, std::abs(rep.gain * rep.xi_r_sq - 1.0));
    };
    const Trajectory traj = evolve_lindblad(
        h, channels_for(sig, 0.0, std::vector<double>(static_cast<std::size_t>(n), gamma), false),
        all_ground_spins(n), times, {}, spins_only(ctx.integrator), observer);
    const auto imin = static_cast<std::size_t>(std::min_element(xr.begin(), xr.end()) - xr.begin());
    res.summary["r=" + tag(r)] = {
        {"Lambda", lam},
        {"min_xi_r_sq", xr[imin]},
        {"t_min_xi_r_sq", times[imin]},
        {"min_xi_s_sq", *std::min_element(xs.begin(), xs.end())},
        {"max_gain", *std::max_element(gain.begin(), gain.end())},
        {"gain_identity_defect", identity_defect},
        {"diagnostics", diagnostics_json(traj.diagnostics())}};
    table.columns.push_back("xi_s_sq_r" + tag(r));
    table.columns.push_back("xi_r_sq_r" + tag(r));
    table.columns.push_back("gain_r" + tag(r));
    cols.push_back(std::move(xs));
    cols.push_back(std::move(xr));
    cols.push_back(std::move(gain));
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::vector<double> row{times[i]};
    for (const auto& c : cols) row.push_back(c[i]);
    table.add_row(std::move(row));
  }
  res.tables.push_back(std::move(table));
  return res;
}

// -- figS1: pump amplitude vs electrode gap ---------------------------------

DeviceParams device_from(const ParamSet& p) {
  DeviceParams d;
  d.length = p.get_double("length");
  d.width = p.get_double("width");
  d.thickness = p.get_double("thickness");
  d.youngs_modulus = p.get_double("youngs_modulus");
  d.density = p.get_double("density");
  d.magnet_gradient = p.get_double("magnet_gradient");
  d.voltage_dc = p.get_double("voltage_dc");
  d.voltage_ac = p.get_double("voltage_ac");
  d.permittivity = p.get_double("permittivity");
  d.plate_area = p.get_double("plate_area");
  d.gap = p.get_double("gap");
  d.n_th = p.get_double("n_th");
  d.quality_factor = p.get_double("quality_factor");
  d.validate();
  return d;
}

ScenarioResult run_figS1(const ParamSet& p, const RunContext&) {
  DeviceParams dev = device_from(p);
  const double z_zpf = p.get_double("z_zpf");
  const double d_min = p.get_double("d_min");
  const double d_max = p.get_double("d_max");
  const int n_d = p.get_int("n_d");
  if (!(d_min > 0.0 && d_max > d_min) || n_d < 2) throw ConfigError("bad gap range");

  ScenarioResult res;
  Table t{"figS1", {"d", "delta_k", "omega_p", "omega_p_over_2pi"}, {}};
  for (double d : linspace(d_min, d_max, static_cast<std::size_t>(n_d))) {
    dev.gap = d;
    const PumpAmplitude pa = pump_amplitude(dev, z_zpf);
    t.add_row({d, pa.delta_k, pa.omega_p, pa.omega_p / (2.0 * std::numbers::pi)});
  }
  const CantileverParams cp = cantilever_params(dev);
  const double lam = magnetic_coupling(dev, cp.z_zpf, std::numbers::pi / 2.0);
  res.summary["omega_m"] = cp.omega_m;
  res.summary["omega_m_over_2pi"] = cp.omega_m / (2.0 * std::numbers::pi);
  res.summary["mass"] = cp.mass;
  res.summary["z_zpf"] = cp.z_zpf;
  res.summary["lambda_magnetic_over_2pi"] = lam / (2.0 * std::numbers::pi);
  res.tables.push_back(std::move(t));
  return res;
}

// -- figS2: H_Total^S vs H_Rabi^S -------------------------------------------

ScenarioResult run_figS2(const ParamSet& p, const RunContext& ctx) {
  const double r = p.get_double("r");
  const double dm_eff = p.get_double("delta_m_eff");
  const double delta_m = delta_m_for_effective(dm_eff, r);
  const double delta_dg = p.get_double("delta_dg");
  const double gamma = p.get_double("gamma");
  const auto times = time_grid(p);

  auto sim = [&](bool with_correction) {
    return [&, with_correction](int n_max) {
      ModelParams mp = ModelParams::homogeneous(1, delta_m, pump_for_squeezing(delta_m, r), n_max,
                                                1.0, gamma, gamma);
      mp.delta_dg = {delta_dg};
      const SqueezeParams sq = derive_squeeze_params(mp);
      const SpaceSignature sig = mp.signature();
      Operator h = build_squeezed_rabi(mp, sq, sig);
      if (with_correction) h = h + build_correction(mp, sq, sig);
      const auto psi0 = initial_state(sig, true, "g", 1);
      const std::vector<Observable> obs{{"n", boson_number(sig)},
                                        {"sz", spin_operator(PauliAxis::kZ, 0, sig)}};
      if (gamma == 0.0) return evolve_unitary(h, psi0, times, obs, ctx.integrator);
      return evolve_lindblad(h, channels_for(sig, gamma, mp.gamma_nv, true), psi0, times, obs,
                             ctx.integrator);
    };
  };
  const TruncatedRun total = truncated(sim(true), p);
  const TruncatedRun rabi = truncated(sim(false), p);

  ScenarioResult res;
  Table t{"figS2", {"t", "n_total", "n_rabi", "sz_total", "sz_rabi"}, {}};
  const auto nt = total.trajectory.real("n"), nr = rabi.trajectory.real("n");
  const auto st = total.trajectory.real("sz"), sr = rabi.trajectory.real("sz");
  for (std::size_t i = 0; i < times.size(); ++i) t.add_row({times[i], nt[i], nr[i], st[i], sr[i]});
  res.summary["delta_m"] = delta_m;
  res.summary["max_dev_n"] = max_abs_diff(nt, nr);
  res.summary["max_dev_sz"] = max_abs_diff(st, sr);
  res.summary["n_max_total"] = total.n_max;
  res.summary["n_max_rabi"] = rabi.n_max;
  res.summary["diagnostics_total"] = diagnostics_json(total.trajectory.diagnostics());
  res.summary["diagnostics_rabi"] = diagnostics_json(rabi.trajectory.diagnostics());
  res.tables.push_back(std::move(t));
  return res;
}

// -- figS3: reduced-state fidelities ----------------------------------------

ScenarioResult run_figS3(const ParamSet& p, const RunContext& ctx) {
  const double r = p.get_double("r");
  const double delta_m = p.get_double("delta_m");
  const double delta_dg = p.get_double("delta_dg");
  const double gm = p.get_double("gamma_m_s");
  const double gnv = p.get_double("gamma_nv");
  const int levels = p.get_int("fock_levels");
  const std::string init = p.get_string("initial");
  const auto times = time_grid(p);
  if (levels < 1) throw ConfigError("fock_levels must be >= 1");

  std::vector<std::vector<double>> cols;
  auto sim = [&](int n_max) {
    if (n_max + 1 < levels) throw ConfigError("fock_levels exceeds n_max + 1");
    cols.assign(static_cast<std::size_t>(2 + levels), std::vector<double>(times.size()));
    ModelParams mp =
        ModelParams::homogeneous(1, delta_m, pump_for_squeezing(delta_m, r), n_max, 1.0, gnv, gm);
    mp.delta_dg = {delta_dg};
    const SqueezeParams sq = derive_squeeze_params(mp);
    const SpaceSignature sig = mp.signature();
    const SpaceSignature spin_sig({2});
    const SpaceSignature ph_sig({n_max + 1});
    const auto ket_g = QuantumState::vector(spin_sig, spin_ket(false));
    const auto ket_d = QuantumState::vector(spin_sig, spin_ket(true));
    auto observer = [&](std::size_t i, double, const QuantumState& s) {
      const QuantumState spin = partial_trace(s, {1});
      const QuantumState ph = partial_trace(s, {0});
      cols[0][i] = fidelity(spin, ket_g);
      cols[1][i] = fidelity(spin, ket_d);
      for (int k = 0; k < levels; ++k) {
        cols[static_cast<std::size_t>(2 + k)][i] =
            fidelity(ph, QuantumState::vector(ph_sig, fock_ket(n_max, k)));
      }
    };
    return evolve_lindblad(build_squeezed_rabi(mp, sq, sig), channels_for(sig, gm, mp.gamma_nv, true),
                           initial_state(sig, true, init, 1), times, {}, ctx.integrator, observer);
  };
  const TruncatedRun run = truncated(sim, p);

  ScenarioResult res;
  Table t{"figS3", {"t", "F_g", "F_d"}, {}};
  for (int k = 0; k < levels; ++k) t.columns.push_back("F_n" + std::to_string(k));
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::vector<double> row{times[i]};
    for (const auto& c : cols) row.push_back(c[i]);
    t.add_row(std::move(row));
  }
  res.summary["n_max"] = run.n_max;
  res.summary["lambda_eff"] = std::exp(r) / 2.0;
  res.summary["delta_m_eff"] = delta_m / std::cosh(2.0 * r);
  res.summary["diagnostics"] = diagnostics_json(run.trajectory.diagnostics());
  res.tables.push_back(std::move(t));
  return res;
}

// -- figS6: multi-spin Rabi vs Ising ----------------------------------------

ScenarioResult run_figS6(const ParamSet& p, const RunContext& ctx) {
  const int n = 4;
  const double r = p.get_double("r");
  const double delta_m = p.get_double("delta_m");
  const double gm = p.get_double("gamma_m_s");
  const double gnv = p.get_double("gamma_nv");
  const double sign = p.get_double("ising_sign");
  const std::string init = p.get_string("initial");
  std::vector<double> times = time_grid(p);
  if (sign != 1.0 && sign != -1.0) throw ConfigError("ising_sign must be +1 or -1");

  DisorderSpec disorder;
  if (p.get_string("disorder_source") == "seeded") {
    disorder = DisorderSpec::sample(n, p.get_u64("seed"), p.get_double("disorder_bound"));
  } else if (p.get_string("disorder_source") == "explicit") {
    disorder.delta_dg_offsets = p.get_list("delta_dg_offsets");
    disorder.lambda_factors = p.get_list("lambda_factors");
    disorder.bound = p.get_double("disorder_bound");
  } else {
    throw ConfigError("disorder_source must be explicit or seeded");
  }
  disorder.validate(n);

  auto params_for = [&](bool disordered, int n_max) {
    ModelParams mp = ModelParams::homogeneous(n, delta_m, pump_for_squeezing(delta_m, r), n_max,
                                              1.0, gnv, gm);
    if (disordered) disorder.apply(mp);
    return mp;
  };

  ScenarioResult res;
  std::vector<std::string> names;
  std::vector<std::vector<double>> cols;
  // The phonon-decoupling times 2 pi k / Delta_m are merged into the output grid.
  const double dm_eff = delta_m / std::cosh(2.0 * r);
  std::vector<double> decoupling_times;
  for (int k = 1;; ++k) {
    const double tk = 2.0 * std::numbers::pi * k / dm_eff;
    if (tk > times.back()) break;
    decoupling_times.push_back(tk);
  }
  times.insert(times.end(), decoupling_times.begin(), decoupling_times.end());
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-9 * std::max(1.0, b); }),
              times.end());
  std::vector<std::size_t> decoupling;
  for (double tk : decoupling_times) {
    const auto it = std::lower_bound(times.begin(), times.end(), tk - 1e-9 * std::max(1.0, tk));
    decoupling.push_back(static_cast<std::size_t>(it - times.begin()));
  }

  for (bool disordered : {false, true}) {
    const std::string suffix = disordered ? "_disorder" : "";
    auto rabi_sim = [&](int n_max) {
      const ModelParams mp = params_for(disordered, n_max);
      const SqueezeParams sq = derive_squeeze_params(mp);
      const SpaceSignature sig = mp.signature();
      std::vector<Observable> obs;
      for (int j = 0; j < n; ++j) obs.push_back({"pg" + std::to_string(j + 1), ground_projector(j, sig, 1)});
      return evolve_lindblad(build_squeezed_rabi(mp, sq, sig), channels_for(sig, gm, mp.gamma_nv, true),
                             initial_state(sig, true, init, n), times, obs, ctx.integrator);
    };
    const TruncatedRun rabi = truncated(rabi_sim, p);

    const ModelParams mp = params_for(disordered, 1);
    const SqueezeParams sq = derive_squeeze_params(mp);
    Operator h_ising = build_ising(mp, sq);
    if (sign < 0.0) {
      const SpaceSignature ss = h_ising.signature();
      Operator hz = Operator::zero(ss);
      for (int j = 0; j < n; ++j) {
        hz = hz + (mp.delta_dg[static_cast<std::size_t>(j)] / 2.0) * spin_operator(PauliAxis::kZ, j, ss, 0);
      }
      h_ising = 2.0 * hz - h_ising;
    }
    const SpaceSignature ss = h_ising.signature();
    std::vector<Observable> obs;
    for (int j = 0; j < n; ++j) obs.push_back({"pg" + std::to_string(j + 1), ground_projector(j, ss, 0)});
    const Trajectory ising =
        evolve_lindblad(h_ising, channels_for(ss, 0.0, mp.gamma_nv, false),
                        initial_state(ss, false, init, n), times, obs, spins_only(ctx.integrator));

    double dev_all = 0.0, dev_decoupled = 0.0;
    for (int j = 0; j < n; ++j) {
      const std::string key = "pg" + std::to_string(j + 1);
      const auto a = rabi.trajectory.real(key), b = ising.real(key);
      dev_all = std::max(dev_all, max_abs_diff(a, b));
      for (std::size_t i : decoupling) dev_decoupled = std::max(dev_decoupled, std::abs(a[i] - b[i]));
      names.push_back(key + "_rabi" + suffix);
      cols.push_back(a);
      names.push_back(key + "_ising" + suffix);
      cols.push_back(b);
    }
    const std::string label = disordered ? "disorder" : "clean";
    res.summary[label] = {{"max_dev_all_samples", dev_all},
                          {"max_dev_decoupling_times", dev_decoupled},
                          {"decoupling_samples", decoupling.size()},
                          {"n_max", rabi.n_max},
                          {"diagnostics_rabi", diagnostics_json(rabi.trajectory.diagnostics())},
                          {"diagnostics_ising", diagnostics_json(ising.diagnostics())}};
  }
  const LambDickeReport ld = lamb_dicke_eta(derive_squeeze_params(params_for(false, 1)));
  res.summary["eta"] = ld.eta_max;
  res.summary["delta_m_eff"] = dm_eff;
  res.summary["disorder_delta_dg_offsets"] = disorder.delta_dg_offsets;
  res.summary["disorder_lambda_factors"] = disorder.lambda_factors;

  Table t{"figS6", {"t"}, {}};
  for (auto& nme : names) t.columns.push_back(nme);
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::vector<double> row{times[i]};
    for (const auto& c : cols) row.push_back(c[i]);
    t.add_row(std::move(row));
  }
  res.tables.push_back(std::move(t));
  return res;
}

// -- figS7 / figS8: adiabatic ramp and cat state ----------------------------

ScenarioResult run_ramp(const ParamSet& p, const RunContext& ctx, bool cat) {
  const double delta_m = p.get_double("delta_m");
  const double r_max = p.get_double("r_max");
  const double tau = p.get_double("tau");
  const double gamma = p.get_double("gamma");
  const auto times = time_grid(p);
  const SqueezeSchedule schedule = SqueezeSchedule::tanh_ramp(r_max, tau);

  std::vector<cplx> alpha(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) alpha[i] = cat_alpha(1.0, delta_m, schedule, times[i]);

  ScenarioResult res;
  struct ModelRun {
    std::vector<double> n, sz, fid;
    cplx a_sx;
    int n_max = 0;
    Diagnostics diag;
  };
  auto run_model = [&](FrameModel model) {
    ModelRun out;
    auto sim = [&](int n_max) {
      out.fid.assign(times.size(), 0.0);
      ModelParams mp = ModelParams::homogeneous(1, delta_m, 0.0, n_max, 1.0, gamma, gamma);
      const SpaceSignature sig = mp.signature();
      const TimeDependentHamiltonian h = build_time_dependent(mp, schedule, sig, model);
      const auto psi0 = initial_state(sig, true, "g", 1);
      const Operator a = boson_annihilation(sig);
      const std::vector<Observable> obs{{"n", boson_number(sig)},
                                        {"sz", spin_operator(PauliAxis::kZ, 0, sig)},
                                        {"a_sx", a * spin_operator(PauliAxis::kX, 0, sig)}};
      SampleObserver observer;
      if (cat) {
        observer = [&, n_max](std::size_t i, double, const QuantumState& s) {
          out.fid[i] = fidelity(s, target_cat_state(alpha[i], n_max));
        };
      }
      if (gamma == 0.0) return evolve_unitary(h, psi0, times, obs, ctx.integrator, observer);
      return evolve_lindblad(h, channels_for(sig, gamma, mp.gamma_nv, true), psi0, times, obs,
                             ctx.integrator, observer);
    };
    const TruncatedRun run = truncated(sim, p);
    out.n = run.trajectory.real("n");
    out.sz = run.trajectory.real("sz");
    out.a_sx = run.trajectory.values("a_sx").back();
    out.n_max = run.n_max;
    out.diag = run.trajectory.diagnostics();
    return out;
  };
  const ModelRun full = run_model(FrameModel::kFull);
  const ModelRun ideal = run_model(FrameModel::kIdeal);

  if (cat) {
    Table t{"figS8", {"t", "alpha_re", "alpha_im", "abs_alpha", "fidelity_full", "fidelity_ideal"}, {}};
    for (std::size_t i = 0; i < times.size(); ++i) {
      t.add_row({times[i], alpha[i].real(), alpha[i].imag(), std::abs(alpha[i]), full.fid[i], ideal.fid[i]});
    }
    res.tables.push_back(std::move(t));
    res.summary["final_fidelity_full"] = full.fid.back();
    res.summary["final_fidelity_ideal"] = ideal.fid.back();
    res.summary["alpha_final_abs"] = std::abs(alpha.back());
    res.summary["alpha_final_re"] = alpha.back().real();
    res.summary["alpha_final_im"] = alpha.back().imag();
    res.summary["a_sx_ideal_abs"] = std::abs(ideal.a_sx);
    res.summary["a_sx_full_abs"] = std::abs(full.a_sx);
  } else {
    Table s{"figS7_schedule", {"t", "r", "delta_m_eff", "lambda_eff"}, {}};
    for (double t : times) {
      const double rv = schedule.value(t);
      s.add_row({t, rv, delta_m / std::cosh(2.0 * rv), std::exp(rv) / 2.0});
    }
    Table d{"figS7", {"t", "n_full", "n_ideal", "sz_full", "sz_ideal"}, {}};
    for (std::size_t i = 0; i < times.size(); ++i) {
      d.add_row({times[i], full.n[i], ideal.n[i], full.sz[i], ideal.sz[i]});
    }
    res.tables.push_back(std::move(s));
    res.tables.push_back(std::move(d));
    res.summary["max_dev_n"] = max_abs_diff(full.n, ideal.n);
    res.summary["max_dev_sz"] = max_abs_diff(full.sz, ideal.sz);
  }
  res.summary["n_max_full"] = full.n_max;
  res.summary["n_max_ideal"] = ideal.n_max;
  res.summary["diagnostics_full"] = diagnostics_json(full.diag);
  res.summary["diagnostics_ideal"] = diagnostics_json(ideal.diag);
  return res;
}

// -- sw-check ---------------------------------------------------------------

ScenarioResult run_sw_check(const ParamSet& p, const RunContext&) {
  const int n = p.get_int("n_spins");
  const double delta_m = p.get_double("delta_m");
  const double r = p.get_double("r");
  ModelParams mp = ModelParams::homogeneous(n, delta_m, pump_for_squeezing(delta_m, r), p.get_int("n_max"));
  mp.delta_dg = per_spin(p, "delta_dg", n);
  const SchriefferWolffReport rep = schrieffer_wolff_check(mp, p.get_int("low_levels"));
  ScenarioResult res;
  Table t{"sw_check",
          {"eta", "residual", "residual_half", "ratio", "residual_flipped", "residual_flipped_half",
           "pair_coefficient"},
          {}};
  t.add_row({rep.eta, rep.residual, rep.residual_half, rep.ratio, rep.residual_flipped,
             rep.residual_flipped_half, rep.pair_coefficient});
  res.tables.push_back(std::move(t));
  res.summary = {{"eta", rep.eta},
                 {"residual", rep.residual},
                 {"residual_half", rep.residual_half},
                 {"ratio", rep.ratio},
                 {"residual_flipped", rep.residual_flipped},
                 {"residual_flipped_half", rep.residual_flipped_half},
                 {"pair_coefficient", rep.pair_coefficient}};
  return res;
}

// -- custom -----------------------------------------------------------------

ScenarioResult run_custom(const ParamSet& p, const RunContext& ctx) {
  const int n = p.get_int("n_spins");
  const std::string model = p.get_string("model");
  const auto times = time_grid(p);

  auto make_params = [&](int n_max) {
    ModelParams mp;
    mp.n_spins = n;
    mp.n_max = n_max;
    mp.delta_m = p.get_double("delta_m");
    mp.omega_p_amp = p.get_double("omega_p_amp");
    mp.delta_dg = per_spin(p, "delta_dg", n);
    mp.lambda_j = per_spin(p, "lambda_j", n);
    mp.gamma_nv = per_spin(p, "gamma_nv", n);
    mp.gamma_m_s = p.get_double("gamma_m_s");
    if (p.get_bool("disorder")) {
      DisorderSpec d;
      if (!p.get_string("delta_dg_offsets").empty() || !p.get_string("lambda_factors").empty()) {
        d.delta_dg_offsets = p.get_list("delta_dg_offsets");
        d.lambda_factors = p.get_list("lambda_factors");
        d.bound = p.get_double("disorder_bound");
      } else {
        d = DisorderSpec::sample(n, p.get_u64("seed"), p.get_double("disorder_bound"));
      }
      d.validate(n);
      d.apply(mp);
    }
    mp.validate();
    return mp;
  };

  const std::string init = p.get_string("initial");
  ScenarioResult res;
  Trajectory traj = [&]() {
    if (model == "ising") {
      const ModelParams mp = make_params(1);
      const Operator h = build_ising(mp, derive_squeeze_params(mp));
      const SpaceSignature ss = h.signature();
      std::vector<Observable> obs;
      for (int j = 0; j < n; ++j) obs.push_back({"sz" + std::to_string(j + 1), spin_operator(PauliAxis::kZ, j, ss, 0)});
      return evolve_lindblad(h, channels_for(ss, 0.0, mp.gamma_nv, false), initial_state(ss, false, init, n),
                             times, obs, spins_only(ctx.integrator));
    }
    if (model != "rabi" && model != "total" && model != "squeezed_total") {
      throw ConfigError("model must be one of rabi, total, squeezed_total, ising");
    }
    auto sim = [&](int n_max) {
      const ModelParams mp = make_params(n_max);
      const SqueezeParams sq = derive_squeeze_params(mp);
      const SpaceSignature sig = mp.signature();
      Operator h = model == "total" ? build_total_hamiltonian(mp, sig) : build_squeezed_rabi(mp, sq, sig);
      if (model == "squeezed_total") h = h + build_correction(mp, sq, sig);
      std::vector<Observable> obs{{"n", boson_number(sig)}};
      for (int j = 0; j < n; ++j) obs.push_back({"sz" + std::to_string(j + 1), spin_operator(PauliAxis::kZ, j, sig)});
      return evolve_lindblad(h, channels_for(sig, mp.gamma_m_s, mp.gamma_nv, true),
                             initial_state(sig, true, init, n), times, obs, ctx.integrator);
    };
    TruncatedRun run = truncated(sim, p);
    res.summary["n_max"] = run.n_max;
    return std::move(run.trajectory);
  }();

  Table t{"custom", {"t"}, {}};
  for (const auto& [name, v] : traj.series()) t.columns.push_back(name);
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::vector<double> row{times[i]};
    for (const auto& [name, v] : traj.series()) row.push_back(v[i].real());
    t.add_row(std::move(row));
  }
  res.summary["diagnostics"] = diagnostics_json(traj.diagnostics());
  res.tables.push_back(std::move(t));
  return res;
}

// -- parameter declarations -------------------------------------------------

std::vector<ParamSpec> device_specs() {
  const DeviceParams d;
  return {{"length", "device", format_number(d.length), "cantilever length [m]"},
          {"width", "device", format_number(d.width), "cantilever width [m]"},
          {"thickness", "device", format_number(d.thickness), "cantilever thickness [m]"},
          {"youngs_modulus", "device", format_number(d.youngs_modulus), "Young's modulus [Pa]"},
          {"density", "device", format_number(d.density), "mass density [kg/m^3]"},
          {"magnet_gradient", "device", format_number(d.magnet_gradient), "field gradient [T/m]"},
          {"voltage_dc", "device", format_number(d.voltage_dc), "static voltage V0 [V]"},
          {"voltage_ac", "device", format_number(d.voltage_ac), "pump voltage Vp [V]"},
          {"permittivity", "device", format_number(d.permittivity), "gap permittivity [F/m]"},
          {"plate_area", "device", format_number(d.plate_area), "capacitor area [m^2]"},
          {"gap", "device", format_number(d.gap), "electrode gap [m]"},
          {"n_th", "device", format_number(d.n_th), "thermal occupation"},
          {"quality_factor", "device", format_number(d.quality_factor), "mechanical Q"}};
}

ParamSpec model_key(const std::string& key, const std::string& def, const std::string& help) {
  return {key, "model", def, help};
}

std::vector<Scenario> build_registry() {
  std::vector<Scenario> reg;
  const std::vector<ParamSpec> fig2_params{
      model_key("delta_m", "1", "mechanical detuning"),
      model_key("delta_dg", "0", "spin detuning"),
      model_key("gamma_m_s", "0.1", "squeezed-frame mechanical damping"),
      model_key("gamma_nv", "0.1", "spin dephasing"),
      model_key("r_values", "0,3", "squeezing parameters"),
      model_key("t_final", "0.5", "final time [1/lambda]"),
      model_key("n_times", "101", "output samples"),
      model_key("n_max", "16", "initial Fock truncation")};
  reg.push_back({"fig2b", "phonon number under squeezed-frame Rabi dynamics, r = 0 and r = 3", fig2_params,
                 [](const ParamSet& p, const RunContext& c) { return run_fig2(p, c, "fig2b"); }});
  reg.push_back({"fig2c", "spin population under squeezed-frame Rabi dynamics, r = 0 and r = 3", fig2_params,
                 [](const ParamSet& p, const RunContext& c) { return run_fig2(p, c, "fig2c"); }});
  reg.push_back({"fig3", "spin-spin coupling enhancement vs r and vs pump ratio (closed form)",
                 {model_key("lambda0", "0.1", "unamplified coupling Lambda_0"),
                  model_key("r_max", "5", "largest r"),
                  model_key("n_r", "501", "r samples"),
                  model_key("x_min", "0.9", "smallest Omega_p / delta_m"),
                  model_key("n_x", "200", "pump-ratio samples"),
                  model_key("eta_values", "0.1,0.2", "Lamb-Dicke constraints")},
                 run_fig3});
  reg.push_back({"fig4", "one-axis-twisting spin squeezing with dephasing",
                 {model_key("n_spins", "6", "number of spins"),
                  model_key("lambda0", "0.1", "unamplified coupling Lambda_0"),
                  model_key("gamma_nv", "0.001", "spin dephasing"),
                  model_key("r_values", "0,0.5,1", "squeezing parameters"),
                  model_key("t_final", "2", "final time"),
                  model_key("n_times", "4001", "output samples")},
                 run_fig4});
  {
    auto params = device_specs();
    params.push_back({"z_zpf", "device", "2.14e-13", "zero-point displacement [m]"});
    params.push_back({"d_min", "device", "5e-08", "smallest gap [m]"});
    params.push_back({"d_max", "device", "5e-07", "largest gap [m]"});
    params.push_back({"n_d", "device", "100", "gap samples"});
    reg.push_back({"figS1", "pump amplitude vs electrode gap, plus cantilever numbers", params, run_figS1});
  }
  reg.push_back({"figS2", "squeezed-frame total vs Rabi Hamiltonian",
                 {model_key("delta_m_eff", "20", "squeezed-frame detuning Delta_m"),
                  model_key("delta_dg", "2", "spin detuning"),
                  model_key("r", "1.25", "squeezing parameter"),
                  model_key("gamma", "0", "damping and dephasing (0 = unitary)"),
                  model_key("t_final", "50", "final time"),
                  model_key("n_times", "501", "output samples"),
                  model_key("n_max", "8", "initial Fock truncation")},
                 run_figS2});
  reg.push_back({"figS3", "reduced-state fidelities of spin and phonon",
                 {model_key("delta_m", "2", "mechanical detuning"),
                  model_key("delta_dg", "0", "spin detuning"),
                  model_key("r", "1", "squeezing parameter"),
                  model_key("gamma_nv", "0.01", "spin dephasing"),
                  model_key("gamma_m_s", "0.01", "mechanical damping"),
                  model_key("initial", "g", "initial spin state"),
                  model_key("fock_levels", "4", "phonon number states reported"),
                  model_key("t_final", "3", "final time"),
                  model_key("n_times", "301", "output samples"),
                  model_key("n_max", "16", "initial Fock truncation")},
                 run_figS3});
  reg.push_back({"figS5", "Lamb-Dicke boundary delta_m(r)",
                 {model_key("eta_values", "0.1,0.2", "constraint values"),
                  model_key("r_max", "5", "largest r"),
                  model_key("n_r", "251", "r samples")},
                 run_figS5});
  reg.push_back({"figS6", "four-spin Rabi vs Ising populations, with and without disorder",
                 {model_key("r", "1.25", "squeezing parameter"),
                  model_key("delta_m", "60", "mechanical detuning"),
                  model_key("gamma_nv", "0.01", "spin dephasing"),
                  model_key("gamma_m_s", "0.01", "mechanical damping"),
                  model_key("initial", "g,d,g,d", "initial spin states"),
                  model_key("ising_sign", "1", "sign of the Ising coupling"),
                  model_key("disorder_source", "explicit", "explicit or seeded"),
                  {"delta_dg_offsets", "disorder", "-0.03,0.03,0,-0.02", "spin detuning offsets"},
                  {"lambda_factors", "disorder", "1.03,0.98,0.99,1.01", "coupling factors"},
                  model_key("t_final", "40", "final time"),
                  model_key("n_times", "401", "output samples"),
                  model_key("n_max", "16", "initial Fock truncation")},
                 run_figS6});
  const std::vector<ParamSpec> ramp{model_key("delta_m", "10", "mechanical detuning"),
                                    model_key("r_max", "1.25", "final squeezing"),
                                    model_key("tau", "1", "ramp time"),
                                    model_key("t_final", "5", "final time t_f"),
                                    model_key("n_times", "101", "output samples"),
                                    model_key("n_max", "16", "initial Fock truncation")};
  {
    auto p7 = ramp;
    p7.push_back(model_key("gamma", "0", "damping and dephasing (0 = unitary)"));
    reg.push_back({"figS7", "adiabatic squeezing ramp: full vs ideal time-dependent frame", p7,
                   [](const ParamSet& p, const RunContext& c) { return run_ramp(p, c, false); }});
    auto p8 = ramp;
    p8.push_back(model_key("gamma", "0.001", "damping and dephasing"));
    reg.push_back({"figS8", "spin-cat state fidelity along the adiabatic ramp", p8,
                   [](const ParamSet& p, const RunContext& c) { return run_ramp(p, c, true); }});
  }
  reg.push_back({"figS9", "two-spin GHZ state via the interaction picture",
                 {model_key("delta_m_eff", "40", "squeezed-frame detuning Delta_m"),
                  model_key("gamma", "0.01", "damping and dephasing"),
                  model_key("r_values", "0,0.5,1,1.25", "squeezing parameters"),
                  model_key("n_cap", "1000", "largest decoupling period index"),
                  model_key("fixed_time_r", "1.25", "r whose readout time fixes the comparison time"),
                  model_key("n_max", "4", "initial Fock truncation")},
                 ghz_scenario});
  reg.push_back({"sw-check", "polaron residual of the phonon-eliminated model",
                 {model_key("n_spins", "1", "number of spins"),
                  model_key("delta_m", "5", "mechanical detuning"),
                  model_key("r", "0", "squeezing parameter"),
                  model_key("delta_dg", "0", "spin detuning"),
                  model_key("n_max", "24", "Fock truncation"),
                  model_key("low_levels", "4", "Fock levels in the residual norm")},
                 run_sw_check});
  reg.push_back({"custom", "free-form run of one model",
                 {model_key("model", "rabi", "rabi | squeezed_total | total | ising"),
                  model_key("n_spins", "1", "number of spins"),
                  model_key("delta_m", "1", "mechanical detuning"),
                  model_key("omega_p_amp", "0", "two-phonon pump amplitude"),
                  model_key("delta_dg", "0", "spin detuning (one value or one per spin)"),
                  model_key("lambda_j", "1", "bare couplings (one value or one per spin)"),
                  model_key("gamma_nv", "0", "spin dephasing"),
                  model_key("gamma_m_s", "0", "mechanical damping"),
                  model_key("initial", "g", "initial spin states"),
                  model_key("t_final", "10", "final time"),
                  model_key("n_times", "201", "output samples"),
                  model_key("n_max", "8", "initial Fock truncation")},
                 run_custom});
  return reg;
}

}  // namespace

// -- GHZ --------------------------------------------------------------------

// Earliest local maximum (n >= 1) within 1e-3 of the largest value. The free
// evolution revives periodically, so later revivals can exceed the first by rounding.
std::size_t first_peak(const std::vector<double>& f) {
  const double top = *std::max_element(f.begin() + 1, f.end());
  for (std::size_t k = 1; k < f.size(); ++k) {
    const bool peak = f[k] >= f[k - 1] && (k + 1 == f.size() || f[k] >= f[k + 1]);
    if (peak && f[k] >= top - 1e-3) return k;
  }
  return static_cast<std::size_t>(std::max_element(f.begin() + 1, f.end()) - f.begin());
}

ScenarioResult ghz_scenario(const ParamSet& p, const RunContext& ctx) {
  const int n = 2;
  const double dm = p.get_double("delta_m_eff");
  const double gamma = p.get_double("gamma");
  const auto r_values = p.get_list("r_values");
  const int n_cap = p.get_int("n_cap");
  const double fixed_r = p.get_double("fixed_time_r");
  if (!(dm > 0.0) || n_cap < 1) throw ConfigError("delta_m_eff must be positive and n_cap >= 1");

  std::vector<double> times;
  for (int k = 0; k <= n_cap; ++k) times.push_back(2.0 * std::numbers::pi * k / dm);
  const QuantumState target = ghz_target(n);

  struct Series {
    std::vector<double> f, c;
  };
  ScenarioResult res;
  Table free_t{"figS9_free", {"t"}, {}};
  Table diss_t{"figS9_dissipative", {"t"}, {}};
  std::vector<Series> free_runs, diss_runs;
  std::vector<std::size_t> best_free;
  for (double r : r_values) {
    const double le = std::exp(r) / 2.0;
    const SqueezeParams sq{r, dm, {le, le}};
    auto run = [&](bool dissipative, Series& s) {
      auto sim = [&](int n_max) {
        s.f.assign(times.size(), 0.0);
        s.c.assign(times.size(), 0.0);
        const SpaceSignature sig = SpaceSignature::boson_spins(n_max, n);
        const TimeDependentHamiltonian h = build_interaction_picture(sq, n, sig);
        auto observer = [&](std::size_t i, double, const QuantumState& st) {
          const QuantumState spins = partial_trace(st, {1, 2});
          s.f[i] = fidelity(spins, target);
          s.c[i] = concurrence(spins);
        };
        const auto psi0 = initial_state(sig, true, "g", n);
        if (!dissipative) return evolve_unitary(h, psi0, times, {}, ctx.integrator, observer);
        return evolve_lindblad(h, channels_for(sig, gamma, {gamma, gamma}, true), psi0, times, {},
                               ctx.integrator, observer);
      };
      return truncated(sim, p);
    };
    Series sf, sd;
    const TruncatedRun rf = run(false, sf);
    const TruncatedRun rd = run(true, sd);
    const std::size_t bf = first_peak(sf.f);
    const std::size_t bd = first_peak(sd.f);
    best_free.push_back(bf);
    res.summary["r=" + tag(r)] = {{"eta", le / dm},
                                  {"best_n_free", bf},
                                  {"best_t_free", times[bf]},
                                  {"best_fidelity_free", sf.f[bf]},
                                  {"best_n_dissipative", bd},
                                  {"best_fidelity_dissipative", sd.f[bd]},
                                  {"concurrence_at_best_dissipative", sd.c[bd]},
                                  {"n_max", rd.n_max},
                                  {"diagnostics_free", diagnostics_json(rf.trajectory.diagnostics())},
                                  {"diagnostics_dissipative", diagnostics_json(rd.trajectory.diagnostics())}};
    for (Table* t : {&free_t, &diss_t}) {
      t->columns.push_back("F_r" + tag(r));
      t->columns.push_back("C_r" + tag(r));
    }
    free_runs.push_back(std::move(sf));
    diss_runs.push_back(std::move(sd));
  }

  // Fixed comparison time: the free-evolution readout time of r = fixed_time_r.
  const auto it = std::find_if(r_values.begin(), r_values.end(),
                               [&](double r) { return std::abs(r - fixed_r) < 1e-12; });
  if (it != r_values.end()) {
    const std::size_t k = best_free[static_cast<std::size_t>(it - r_values.begin())];
    res.summary["fixed_time"] = times[k];
    for (std::size_t i = 0; i < r_values.size(); ++i) {
      auto& entry = res.summary["r=" + tag(r_values[i])];
      entry["fidelity_at_fixed_time"] = diss_runs[i].f[k];
      entry["concurrence_at_fixed_time"] = diss_runs[i].c[k];
    }
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::vector<double> rf{times[i]}, rd{times[i]};
    for (std::size_t j = 0; j < r_values.size(); ++j) {
      rf.push_back(free_runs[j].f[i]);
      rf.push_back(free_runs[j].c[i]);
      rd.push_back(diss_runs[j].f[i]);
      rd.push_back(diss_runs[j].c[i]);
    }
    free_t.add_row(std::move(rf));
    diss_t.add_row(std::move(rd));
  }
  res.tables.push_back(std::move(free_t));
  res.tables.push_back(std::move(diss_t));
  return res;
}

const std::vector<ParamSpec>& common_params() {
  static const std::vector<ParamSpec> specs{
      {"stepper", "integrator", "adaptive", "adaptive | fixed"},
      {"fixed_step", "integrator", "0.001", "fixed RK4 step"},
      {"rtol", "integrator", "1e-08", "relative tolerance"},
      {"atol", "integrator", "1e-10", "absolute tolerance"},
      {"trace_tolerance", "integrator", "1e-08", "allowed trace or norm drift"},
      {"tail_tolerance", "integrator", "1e-06", "Fock tail population bound"},
      {"seed", "disorder", "0", "seed for disorder draws"},
      {"disorder", "disorder", "false", "apply disorder (custom scenario)"},
      {"disorder_bound", "disorder", "0.05", "maximum relative disorder"},
      {"delta_dg_offsets", "disorder", "", "explicit detuning offsets"},
      {"lambda_factors", "disorder", "", "explicit coupling factors"},
      {"dir", "output", "out", "output directory"}};
  return specs;
}

const std::vector<Scenario>& scenario_registry() {
  static const std::vector<Scenario> reg = build_registry();
  return reg;
}

const Scenario& find_scenario(const std::string& id) {
  for (const auto& s : scenario_registry()) {
    if (s.id == id) return s;
  }
  throw ConfigError("unknown scenario '" + id + "' (see `sim list`)");
}

IntegratorOptions integrator_from_params(const ParamSet& p) {
  IntegratorOptions o;
  const std::string stepper = p.get_string("stepper");
  if (stepper == "adaptive") {
    o.stepper = Stepper::kAdaptive;
  } else if (stepper == "fixed") {
    o.stepper = Stepper::kFixed;
  } else {
    throw ConfigError("stepper must be adaptive or fixed");
  }
  o.fixed_step = p.get_double("fixed_step");
  o.rtol = p.get_double("rtol");
  o.atol = p.get_double("atol");
  o.trace_tolerance = p.get_double("trace_tolerance");
  if (!(o.fixed_step > 0.0 && o.rtol > 0.0 && o.atol > 0.0 && o.trace_tolerance > 0.0)) {
    throw ConfigError("integrator tolerances and step must be positive");
  }
  return o;
}

}  // namespace spinmech
