#include "spinmech/models.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spinmech/errors.hpp"

namespace spinmech {

namespace {

void check_size(const std::vector<double>& v, int n, const char* name) {
  if (static_cast<int>(v.size()) != n) {
    throw InvalidArgument(std::string(name) + " has " + std::to_string(v.size()) +
                          " entries, expected n_spins = " + std::to_string(n));
  }
}

void require_model_signature(const ModelParams& params, const SpaceSignature& signature) {
  require_same_signature(params.signature(), signature, "model signature");
}

}  // namespace

ModelParams ModelParams::homogeneous(int n_spins, double delta_m, double omega_p_amp, int n_max,
                                     double lambda, double gamma_nv, double gamma_m_s) {
  const auto n = static_cast<std::size_t>(std::max(n_spins, 0));
  ModelParams p;
  p.delta_m = delta_m;
  p.omega_p_amp = omega_p_amp;
  p.n_spins = n_spins;
  p.n_max = n_max;
  p.delta_dg.assign(n, 0.0);
  p.lambda_j.assign(n, lambda);
  p.gamma_nv.assign(n, gamma_nv);
  p.gamma_m_s = gamma_m_s;
  return p;
}

void ModelParams::validate() const {
  if (n_spins < 1) throw InvalidArgument("n_spins must be >= 1");
  if (n_max < 1) throw InvalidDimension("n_max must be >= 1");
  check_size(delta_dg, n_spins, "delta_dg");
  check_size(lambda_j, n_spins, "lambda_j");
  check_size(gamma_nv, n_spins, "gamma_nv");
  if (!(delta_m > 0.0)) throw InvalidArgument("delta_m must be positive");
  for (double l : lambda_j) {
    if (l < 0.0) throw InvalidArgument("couplings must be non-negative");
  }
  for (double g : gamma_nv) {
    if (g < 0.0) throw InvalidArgument("dephasing rates must be non-negative");
  }
  if (gamma_m_s < 0.0) throw InvalidArgument("gamma_m_s must be non-negative");
  if (!(std::abs(omega_p_amp) < delta_m)) {
    throw InstabilityError("|Omega_p| = " + std::to_string(std::abs(omega_p_amp)) +
                           " >= delta_m = " + std::to_string(delta_m) +
                           ": parametric instability threshold");
  }
}

double pump_for_squeezing(double delta_m, double r) { return delta_m * std::tanh(2.0 * r); }

double delta_m_for_effective(double delta_m_eff, double r) { return delta_m_eff * std::cosh(2.0 * r); }

SqueezeParams derive_squeeze_params(const ModelParams& params) {
  params.validate();
  SqueezeParams s;
  s.r = 0.5 * std::atanh(params.omega_p_amp / params.delta_m);
  s.delta_m_eff = params.delta_m / std::cosh(2.0 * s.r);
  const double amp = std::exp(s.r) / 2.0;
  s.lambda_eff.reserve(params.lambda_j.size());
  for (double l : params.lambda_j) s.lambda_eff.push_back(l * amp);
  return s;
}

LambDickeReport lamb_dicke_eta(const SqueezeParams& squeeze) {
  if (!(squeeze.delta_m_eff > 0.0)) throw InvalidArgument("Delta_m must be positive");
  LambDickeReport rep;
  for (double le : squeeze.lambda_eff) rep.eta.push_back(le / squeeze.delta_m_eff);
  rep.eta_max = rep.eta.empty() ? 0.0 : *std::max_element(rep.eta.begin(), rep.eta.end());
  rep.valid = rep.eta_max <= 0.2;
  // Without the bare delta_m the closed-form approximation uses delta_m = Delta_m cosh 2r.
  const double lambda = rep.eta.empty() ? 0.0 : 2.0 * std::exp(-squeeze.r) *
      *std::max_element(squeeze.lambda_eff.begin(), squeeze.lambda_eff.end());
  rep.approximation = lambda * std::exp(3.0 * squeeze.r) /
                      (4.0 * delta_m_for_effective(squeeze.delta_m_eff, squeeze.r));
  return rep;
}

LambDickeReport lamb_dicke_eta(const SqueezeParams& squeeze, const ModelParams& params) {
  LambDickeReport rep = lamb_dicke_eta(squeeze);
  const double lambda = *std::max_element(params.lambda_j.begin(), params.lambda_j.end());
  rep.approximation = lambda * std::exp(3.0 * squeeze.r) / (4.0 * params.delta_m);
  return rep;
}

double lamb_dicke_boundary(double r, double eta, double lambda) {
  if (!(eta > 0.0)) throw InvalidArgument("eta must be positive");
  // eta = lambda e^r cosh(2r) / (2 delta_m) = lambda (e^{3r} + e^{-r}) / (4 delta_m)
  return lambda * (std::exp(3.0 * r) + std::exp(-r)) / (4.0 * eta);
}

// ---------------------------------------------------------------------------
// Dressed states

MatrixXc nv_driven_hamiltonian(double rabi_omega, double detuning) {
  MatrixXc h = MatrixXc::Zero(3, 3);
  h(1, 1) = -detuning;
  h(2, 2) = -detuning;
  h(0, 1) = h(1, 0) = rabi_omega / 2.0;
  h(0, 2) = h(2, 0) = rabi_omega / 2.0;
  return h;
}

MatrixXc dressed_basis(double theta) {
  const double s2 = 1.0 / std::numbers::sqrt2;
  MatrixXc b = MatrixXc::Zero(3, 3);
  // |b> = (|+1> + |-1>)/sqrt2, |d> = (|+1> - |-1>)/sqrt2
  b.col(0) << std::cos(theta), -std::sin(theta) * s2, -std::sin(theta) * s2;  // |g>
  b.col(1) << 0.0, s2, -s2;                                                   // |d>
  b.col(2) << std::sin(theta), std::cos(theta) * s2, std::cos(theta) * s2;    // |e>
  return b;
}

DressedStates dressed_states(double rabi_omega, double detuning) {
  if (rabi_omega == 0.0 && detuning == 0.0) {
    throw DegenerateInput("dressed_states: Omega = Delta = 0 leaves the triplet degenerate");
  }
  DressedStates out;
  if (detuning == 0.0) {
    out.theta = rabi_omega > 0.0 ? -std::numbers::pi / 4.0 : std::numbers::pi / 4.0;
  } else {
    out.theta = 0.5 * std::atan(-std::numbers::sqrt2 * rabi_omega / detuning);
  }
  out.omega_d = -detuning;

  // Diagonalize the (|0>, |b>) block and assign eigenvalues by overlap with |g>, |e>.
  Eigen::Matrix2d block;
  const double c = rabi_omega / std::numbers::sqrt2;
  block << 0.0, c, c, -detuning;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(block);
  const Eigen::Vector2d g(std::cos(out.theta), -std::sin(out.theta));
  const double overlap0 = std::abs(es.eigenvectors().col(0).dot(g));
  const double overlap1 = std::abs(es.eigenvectors().col(1).dot(g));
  if (overlap0 >= overlap1) {
    out.omega_g = es.eigenvalues()(0);
    out.omega_e = es.eigenvalues()(1);
  } else {
    out.omega_g = es.eigenvalues()(1);
    out.omega_e = es.eigenvalues()(0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Subsystem helpers

Operator boson_annihilation(const SpaceSignature& signature) {
  return embed(fock_annihilation(signature.dim(0) - 1), 0, signature);
}

Operator boson_number(const SpaceSignature& signature) {
  return embed(fock_number(signature.dim(0) - 1), 0, signature);
}

Operator spin_operator(PauliAxis axis, int spin, const SpaceSignature& signature,
                       std::size_t first_spin_slot) {
  return embed(pauli(axis), first_spin_slot + static_cast<std::size_t>(spin), signature);
}

// ---------------------------------------------------------------------------
// Hamiltonians

Operator build_total_hamiltonian(const ModelParams& params, const SpaceSignature& signature) {
  params.validate();
  require_model_signature(params, signature);
  const Operator a = boson_annihilation(signature);
  const Operator ad = a.adjoint();
  Operator h = params.delta_m * (ad * a) - (params.omega_p_amp / 2.0) * (ad * ad + a * a);
  for (int j = 0; j < params.n_spins; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    const Operator sp = spin_operator(PauliAxis::kPlus, j, signature);
    const Operator sm = spin_operator(PauliAxis::kMinus, j, signature);
    h = h + (params.delta_dg[jj] / 2.0) * spin_operator(PauliAxis::kZ, j, signature) +
        params.lambda_j[jj] * (ad * sm + a * sp);
  }
  return h;
}

Operator build_squeezed_rabi(const ModelParams& params, const SqueezeParams& squeeze,
                             const SpaceSignature& signature) {
  params.validate();
  require_model_signature(params, signature);
  const Operator a = boson_annihilation(signature);
  const Operator x = a + a.adjoint();
  Operator h = squeeze.delta_m_eff * (a.adjoint() * a);
  for (int j = 0; j < params.n_spins; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    h = h + (params.delta_dg[jj] / 2.0) * spin_operator(PauliAxis::kZ, j, signature) +
        squeeze.lambda_eff.at(jj) * (x * spin_operator(PauliAxis::kX, j, signature));
  }
  return h;
}

Operator build_correction(const ModelParams& params, const SqueezeParams& squeeze,
                          const SpaceSignature& signature) {
  params.validate();
  require_model_signature(params, signature);
  const Operator a = boson_annihilation(signature);
  const Operator p = a - a.adjoint();
  Operator h = Operator::zero(signature);
  for (int j = 0; j < params.n_spins; ++j) {
    const double pref = params.lambda_j[static_cast<std::size_t>(j)] * std::exp(-squeeze.r) / 2.0;
    h = h + pref * (p * (spin_operator(PauliAxis::kPlus, j, signature) -
                         spin_operator(PauliAxis::kMinus, j, signature)));
  }
  return h;
}

Eigen::MatrixXd ising_couplings(const SqueezeParams& squeeze) {
  if (!(squeeze.delta_m_eff > 0.0)) throw InvalidArgument("Delta_m must be positive");
  const auto n = static_cast<Eigen::Index>(squeeze.lambda_eff.size());
  const Eigen::Map<const Eigen::VectorXd> le(squeeze.lambda_eff.data(), n);
  return le * le.transpose() / squeeze.delta_m_eff;
}

Operator build_ising(const ModelParams& params, const SqueezeParams& squeeze) {
  params.validate();
  const Eigen::MatrixXd lam = ising_couplings(squeeze);
  const LambDickeReport ld = lamb_dicke_eta(squeeze);
  if (!ld.valid) {
    spdlog::warn("build_ising: eta_max = {:.3f} > 0.2, phonon elimination is unreliable",
                 ld.eta_max);
  }
  const int n = params.n_spins;
  const SpaceSignature sig = SpaceSignature::spins(n);
  std::vector<Operator> sx;
  for (int j = 0; j < n; ++j) sx.push_back(spin_operator(PauliAxis::kX, j, sig, 0));
  Operator h = Operator::zero(sig);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      h = h + lam(j, k) * (sx[static_cast<std::size_t>(j)] * sx[static_cast<std::size_t>(k)]);
    }
    h = h + (params.delta_dg[static_cast<std::size_t>(j)] / 2.0) *
                spin_operator(PauliAxis::kZ, j, sig, 0);
  }
  return h;
}

double oat_coupling(double r, double delta_m, double lambda) {
  if (!(delta_m > 0.0)) throw InvalidArgument("delta_m must be positive");
  return (1.0 + std::exp(4.0 * r)) * lambda * lambda / (8.0 * delta_m);
}

Operator build_oat(double lambda_oat, int n_spins) {
  if (n_spins < 2) throw InvalidArgument("one-axis twisting needs N >= 2");
  const Operator jx = collective_spin(SpinAxis::kX, n_spins);
  return lambda_oat * (jx * jx);
}

Operator drop_constant(const Operator& h, double* shift) {
  const cplx c = h.matrix().trace() / static_cast<double>(h.dim());
  if (shift != nullptr) *shift = c.real();
  if (std::abs(c) > 0.0) spdlog::debug("dropping constant energy shift {:.12g}", c.real());
  return h - c * Operator::identity(h.signature());
}

// ---------------------------------------------------------------------------
// Time-dependent Hamiltonians

TimeDependentHamiltonian::TimeDependentHamiltonian(SpaceSignature signature)
    : signature_(std::move(signature)) {}

void TimeDependentHamiltonian::add(Operator op, Coefficient coefficient, std::string label) {
  require_same_signature(signature_, op.signature(), "time-dependent term");
  terms_.push_back({std::move(op), std::move(coefficient), std::move(label)});
}

void TimeDependentHamiltonian::add_constant(Operator op, std::string label) {
  add(std::move(op), [](double) { return cplx{1.0, 0.0}; }, std::move(label));
}

void TimeDependentHamiltonian::evaluate(double t, MatrixXc& out) const {
  out.setZero();
  for (const Term& term : terms_) {
    const cplx c = term.coefficient(t);
    if (c != cplx{}) out.noalias() += c * term.op.matrix();
  }
}

Operator TimeDependentHamiltonian::at(double t) const {
  MatrixXc m(dim(), dim());
  evaluate(t, m);
  return {signature_, std::move(m)};
}

double SqueezeSchedule::value(double t) const {
  const double v = r(t);
  if (!std::isfinite(v)) throw InvalidArgument("squeeze schedule r(t) is not a finite real number");
  return v;
}

double SqueezeSchedule::derivative(double t) const {
  if (r_dot) return r_dot(t);
  const double h = 1e-5 * std::max(1.0, std::abs(t));
  return (value(t + h) - value(t - h)) / (2.0 * h);
}

SqueezeSchedule SqueezeSchedule::tanh_ramp(double r_max, double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("ramp time must be positive");
  SqueezeSchedule s;
  s.r = [r_max, tau](double t) { return r_max * std::tanh(t / (2.0 * tau)); };
  s.r_dot = [r_max, tau](double t) {
    const double c = std::cosh(t / (2.0 * tau));
    return r_max / (2.0 * tau * c * c);
  };
  return s;
}

SqueezeSchedule SqueezeSchedule::constant(double r) {
  SqueezeSchedule s;
  s.r = [r](double) { return r; };
  s.r_dot = [](double) { return 0.0; };
  return s;
}

TimeDependentHamiltonian build_time_dependent(const ModelParams& params,
                                              const SqueezeSchedule& schedule,
                                              const SpaceSignature& signature, FrameModel model) {
  require_model_signature(params, signature);
  if (!schedule.r) throw InvalidArgument("squeeze schedule has no r(t)");
  (void)schedule.value(0.0);
  const double delta_m = params.delta_m;
  if (!(delta_m > 0.0)) throw InvalidArgument("delta_m must be positive");

  const Operator a = boson_annihilation(signature);
  const Operator ad = a.adjoint();
  const Operator x = a + ad;

  TimeDependentHamiltonian h(signature);
  h.add(ad * a,
        [schedule, delta_m](double t) { return cplx{delta_m / std::cosh(2.0 * schedule.value(t)), 0.0}; },
        "Delta_m(t) a^dag a");
  for (int j = 0; j < params.n_spins; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    if (params.delta_dg.at(jj) != 0.0) {
      h.add_constant((params.delta_dg[jj] / 2.0) * spin_operator(PauliAxis::kZ, j, signature),
                     "delta_dg/2 sz");
    }
    const double lam = params.lambda_j.at(jj);
    h.add(x * spin_operator(PauliAxis::kX, j, signature),
          [schedule, lam](double t) { return cplx{lam * std::exp(schedule.value(t)) / 2.0, 0.0}; },
          "lambda_eff(t) (a + a^dag) sx");
    if (model == FrameModel::kFull) {
      h.add((a - ad) * (spin_operator(PauliAxis::kPlus, j, signature) -
                        spin_operator(PauliAxis::kMinus, j, signature)),
            [schedule, lam](double t) { return cplx{lam * std::exp(-schedule.value(t)) / 2.0, 0.0}; },
            "lambda e^{-r(t)}/2 (a - a^dag)(s+ - s-)");
    }
  }
  if (model == FrameModel::kFull) {
    // (i r_dot / 2)(a^2 - a^dag^2) = (r_dot / 2) * [i (a^2 - a^dag^2)]
    h.add(kI * (a * a - ad * ad),
          [schedule](double t) { return cplx{schedule.derivative(t) / 2.0, 0.0}; },
          "i r_dot/2 (a^2 - a^dag^2)");
  }
  return h;
}

TimeDependentHamiltonian build_interaction_picture(const SqueezeParams& squeeze, int n_spins,
                                                   const SpaceSignature& signature) {
  if (n_spins < 1 || static_cast<int>(squeeze.lambda_eff.size()) != n_spins) {
    throw InvalidArgument("interaction picture: coupling list does not match spin count");
  }
  require_same_signature(SpaceSignature::boson_spins(signature.dim(0) - 1, n_spins), signature,
                         "interaction picture signature");
  const double le = squeeze.lambda_eff.front();
  for (double l : squeeze.lambda_eff) {
    if (std::abs(l - le) > 1e-12 * std::max(1.0, std::abs(le))) {
      throw UnsupportedConfiguration("interaction picture needs homogeneous couplings");
    }
  }
  const double dm = squeeze.delta_m_eff;
  const Operator a = boson_annihilation(signature);
  const Operator jx = collective_spin(SpinAxis::kX, signature, 1);
  TimeDependentHamiltonian h(signature);
  h.add(le * (a.adjoint() * jx), [dm](double t) { return std::exp(kI * dm * t); }, "a^dag Jx");
  h.add(le * (a * jx), [dm](double t) { return std::exp(-kI * dm * t); }, "a Jx");
  return h;
}

}  // namespace spinmech
