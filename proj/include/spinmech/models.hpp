#pragma once

#include <functional>
#include <string>
#include <vector>

#include "spinmech/hilbert.hpp"

namespace spinmech {

/// Model-frame parameters in units of the bare coupling (lambda = 1, hbar = 1).
struct ModelParams {
  double delta_m = 1.0;              ///< mechanical detuning omega_m - omega_p
  std::vector<double> delta_dg{0.0};  ///< per-spin detuning omega_dg - omega_p
  std::vector<double> lambda_j{1.0};  ///< per-spin bare coupling
  double omega_p_amp = 0.0;          ///< two-phonon pump amplitude (signed)
  int n_spins = 1;
  int n_max = 10;
  std::vector<double> gamma_nv{0.0};  ///< per-spin dephasing rate
  double gamma_m_s = 0.0;            ///< engineered mechanical dissipation in the squeezed frame

  /// delta_dg = 0, lambda_j = lambda, gamma_nv = gamma for every spin.
  static ModelParams homogeneous(int n_spins, double delta_m, double omega_p_amp, int n_max,
                                 double lambda = 1.0, double gamma_nv = 0.0,
                                 double gamma_m_s = 0.0);

  /// Throws InvalidArgument on bad sizes/rates and InstabilityError when |Omega_p| >= delta_m.
  void validate() const;

  SpaceSignature signature() const { return SpaceSignature::boson_spins(n_max, n_spins); }
};

/// Pump amplitude producing squeezing r at detuning delta_m (tanh 2r = Omega_p / delta_m).
double pump_for_squeezing(double delta_m, double r);
/// Bare detuning delta_m giving squeezed-frame detuning Delta_m at squeezing r.
double delta_m_for_effective(double delta_m_eff, double r);

struct SqueezeParams {
  double r = 0.0;
  double delta_m_eff = 0.0;          ///< Delta_m = delta_m / cosh 2r
  std::vector<double> lambda_eff;    ///< lambda_j e^r / 2
};

SqueezeParams derive_squeeze_params(const ModelParams& params);

struct LambDickeReport {
  std::vector<double> eta;  ///< lambda_eff^k / Delta_m
  double eta_max = 0.0;
  double approximation = 0.0;  ///< lambda e^{3r} / (4 delta_m), lambda = max_j lambda_j
  bool valid = false;          ///< eta_max <= 0.2
};

LambDickeReport lamb_dicke_eta(const SqueezeParams& squeeze, const ModelParams& params);
LambDickeReport lamb_dicke_eta(const SqueezeParams& squeeze);

/// Smallest delta_m keeping lambda_eff / Delta_m <= eta at squeezing r.
double lamb_dicke_boundary(double r, double eta, double lambda = 1.0);

/// Dressed basis of the microwave-driven NV ground triplet.
struct DressedStates {
  double theta = 0.0;  ///< tan 2theta = -sqrt(2) Omega / Delta
  double omega_g = 0.0;
  double omega_e = 0.0;
  double omega_d = 0.0;
};

DressedStates dressed_states(double rabi_omega, double detuning);

/// Rotating-frame driven-NV Hamiltonian in the (|0>, |+1>, |-1>) basis.
MatrixXc nv_driven_hamiltonian(double rabi_omega, double detuning);
/// Columns |g>, |d>, |e> in the (|0>, |+1>, |-1>) basis for mixing angle theta.
MatrixXc dressed_basis(double theta);

// -- Hamiltonian builders. Signatures must equal params.signature().

/// delta_m a^dag a + sum_j [delta_dg^j/2 sz^j + lambda^j (a^dag s-^j + a s+^j)] - Omega_p/2 (a^dag^2 + a^2)
Operator build_total_hamiltonian(const ModelParams& params, const SpaceSignature& signature);

/// Delta_m a^dag a + sum_j [delta_dg^j/2 sz^j + lambda_eff^j (a^dag + a) sx^j]
Operator build_squeezed_rabi(const ModelParams& params, const SqueezeParams& squeeze,
                             const SpaceSignature& signature);

/// sum_j (lambda^j e^{-r} / 2)(a - a^dag)(s+^j - s-^j)
Operator build_correction(const ModelParams& params, const SqueezeParams& squeeze,
                          const SpaceSignature& signature);

/// Phonon-free spin model sum_{j,k} Lambda^{jk} sx^j sx^k + sum_j delta_dg^j/2 sz^j with
/// Lambda^{jk} = lambda_eff^j lambda_eff^k / Delta_m. The j = k terms give a constant
/// shift sum_j Lambda^{jj}. Logs a warning when eta_max > 0.2.
Operator build_ising(const ModelParams& params, const SqueezeParams& squeeze);

/// Ising coupling matrix Lambda^{jk}.
Eigen::MatrixXd ising_couplings(const SqueezeParams& squeeze);

/// Homogeneous spin-spin coupling (1 + e^{4r}) lambda^2 / (8 delta_m).
double oat_coupling(double r, double delta_m, double lambda = 1.0);

/// lambda_oat (sum_j sx^j)^2 over N >= 2 spins.
Operator build_oat(double lambda_oat, int n_spins);

/// Sum of constant operators with scalar time-dependent coefficients.
class TimeDependentHamiltonian {
 public:
  using Coefficient = std::function<cplx(double)>;
  struct Term {
    Operator op;
    Coefficient coefficient;
    std::string label;
  };

  explicit TimeDependentHamiltonian(SpaceSignature signature);

  void add(Operator op, Coefficient coefficient, std::string label = {});
  void add_constant(Operator op, std::string label = {});

  const SpaceSignature& signature() const { return signature_; }
  const std::vector<Term>& terms() const { return terms_; }
  Eigen::Index dim() const { return signature_.total(); }

  Operator at(double t) const;
  /// out = H(t); out must already be sized dim x dim.
  void evaluate(double t, MatrixXc& out) const;

 private:
  SpaceSignature signature_;
  std::vector<Term> terms_;
};

/// Squeezing schedule r(t) with optional analytic derivative (central difference otherwise).
struct SqueezeSchedule {
  std::function<double(double)> r;
  std::function<double(double)> r_dot;

  double value(double t) const;
  double derivative(double t) const;

  /// r(t) = r_max tanh(t / (2 tau)).
  static SqueezeSchedule tanh_ramp(double r_max, double tau = 1.0);
  static SqueezeSchedule constant(double r);
};

enum class FrameModel {
  kIdeal,  ///< time-dependent Rabi model only
  kFull,   ///< Rabi + e^{-r} correction + squeezing-rate term
};

/// Time-dependent squeezed-frame Hamiltonian for pump ramps. params.omega_p_amp is ignored;
/// the frame follows schedule r(t) with Delta_m(t) = delta_m / cosh 2r(t).
TimeDependentHamiltonian build_time_dependent(const ModelParams& params,
                                              const SqueezeSchedule& schedule,
                                              const SpaceSignature& signature,
                                              FrameModel model = FrameModel::kFull);

/// lambda_eff (a^dag e^{i Delta_m t} + a e^{-i Delta_m t}) J_x (pauli-sum J_x).
TimeDependentHamiltonian build_interaction_picture(const SqueezeParams& squeeze, int n_spins,
                                                   const SpaceSignature& signature);

/// Remove the identity component tr(H)/dim, returning the removed shift via `shift`.
Operator drop_constant(const Operator& h, double* shift = nullptr);

// -- Subsystem operators on a boson_spins signature.
Operator boson_annihilation(const SpaceSignature& signature);
Operator boson_number(const SpaceSignature& signature);
Operator spin_operator(PauliAxis axis, int spin, const SpaceSignature& signature,
                       std::size_t first_spin_slot = 1);

}  // namespace spinmech
