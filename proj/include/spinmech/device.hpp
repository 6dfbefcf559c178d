#pragma once

namespace spinmech {

/// SI physical constants.
namespace si {
inline constexpr double kHbar = 1.054571817e-34;
inline constexpr double kBohrMagneton = 9.2740100783e-24;
inline constexpr double kElectronG = 2.0;
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;
}  // namespace si

/// Cantilever and capacitor parameters in SI units. Defaults describe the
/// silicon cantilever used throughout the feasibility estimates.
struct DeviceParams {
  double length = 6e-6;
  double width = 0.1e-6;
  double thickness = 0.05e-6;
  double youngs_modulus = 1.3e11;
  double density = 2.33e3;
  double magnet_gradient = 1.7e7;  ///< T/m
  double voltage_dc = 10.0;
  double voltage_ac = 2.0;
  double permittivity = si::kVacuumPermittivity;
  double plate_area = 1.0e-6 * 0.1e-6;
  double gap = 100e-9;
  double n_th = 1.0;
  double quality_factor = 1e6;

  void validate() const;
};

struct CantileverParams {
  double omega_m = 0.0;  ///< rad/s
  double mass = 0.0;     ///< effective mass, kg
  double z_zpf = 0.0;    ///< m
};

/// Fundamental flexural mode: omega_m = 2 pi * 3.516 (t / l^2) sqrt(E / 12 rho),
/// M = rho l w t / 4, z_zpf = sqrt(hbar / 2 M omega_m).
CantileverParams cantilever_params(const DeviceParams& device);

struct PumpAmplitude {
  double delta_k = 0.0;  ///< spring-constant modulation depth 2 V0 Vp eps S / d^2
  double omega_p = 0.0;  ///< |delta_k| z_zpf^2 / (2 hbar), rad/s
};

PumpAmplitude pump_amplitude(const DeviceParams& device, double z_zpf);

/// lambda = -(mu_B g_e / hbar) G z_zpf sin(theta), rad/s.
double magnetic_coupling(const DeviceParams& device, double z_zpf, double theta);

/// Strain coupling of a spin at depth depth_fraction * thickness in a doubly clamped beam:
/// lambda = 2 pi * 180 GHz * 2 depth_fraction sqrt(hbar / (l^3 w sqrt(E rho))), rad/s.
double strain_coupling(const DeviceParams& device, double depth_fraction = 0.5);

struct Cooperativity {
  double c = 0.0;      ///< lambda^2 / (Gamma_m gamma_nv)
  double c_s = 0.0;    ///< lambda_eff^2 / (Gamma_m^S gamma_nv) with Gamma_m^S = Gamma_m
  double ratio = 0.0;  ///< C_S / C = e^{2r} / 4
};

Cooperativity cooperativity(double lambda, double gamma_m, double gamma_nv, double r);

struct EngineeredDissipation {
  double r_prime = 0.0;
  double gamma_m_s = 0.0;
};

/// tanh r' = D+ / D-, Gamma_m^S = 4 (D-^2 - D+^2) / kappa_c.
EngineeredDissipation engineered_dissipation(double d_plus, double d_minus, double kappa_c);

/// Converts a rate in rad/s to units of the bare coupling lambda (rad/s).
double to_lambda_units(double rate, double lambda);

}  // namespace spinmech
