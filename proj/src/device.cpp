#include "spinmech/device.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "spinmech/errors.hpp"

namespace spinmech {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw InvalidArgument(std::string(name) + " must be positive");
}

}  // namespace

void DeviceParams::validate() const {
  require_positive(length, "length");
  require_positive(width, "width");
  require_positive(thickness, "thickness");
  require_positive(youngs_modulus, "youngs_modulus");
  require_positive(density, "density");
  require_positive(magnet_gradient, "magnet_gradient");
  require_positive(voltage_dc, "voltage_dc");
  if (voltage_ac < 0.0) throw InvalidArgument("voltage_ac must be non-negative");
  require_positive(permittivity, "permittivity");
  require_positive(plate_area, "plate_area");
  require_positive(gap, "gap");
  if (n_th < 0.0) throw InvalidArgument("n_th must be non-negative");
  require_positive(quality_factor, "quality_factor");
}

CantileverParams cantilever_params(const DeviceParams& device) {
  require_positive(device.length, "length");
  require_positive(device.width, "width");
  require_positive(device.thickness, "thickness");
  require_positive(device.youngs_modulus, "youngs_modulus");
  require_positive(device.density, "density");

  const double l = device.length;
  const double t = device.thickness;
  CantileverParams out;
  const double f = 3.516 * (t / (l * l)) * std::sqrt(device.youngs_modulus / (12.0 * device.density));
  out.omega_m = 2.0 * std::numbers::pi * f;
  out.mass = device.density * l * device.width * t / 4.0;
  out.z_zpf = std::sqrt(si::kHbar / (2.0 * out.mass * out.omega_m));
  return out;
}

PumpAmplitude pump_amplitude(const DeviceParams& device, double z_zpf) {
  require_positive(device.gap, "gap");
  require_positive(z_zpf, "z_zpf");
  PumpAmplitude out;
  out.delta_k = 2.0 * device.voltage_dc * device.voltage_ac * device.permittivity *
                device.plate_area / (device.gap * device.gap);
  out.omega_p = std::abs(out.delta_k) * z_zpf * z_zpf / (2.0 * si::kHbar);
  return out;
}

double magnetic_coupling(const DeviceParams& device, double z_zpf, double theta) {
  require_positive(device.magnet_gradient, "magnet_gradient");
  return -(si::kBohrMagneton * si::kElectronG / si::kHbar) * device.magnet_gradient * z_zpf *
         std::sin(theta);
}

double strain_coupling(const DeviceParams& device, double depth_fraction) {
  require_positive(device.length, "length");
  require_positive(device.width, "width");
  require_positive(device.youngs_modulus, "youngs_modulus");
  require_positive(device.density, "density");
  require_positive(depth_fraction, "depth_fraction");
  const double l = device.length;
  const double zpf_strain = std::sqrt(
      si::kHbar / (l * l * l * device.width * std::sqrt(device.youngs_modulus * device.density)));
  return 2.0 * std::numbers::pi * 180e9 * 2.0 * depth_fraction * zpf_strain;
}

Cooperativity cooperativity(double lambda, double gamma_m, double gamma_nv, double r) {
  if (lambda == 0.0) throw InvalidArgument("cooperativity: coupling must be nonzero");
  require_positive(gamma_m, "gamma_m");
  require_positive(gamma_nv, "gamma_nv");
  Cooperativity out;
  out.c = lambda * lambda / (gamma_m * gamma_nv);
  const double lambda_eff = lambda * std::exp(r) / 2.0;
  out.c_s = lambda_eff * lambda_eff / (gamma_m * gamma_nv);
  out.ratio = out.c_s / out.c;
  return out;
}

EngineeredDissipation engineered_dissipation(double d_plus, double d_minus, double kappa_c) {
  if (d_plus < 0.0) throw InvalidArgument("D+ must be non-negative");
  require_positive(kappa_c, "kappa_c");
  if (!(d_plus < d_minus)) {
    throw InvalidArgument("D+ >= D-: the reservoir has no squeezed fixed point");
  }
  EngineeredDissipation out;
  out.r_prime = std::atanh(d_plus / d_minus);
  out.gamma_m_s = 4.0 * (d_minus * d_minus - d_plus * d_plus) / kappa_c;
  return out;
}

double to_lambda_units(double rate, double lambda) {
  if (lambda == 0.0) throw InvalidArgument("lambda must be nonzero");
  return rate / std::abs(lambda);
}

}  // namespace spinmech
