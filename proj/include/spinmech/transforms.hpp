#pragma once

#include <string>
#include <vector>

#include "spinmech/hilbert.hpp"
#include "spinmech/models.hpp"

namespace spinmech {

struct FrameTransform {
  Operator unitary;
  std::string label;
};

/// U_s(r) = exp[r (a^2 - a^dag^2) / 2] on a single mode with n_max + 1 levels.
/// Warns when sinh^2 r > n_max / 4; throws TruncationError when sinh^2 r > n_max / 2.
FrameTransform squeeze_operator(double r, int n_max);
/// Same, acting on slot 0 of `signature`.
FrameTransform squeeze_operator(double r, const SpaceSignature& signature);

/// U = exp[sum_k eta_k (a^dag - a) sx^k] on a boson_spins signature.
FrameTransform polaron_transform(const std::vector<double>& eta, const SpaceSignature& signature);

/// F H F^dag.
Operator conjugate(const Operator& h, const FrameTransform& frame);

struct SchriefferWolffReport {
  double eta = 0.0;           ///< eta_max at the supplied parameters
  double residual = 0.0;      ///< || U H_Rabi U^dag - (Delta_m a^dag a + H_Ising) || at eta
  double residual_half = 0.0; ///< same with couplings halved (eta / 2)
  double ratio = 0.0;         ///< residual / residual_half
  /// Residuals against Delta_m a^dag a with the Ising couplings sign-flipped.
  double residual_flipped = 0.0;
  double residual_flipped_half = 0.0;
  /// sx^1 sx^2 coefficient of the conjugated Hamiltonian in the phonon vacuum (N >= 2).
  double pair_coefficient = 0.0;
  int low_levels = 0;         ///< Fock levels kept in the norm
};

/// Polaron-conjugates the multi-spin Rabi Hamiltonian and measures its distance from the
/// phonon-free effective model on the lowest Fock levels (n < low_levels).
SchriefferWolffReport schrieffer_wolff_check(const ModelParams& params, int low_levels = 4,
                                             double max_eta = 0.3);

/// Normalized truncated coherent state; throws TruncationError if the discarded
/// population exceeds tail_tolerance.
QuantumState coherent_state(cplx alpha, int n_max, double tail_tolerance = 1e-8);
VectorXc coherent_ket(cplx alpha, int n_max, double tail_tolerance = 1e-8);

/// alpha(t) = (lambda / 2i) int_0^t exp[r(t') - i Gamma(t, t')] dt',
/// Gamma(t, t') = int_{t'}^t Delta_m(t'') dt'', Delta_m(t) = delta_m / cosh 2r(t).
cplx cat_alpha(double lambda, double delta_m, const SqueezeSchedule& schedule, double t,
               double tolerance = 1e-8);

/// (|alpha>|+x> - |-alpha>|-x>) / norm on boson_spins(n_max, 1), |+-x> = (|d> +- |g>)/sqrt2.
QuantumState target_cat_state(cplx alpha, int n_max);

/// (e^{-i pi/4}|g...g> + e^{i pi/4}|d...d>) / sqrt2 over N spins.
QuantumState ghz_target(int n_spins);

}  // namespace spinmech
