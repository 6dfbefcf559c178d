#pragma once

#include <Eigen/Dense>

#include "spinmech/hilbert.hpp"

namespace spinmech {

/// F = sqrt(<psi_T| rho |psi_T>) for a pure target.
double fidelity(const QuantumState& state, const QuantumState& target);

/// Wootters concurrence of a two-qubit density matrix.
double concurrence(const QuantumState& state);
double concurrence(const MatrixXc& rho);

struct SqueezingReport {
  Eigen::Vector3d mean_spin_direction = Eigen::Vector3d::Zero();
  double spin_length = 0.0;  ///< |<J>| / (N/2)
  double xi_s_sq = 0.0;      ///< 4 min_perp Var(J_perp) / N
  double xi_r_sq = 0.0;      ///< N min_perp Var(J_perp) / |<J>|^2
  double gain = 0.0;         ///< 1 / xi_r_sq
  double optimal_beta = 0.0; ///< angle in the (n1, n2) plane of minimal variance
  double var_n1 = 0.0;
  double var_n2 = 0.0;
  double cov_n1n2 = 0.0;
};

/// Kitagawa-Ueda / Wineland squeezing of an N-spin state, half-sum J = sum sigma / 2.
/// Throws InvalidState when |<J>| < 1e-8 N / 2.
SqueezingReport spin_squeezing(const QuantumState& state);

/// Variance of cos(beta) J_n1 + sin(beta) J_n2 for the perpendicular basis of `report`.
double perpendicular_variance(const SqueezingReport& report, double beta);

}  // namespace spinmech
