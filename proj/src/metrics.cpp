#include "spinmech/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "spinmech/errors.hpp"

namespace spinmech {

double fidelity(const QuantumState& state, const QuantumState& target) {
  require_same_signature(state.signature(), target.signature(), "fidelity");
  if (!target.is_vector()) throw InvalidState("fidelity target must be a pure state vector");
  const VectorXc& t = target.psi();
  double pop = 0.0;
  if (state.is_vector()) {
    pop = std::norm(t.dot(state.psi()));
  } else {
    pop = t.dot(state.rho() * t).real();
  }
  return std::sqrt(std::clamp(pop, 0.0, 1.0));
}

double concurrence(const MatrixXc& rho) {
  if (rho.rows() != 4 || rho.cols() != 4) {
    throw InvalidDimension("concurrence needs a 4x4 two-qubit density matrix");
  }
  Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
  yy(0, 3) = yy(3, 0) = -1.0;
  yy(1, 2) = yy(2, 1) = 1.0;
  const Eigen::Matrix4cd r = rho;
  const Eigen::Matrix4cd tilde = yy * r.conjugate() * yy;

  // eigenvalues of sqrt(sqrt(rho) rho~ sqrt(rho))
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(0.5 * (r + r.adjoint()));
  const Eigen::Vector4d ev = es.eigenvalues().cwiseMax(0.0);
  const Eigen::Matrix4cd sqrt_rho =
      es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
  const Eigen::Matrix4cd m = sqrt_rho * tilde * sqrt_rho;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> em(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  Eigen::Vector4d mu = em.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  std::sort(mu.data(), mu.data() + 4, std::greater<>());
  return std::max(0.0, mu(0) - mu(1) - mu(2) - mu(3));
}

double concurrence(const QuantumState& state) {
  if (state.signature() != SpaceSignature::spins(2)) {
    throw InvalidDimension("concurrence needs a two-qubit state");
  }
  return concurrence(state.density_matrix());
}

SqueezingReport spin_squeezing(const QuantumState& state) {
  const auto& dims = state.signature().dims();
  const int n = static_cast<int>(dims.size());
  if (n < 2 || std::any_of(dims.begin(), dims.end(), [](int d) { return d != 2; })) {
    throw InvalidDimension("spin_squeezing needs a spins-only state with N >= 2");
  }
  const Operator jx = collective_spin(SpinAxis::kX, n, SpinConvention::kHalfSum);
  const Operator jy = collective_spin(SpinAxis::kY, n, SpinConvention::kHalfSum);
  const Operator jz = collective_spin(SpinAxis::kZ, n, SpinConvention::kHalfSum);

  const Eigen::Vector3d mean(state.expectation(jx).real(), state.expectation(jy).real(),
                             state.expectation(jz).real());
  const double length = mean.norm();
  if (length < 1e-8 * n / 2.0) {
    throw InvalidState("mean spin vanishes; squeezing direction undefined");
  }
  SqueezingReport rep;
  rep.mean_spin_direction = mean / length;
  rep.spin_length = length / (n / 2.0);

  const double theta = std::acos(std::clamp(rep.mean_spin_direction.z(), -1.0, 1.0));
  const double phi = std::atan2(rep.mean_spin_direction.y(), rep.mean_spin_direction.x());
  const Eigen::Vector3d n1(-std::sin(phi), std::cos(phi), 0.0);
  const Eigen::Vector3d n2(std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi),
                           -std::sin(theta));

  const Operator j1 = n1.x() * jx + n1.y() * jy + n1.z() * jz;
  const Operator j2 = n2.x() * jx + n2.y() * jy + n2.z() * jz;
  const double m1 = state.expectation(j1).real();
  const double m2 = state.expectation(j2).real();
  const double s11 = state.expectation(j1 * j1).real();
  const double s22 = state.expectation(j2 * j2).real();
  const double s12 = 0.5 * state.expectation(j1 * j2 + j2 * j1).real();
  rep.var_n1 = s11 - m1 * m1;
  rep.var_n2 = s22 - m2 * m2;
  rep.cov_n1n2 = s12 - m1 * m2;

  // min_beta Var(cos b J1 + sin b J2) = [A - sqrt(B^2 + 4 Cov^2)] / 2
  const double a = rep.var_n1 + rep.var_n2;
  const double b = rep.var_n1 - rep.var_n2;
  const double min_var = 0.5 * (a - std::sqrt(b * b + 4.0 * rep.cov_n1n2 * rep.cov_n1n2));
  rep.optimal_beta = 0.5 * std::atan2(-2.0 * rep.cov_n1n2, -b);

  rep.xi_s_sq = 4.0 * min_var / n;
  rep.xi_r_sq = rep.xi_s_sq * std::pow(n / (2.0 * length), 2);
  rep.gain = 1.0 / rep.xi_r_sq;
  return rep;
}

double perpendicular_variance(const SqueezingReport& report, double beta) {
  const double c = std::cos(beta), s = std::sin(beta);
  return c * c * report.var_n1 + s * s * report.var_n2 + 2.0 * c * s * report.cov_n1n2;
}

}  // namespace spinmech
