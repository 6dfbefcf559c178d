#include "spinmech/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace spinmech {

MatrixXc expm_pade(const MatrixXc& a) { return a.exp(); }

MatrixXc expm_hermitian(const MatrixXc& h, double t) {
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(h);
  const Eigen::VectorXd& w = es.eigenvalues();
  VectorXc phase(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) phase(i) = std::exp(-kI * w(i) * t);
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

MatrixXc expm_antihermitian(const MatrixXc& g) {
  // g = -i k  =>  exp(g) = exp(-i k)
  const MatrixXc k = kI * g;
  return expm_hermitian(0.5 * (k + k.adjoint()), 1.0);
}

}  // namespace spinmech
