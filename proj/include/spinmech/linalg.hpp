#pragma once

#include <Eigen/Dense>
#include <complex>

namespace spinmech {

using cplx = std::complex<double>;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};

/// Kronecker product of two dense matrices (row-major block layout, a is the outer factor).
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> kron(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(),
                                                            a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

template <typename DerivedA, typename DerivedB>
auto commutator(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  return (a * b - b * a).eval();
}

/// Max elementwise |A - A^dagger|.
template <typename Derived>
double hermiticity_defect(const Eigen::MatrixBase<Derived>& a) {
  if (a.rows() == 0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

/// Largest singular value.
template <typename Derived>
double spectral_norm(const Eigen::MatrixBase<Derived>& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>>
      svd(a.eval());
  return svd.singularValues()(0);
}

/// exp(A) by scaling-and-squaring with Pade approximants (general square matrix).
MatrixXc expm_pade(const MatrixXc& a);

/// exp(-i * h * t) for Hermitian h via eigendecomposition.
MatrixXc expm_hermitian(const MatrixXc& h, double t = 1.0);

/// exp(g) for anti-Hermitian g (g = -i k, k Hermitian) via eigendecomposition.
MatrixXc expm_antihermitian(const MatrixXc& g);

}  // namespace spinmech
