#include "doctest.h"

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "spinmech/errors.hpp"
#include "spinmech/hilbert.hpp"
#include "spinmech/linalg.hpp"

using namespace spinmech;

TEST_CASE("ladder operators act on Fock kets") {
  const MatrixXc a = fock_annihilation(2).matrix();
  CHECK((a * fock_ket(2, 1) - fock_ket(2, 0)).norm() < 1e-15);
  CHECK((a * fock_ket(2, 2) - std::sqrt(2.0) * fock_ket(2, 1)).norm() < 1e-15);
  CHECK((fock_number(4).matrix() - a.adjoint() * a).norm() < 1e-15);
}

TEST_CASE("truncated commutator [a, a^dag] differs from identity in the last entry") {
  const MatrixXc a = fock_annihilation(5).matrix();
  MatrixXc expected = MatrixXc::Identity(6, 6);
  expected(5, 5) = -5.0;
  CHECK((commutator(a, a.adjoint()) - expected).norm() < 1e-13);
}

TEST_CASE("pauli matrices in the (d, g) basis") {
  const VectorXc d = spin_ket(true), g = spin_ket(false);
  CHECK((pauli(PauliAxis::kZ).matrix() * d - d).norm() < 1e-15);
  CHECK((pauli(PauliAxis::kPlus).matrix() * g - d).norm() < 1e-15);
  CHECK((pauli(PauliAxis::kMinus).matrix() * d - g).norm() < 1e-15);
  const MatrixXc x = pauli(PauliAxis::kX).matrix();
  CHECK((x * x - MatrixXc::Identity(2, 2)).norm() < 1e-15);
  CHECK((pauli(PauliAxis::kY).matrix() - oracle::sy()).norm() < 1e-15);
  CHECK(d(kSpinD) == cplx(1.0));
  CHECK(g(kSpinG) == cplx(1.0));
}

TEST_CASE("embed places a local operator at its slot") {
  const SpaceSignature sig({3, 2});
  const QuantumState s = product_state(sig, {fock_ket(2, 0), spin_ket(false)});
  const VectorXc out = embed(pauli(PauliAxis::kZ), 1, sig).matrix() * s.psi();
  CHECK((out + s.psi()).norm() < 1e-15);

  const SpaceSignature big({3, 2, 2});
  CHECK((embed(Operator::identity(SpaceSignature({2})), 2, big).matrix() -
         MatrixXc::Identity(12, 12)).norm() == 0.0);

  const MatrixXc prod = (embed(fock_annihilation(2), 0, sig) * embed(pauli(PauliAxis::kPlus), 1, sig)).matrix();
  CHECK((prod - oracle::kron(oracle::destroy(2), pauli(PauliAxis::kPlus).matrix())).norm() < 1e-15);

  CHECK_THROWS_AS(embed(pauli(PauliAxis::kZ), 0, sig), InvalidDimension);
  CHECK_THROWS_AS(embed(pauli(PauliAxis::kZ), 4, sig), InvalidArgument);
}

TEST_CASE("collective spin operators") {
  CHECK((collective_spin(SpinAxis::kX, 1).matrix() - oracle::sx()).norm() < 1e-15);
  const QuantumState gg = all_ground_spins(2);
  CHECK(gg.expectation(collective_spin(SpinAxis::kZ, 2)).real() == doctest::Approx(-2.0));

  const auto half = SpinConvention::kHalfSum;
  const MatrixXc jx = collective_spin(SpinAxis::kX, 3, half).matrix();
  const MatrixXc jy = collective_spin(SpinAxis::kY, 3, half).matrix();
  const MatrixXc jz = collective_spin(SpinAxis::kZ, 3, half).matrix();
  CHECK((jx * jy - jy * jx - kI * jz).norm() < 1e-13);
  const MatrixXc px = collective_spin(SpinAxis::kX, 3).matrix();
  const MatrixXc py = collective_spin(SpinAxis::kY, 3).matrix();
  CHECK((px * py - py * px - 2.0 * kI * collective_spin(SpinAxis::kZ, 3).matrix()).norm() < 1e-13);
}

TEST_CASE("partial trace") {
  const SpaceSignature two = SpaceSignature::spins(2);
  VectorXc bell = VectorXc::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  const QuantumState phi = QuantumState::vector(two, bell);
  CHECK((partial_trace(phi, {0}).rho() - MatrixXc::Identity(2, 2) / 2.0).norm() < 1e-15);

  std::mt19937_64 rng(7);
  const MatrixXc ra = oracle::random_density(3, rng), rb = oracle::random_density(2, rng);
  const QuantumState prod = QuantumState::density(SpaceSignature({3, 2}), oracle::kron(ra, rb));
  CHECK((partial_trace(prod, {0}).rho() - ra).norm() < 1e-13);
  CHECK((partial_trace(prod, {1}).rho() - rb).norm() < 1e-13);

  // direct summation over the traced indices of a random pure 3-subsystem state
  const SpaceSignature sig({3, 2, 2});
  const VectorXc psi = oracle::random_ket(12, rng);
  const QuantumState s = QuantumState::vector(sig, psi);
  MatrixXc expected = MatrixXc::Zero(3, 2);
  MatrixXc r02 = MatrixXc::Zero(6, 6);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 2; ++k)
      for (int i2 = 0; i2 < 3; ++i2)
        for (int k2 = 0; k2 < 2; ++k2)
          for (int j = 0; j < 2; ++j)
            r02(i * 2 + k, i2 * 2 + k2) += psi(i * 4 + j * 2 + k) * std::conj(psi(i2 * 4 + j * 2 + k2));
  const QuantumState red = partial_trace(s, {0, 2});
  CHECK((red.rho() - r02).norm() < 1e-13);
  CHECK(std::abs(red.rho().trace() - 1.0) < 1e-13);
}

TEST_CASE("state invariants are enforced") {
  const SpaceSignature one = SpaceSignature::spins(1);
  CHECK_THROWS_AS(QuantumState::vector(one, VectorXc::Ones(2)), InvalidState);
  MatrixXc bad = MatrixXc::Zero(2, 2);
  bad(0, 0) = 1.5;
  bad(1, 1) = -0.5;
  CHECK_THROWS_AS(QuantumState::density(one, bad), InvalidState);
  CHECK_THROWS_AS(QuantumState::vector(one, VectorXc::Ones(3).normalized()), InvalidDimension);
  CHECK_THROWS_AS(Operator(one, MatrixXc::Identity(3, 3)), InvalidDimension);
  CHECK_THROWS_AS(SpaceSignature({2, 0}), InvalidDimension);
}

TEST_CASE("matrix exponentials agree with a Taylor-series oracle") {
  std::mt19937_64 rng(11);
  const MatrixXc h = oracle::random_hermitian(6, rng);
  const MatrixXc ref = oracle::expm_taylor(-kI * 0.7 * h);
  CHECK((expm_hermitian(h, 0.7) - ref).norm() < 1e-11);
  CHECK((expm_antihermitian(-kI * 0.7 * h) - ref).norm() < 1e-11);
  CHECK((expm_pade(-kI * 0.7 * h) - ref).norm() < 1e-11);

  MatrixXc general(3, 3);
  general << 0.1, 2.0, 0.0, -1.0, 0.3, 0.5, 0.0, 0.2, -0.4;
  CHECK((expm_pade(general) - oracle::expm_taylor(general)).norm() < 1e-11);
}

TEST_CASE("kron and norms on small matrices") {
  std::mt19937_64 rng(3);
  const MatrixXc a = oracle::random_hermitian(2, rng), b = oracle::random_hermitian(3, rng);
  CHECK((kron(a, b) - oracle::kron(a, b)).norm() < 1e-15);
  CHECK(hermiticity_defect(a) < 1e-15);
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(a);
  CHECK(spectral_norm(a) == doctest::Approx(es.eigenvalues().cwiseAbs().maxCoeff()).epsilon(1e-12));
}
