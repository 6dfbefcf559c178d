#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "spinmech/dynamics.hpp"
#include "spinmech/errors.hpp"
#include "spinmech/transforms.hpp"

using namespace spinmech;

TEST_CASE("squeeze operator") {
  CHECK((squeeze_operator(0.0, 6).unitary.matrix() - MatrixXc::Identity(7, 7)).norm() < 1e-14);

  // The truncated generator reaches far into the ladder, so interior rows need a wide margin.
  const double r = 0.5;
  const int n_max = 120;
  const MatrixXc u = squeeze_operator(r, n_max).unitary.matrix();
  const MatrixXc a = oracle::destroy(n_max);
  const MatrixXc lhs = u.adjoint() * a * u;
  const MatrixXc rhs = std::cosh(r) * a - std::sinh(r) * a.adjoint();
  CHECK((lhs - rhs).topLeftCorner(20, 20).cwiseAbs().maxCoeff() < 1e-6);

  // Squeezed vacuum: c_{2m} = (-tanh r)^m sqrt((2m)!) / (2^m m! sqrt(cosh r))
  const VectorXc sv = u.col(0);
  double n_mean = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    n_mean += n * std::norm(sv(n));
    if (n % 2) {
      CHECK(std::abs(sv(n)) < 1e-12);
    } else if (n <= 20) {
      const int m = n / 2;
      const double c = std::pow(-std::tanh(r), m) * std::exp(0.5 * std::lgamma(n + 1.0) - m * std::log(2.0) -
                                                             std::lgamma(m + 1.0)) / std::sqrt(std::cosh(r));
      CHECK(std::abs(sv(n).real() - c) < 1e-9);
    }
  }
  CHECK(n_mean == doctest::Approx(std::sinh(r) * std::sinh(r)).epsilon(1e-8));
  CHECK_THROWS_AS(squeeze_operator(2.5, 8), TruncationError);
}

TEST_CASE("conjugation preserves spectra") {
  std::mt19937_64 rng(1);
  const SpaceSignature sig = SpaceSignature::boson_spins(5, 1);
  const Operator h(sig, oracle::random_hermitian(sig.total(), rng));
  const FrameTransform id{Operator::identity(sig), "id"};
  CHECK((conjugate(h, id).matrix() - h.matrix()).norm() == 0.0);
  const Operator g = conjugate(h, polaron_transform({0.2}, sig));
  Eigen::SelfAdjointEigenSolver<MatrixXc> e1(h.matrix()), e2(g.matrix());
  CHECK((e1.eigenvalues() - e2.eigenvalues()).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((polaron_transform({0.0}, sig).unitary.matrix() - MatrixXc::Identity(12, 12)).norm() < 1e-14);
}

TEST_CASE("polaron elimination of the single-spin Rabi model") {
  // With delta_dg = 0 the polaron frame removes the coupling exactly, leaving
  // Delta_m a^dag a - lambda_eff^2 / Delta_m. The effective model as built carries
  // +lambda_eff^2 / Delta_m for the j = k term, so its residual is 2 lambda_eff^2 / Delta_m.
  for (double dm : {5.0, 10.0}) {
    const ModelParams p = ModelParams::homogeneous(1, dm, 0.0, 24);
    const SchriefferWolffReport rep = schrieffer_wolff_check(p, 4);
    const double shift = 0.25 / dm;
    CHECK(rep.eta == doctest::Approx(0.5 / dm));
    CHECK(rep.residual == doctest::Approx(2.0 * shift).epsilon(1e-10));
    CHECK(rep.residual_half == doctest::Approx(0.5 * shift).epsilon(1e-10));
    CHECK(rep.ratio == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(rep.residual_flipped < 1e-12);
  }
  const ModelParams zero = ModelParams::homogeneous(1, 5.0, 0.0, 8, 0.0);
  CHECK(schrieffer_wolff_check(zero, 2).residual == doctest::Approx(0.0));
  CHECK_THROWS_AS(schrieffer_wolff_check(ModelParams::homogeneous(1, 1.0, 0.0, 8), 4), InvalidArgument);
}

TEST_CASE("polaron pair coefficient for two spins") {
  // Vacuum-block sx sx coefficient of U H U^dag: independent closed form -2 l1 l2 / Delta_m.
  for (double dm : {10.0, 20.0}) {
    ModelParams p = ModelParams::homogeneous(2, dm, 0.0, 20);
    p.lambda_j = {1.0, 0.9};
    const SchriefferWolffReport rep = schrieffer_wolff_check(p, 3);
    const double l1 = 0.5, l2 = 0.45;
    CHECK(rep.pair_coefficient == doctest::Approx(-2.0 * l1 * l2 / dm).epsilon(1e-9));
    CHECK(rep.residual_flipped < 1e-11);
  }
}

TEST_CASE("coherent states") {
  CHECK((coherent_ket(0.0, 5) - fock_ket(5, 0)).norm() < 1e-15);
  const cplx alpha(1.2, -0.7);
  const QuantumState s = coherent_state(alpha, 30);
  CHECK(std::abs(s.expectation(fock_annihilation(30)) - alpha) < 1e-8);
  CHECK(s.expectation(fock_number(30)).real() == doctest::Approx(std::norm(alpha)).epsilon(1e-8));
  CHECK_THROWS_AS(coherent_state(3.0, 10), TruncationError);
}

TEST_CASE("cat amplitude") {
  const SqueezeSchedule flat = SqueezeSchedule::constant(0.4);
  CHECK(cat_alpha(1.0, 3.0, flat, 0.0) == cplx(0.0));
  const double dm = 3.0 / std::cosh(0.8);
  for (double t : {0.3, 1.7, 6.0}) {
    const cplx want = (std::exp(0.4) / (2.0 * kI)) * (1.0 - std::exp(-kI * dm * t)) / (kI * dm);
    CHECK(std::abs(cat_alpha(1.0, 3.0, flat, t) - want) < 1e-10);
  }
}

TEST_CASE("ramped displacement follows the Rabi evolution") {
  // <a sx> of the evolved state equals alpha exactly for the adiabatic-frame Rabi model
  // started in |0>|g>, because the state stays a +-alpha cat with sx eigenbranches.
  const SqueezeSchedule ramp = SqueezeSchedule::tanh_ramp(1.25, 1.0);
  const int n_max = 20;
  ModelParams p = ModelParams::homogeneous(1, 10.0, 0.0, n_max);
  const SpaceSignature sig = p.signature();
  const TimeDependentHamiltonian h = build_time_dependent(p, ramp, sig, FrameModel::kIdeal);
  const auto psi0 = product_state(sig, {fock_ket(n_max, 0), spin_ket(false)});
  IntegratorOptions o;
  o.rtol = 1e-10;
  o.atol = 1e-12;
  const Trajectory tr = evolve_unitary(h, psi0, {0.0, 5.0},
                                       {{"ax", boson_annihilation(sig) * spin_operator(PauliAxis::kX, 0, sig)}}, o);
  const cplx alpha = cat_alpha(1.0, 10.0, ramp, 5.0);
  CHECK(std::abs(tr.values("ax").back() - alpha) / std::abs(alpha) < 0.02);
  CHECK(std::abs(tr.values("ax").back() - alpha) < 1e-6);
}

TEST_CASE("cat target") {
  const QuantumState zero = target_cat_state(0.0, 6);
  const VectorXc want = kron(fock_ket(6, 0), spin_ket(false));
  CHECK(std::abs(std::abs(want.dot(zero.psi())) - 1.0) < 1e-14);
  const cplx alpha(3.0, 0.0);
  const VectorXc a = coherent_ket(alpha, 60), b = coherent_ket(-alpha, 60);
  CHECK(std::abs(a.dot(b)) == doctest::Approx(std::exp(-2.0 * 9.0)).epsilon(1e-6));
  CHECK(std::exp(-18.0) < 1e-7);
  const QuantumState big = target_cat_state(alpha, 60);
  const MatrixXc ax = (boson_annihilation(big.signature()) * spin_operator(PauliAxis::kX, 0, big.signature())).matrix();
  CHECK((ax * big.psi() - alpha * big.psi()).norm() < 1e-7);
}

TEST_CASE("GHZ target") {
  const QuantumState g = ghz_target(2);
  CHECK(g.psi().norm() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g.psi()(3) == std::exp(-kI * (std::numbers::pi / 4.0)) / std::sqrt(2.0));
  CHECK(g.psi()(0) == std::exp(kI * (std::numbers::pi / 4.0)) / std::sqrt(2.0));
  CHECK((partial_trace(g, {0}).rho() - MatrixXc::Identity(2, 2) / 2.0).norm() < 1e-15);
  CHECK_THROWS_AS(ghz_target(1), InvalidArgument);
}
