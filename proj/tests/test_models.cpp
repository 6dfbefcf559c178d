#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "spinmech/device.hpp"
#include "spinmech/errors.hpp"
#include "spinmech/models.hpp"
#include "spinmech/transforms.hpp"

using namespace spinmech;

TEST_CASE("squeeze parameters from the pump") {
  const ModelParams none = ModelParams::homogeneous(1, 3.0, 0.0, 4);
  const SqueezeParams s0 = derive_squeeze_params(none);
  CHECK(s0.r == 0.0);
  CHECK(s0.delta_m_eff == 3.0);
  CHECK(s0.lambda_eff[0] == 0.5);

  const ModelParams p = ModelParams::homogeneous(1, 2.0, 2.0 * std::tanh(2.0), 4);
  const SqueezeParams s1 = derive_squeeze_params(p);
  CHECK(s1.r == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s1.delta_m_eff == doctest::Approx(2.0 / std::cosh(2.0)).epsilon(1e-14));

  CHECK(pump_for_squeezing(7.0, 0.8) / 7.0 == doctest::Approx(std::tanh(1.6)));
  CHECK(delta_m_for_effective(20.0, 1.25) == doctest::Approx(20.0 * std::cosh(2.5)));

  const double r5 = 5.0;
  const ModelParams big = ModelParams::homogeneous(1, 1.0, std::tanh(2.0 * r5), 4);
  // atanh near 1 loses digits: tanh(10) = 1 - 4e-9
  CHECK(derive_squeeze_params(big).lambda_eff[0] == doctest::Approx(std::exp(5.0) / 2.0).epsilon(1e-6));
}

TEST_CASE("pump at or above threshold is an instability") {
  CHECK_THROWS_AS(ModelParams::homogeneous(1, 1.0, 1.0, 4).validate(), InstabilityError);
  CHECK_THROWS_AS(derive_squeeze_params(ModelParams::homogeneous(1, 1.0, -1.2, 4)), InstabilityError);
  ModelParams bad = ModelParams::homogeneous(2, 1.0, 0.0, 4);
  bad.lambda_j = {1.0};
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("Lamb-Dicke parameter") {
  const ModelParams p = ModelParams::homogeneous(1, 10.0, 0.0, 4);
  CHECK(lamb_dicke_eta(derive_squeeze_params(p), p).eta_max == doctest::Approx(0.05));

  const double r = 1.25, dm = 60.0;
  const ModelParams q = ModelParams::homogeneous(1, dm, pump_for_squeezing(dm, r), 4);
  const LambDickeReport ld = lamb_dicke_eta(derive_squeeze_params(q), q);
  const double exact = (std::exp(r) / 2.0) / (dm / std::cosh(2.0 * r));
  CHECK(ld.eta_max == doctest::Approx(exact).epsilon(1e-12));
  CHECK(ld.approximation == doctest::Approx(std::exp(3.0 * r) / (4.0 * dm)).epsilon(1e-12));
  CHECK(ld.eta_max > 0.17);
  CHECK(ld.valid);

  // On the boundary curve the exact eta equals the requested value.
  for (double eta : {0.1, 0.2}) {
    for (double rb : {0.0, 1.0, 2.5}) {
      const double d = lamb_dicke_boundary(rb, eta);
      CHECK((std::exp(rb) / 2.0) * std::cosh(2.0 * rb) / d == doctest::Approx(eta).epsilon(1e-12));
    }
  }
}

TEST_CASE("dressed states diagonalise the driven triplet") {
  const DressedStates none = dressed_states(0.0, 1.3);
  CHECK(none.theta == 0.0);
  const DressedStates res = dressed_states(0.4, 0.0);
  CHECK(res.theta == doctest::Approx(-std::numbers::pi / 4.0));
  CHECK(std::abs(res.omega_e - res.omega_g) == doctest::Approx(std::sqrt(2.0) * 0.4));

  for (auto [om, de] : {std::pair{0.3, 0.7}, {1.1, -0.4}, {0.05, 2.0}}) {
    const DressedStates ds = dressed_states(om, de);
    const MatrixXc basis = dressed_basis(ds.theta);
    Eigen::VectorXcd w(3);
    w << ds.omega_g, ds.omega_d, ds.omega_e;
    const MatrixXc rebuilt = basis * w.asDiagonal() * basis.adjoint();
    CHECK((rebuilt - nv_driven_hamiltonian(om, de)).norm() < 1e-12);
    CHECK(ds.omega_d == doctest::Approx(-de));
  }
}

TEST_CASE("total Hamiltonian without pump conserves excitations") {
  ModelParams p = ModelParams::homogeneous(1, 1.3, 0.0, 6);
  p.delta_dg = {0.9};
  const SpaceSignature sig = p.signature();
  const Operator h = build_total_hamiltonian(p, sig);
  const Operator nexc = boson_number(sig) +
                        embed(pauli(PauliAxis::kPlus) * pauli(PauliAxis::kMinus), 1, sig);
  CHECK(commutator(h, nexc).matrix().norm() < 1e-12);
  CHECK(h.is_hermitian(1e-12));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  ModelParams q = ModelParams::homogeneous(3, 4.0, 1.5, 5);
  for (auto& d : q.delta_dg) d = u(rng);
  for (auto& l : q.lambda_j) l = u(rng);
  const SqueezeParams sq = derive_squeeze_params(q);
  CHECK(build_total_hamiltonian(q, q.signature()).is_hermitian(1e-12));
  CHECK(build_squeezed_rabi(q, sq, q.signature()).is_hermitian(1e-12));
  CHECK(build_correction(q, sq, q.signature()).is_hermitian(1e-12));
}

TEST_CASE("squeezed-frame Rabi model") {
  // decoupled limit: ground energy -delta_dg / 2
  ModelParams p = ModelParams::homogeneous(1, 2.0, 0.0, 6, 0.0);
  p.delta_dg = {0.8};
  const SqueezeParams sq = derive_squeeze_params(p);
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(build_squeezed_rabi(p, sq, p.signature()).matrix());
  CHECK(es.eigenvalues()(0) == doctest::Approx(-0.4));

  // parity exp(i pi [n + sum (sz + 1)/2]) commutes when delta_dg = 0
  const ModelParams q = ModelParams::homogeneous(2, 3.0, 1.0, 6);
  const SpaceSignature sig = q.signature();
  const Operator h = build_squeezed_rabi(q, derive_squeeze_params(q), sig);
  MatrixXc gen = boson_number(sig).matrix();
  for (int j = 0; j < 2; ++j)
    gen += 0.5 * (spin_operator(PauliAxis::kZ, j, sig).matrix() + MatrixXc::Identity(sig.total(), sig.total()));
  const MatrixXc parity = oracle::expm_taylor(kI * std::numbers::pi * gen);
  CHECK((parity * h.matrix() - h.matrix() * parity).norm() < 1e-9);
}

TEST_CASE("correction term scaling") {
  const ModelParams p0 = ModelParams::homogeneous(1, 5.0, 0.0, 10);
  const SpaceSignature sig = p0.signature();
  const SqueezeParams s0 = derive_squeeze_params(p0);
  const Operator coupling = build_squeezed_rabi(p0, s0, sig) - 5.0 * boson_number(sig);
  const double corr0 = spectral_norm(build_correction(p0, s0, sig).matrix());
  CHECK(corr0 == doctest::Approx(spectral_norm(coupling.matrix())).epsilon(1e-12));

  const ModelParams p1 = ModelParams::homogeneous(1, 5.0, pump_for_squeezing(5.0, 2.0), 10);
  const double corr1 = spectral_norm(build_correction(p1, derive_squeeze_params(p1), sig).matrix());
  CHECK(corr1 / corr0 == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("squeeze-conjugated total Hamiltonian equals Rabi plus correction") {
  for (double r : {0.0, 0.3, 0.6}) {
    const int n_max = 120;
    ModelParams p = ModelParams::homogeneous(1, 2.0, pump_for_squeezing(2.0, r), n_max);
    p.delta_dg = {0.7};
    const SpaceSignature sig = p.signature();
    const SqueezeParams sq = derive_squeeze_params(p);
    const MatrixXc lhs = conjugate(build_total_hamiltonian(p, sig), squeeze_operator(r, sig)).matrix();
    const MatrixXc rhs = (build_squeezed_rabi(p, sq, sig) + build_correction(p, sq, sig)).matrix();
    // remove the constant (vacuum energy) shift and compare the low interior block
    const Eigen::Index k = 2 * 12;
    MatrixXc diff = (lhs - rhs).topLeftCorner(k, k);
    const cplx shift = diff.trace() / static_cast<double>(k);
    diff -= shift * MatrixXc::Identity(k, k);
    CHECK(diff.cwiseAbs().maxCoeff() < 1e-6);
    const double expected_shift = (2.0 / std::cosh(2.0 * r) - 2.0) / 2.0;
    CHECK(shift.real() == doctest::Approx(expected_shift).epsilon(1e-6));
  }
}

TEST_CASE("Ising and OAT couplings") {
  for (double r : {0.0, 0.4, 1.3}) {
    const double dm = 3.0;
    const ModelParams p = ModelParams::homogeneous(2, dm, pump_for_squeezing(dm, r), 2);
    const SqueezeParams sq = derive_squeeze_params(p);
    const double lam = sq.lambda_eff[0] * sq.lambda_eff[1] / sq.delta_m_eff;
    CHECK(lam == doctest::Approx(oat_coupling(r, dm)).epsilon(1e-12));
    CHECK(ising_couplings(sq)(0, 1) == doctest::Approx(lam).epsilon(1e-14));
  }
  CHECK(oat_coupling(0.0, 2.0) == doctest::Approx(1.0 / 8.0));
  CHECK(oat_coupling(1.33, 1.0) / oat_coupling(0.0, 1.0) > 100.0);

  const double lam = 0.3;
  const SpaceSignature two = SpaceSignature::spins(2);
  const MatrixXc expected = lam * (2.0 * MatrixXc::Identity(4, 4) +
                                   2.0 * oracle::kron(oracle::sx(), oracle::sx()));
  CHECK((build_oat(lam, 2).matrix() - expected).norm() < 1e-14);

  for (int n : {3, 4, 5}) {
    const Operator h = build_oat(lam, n);
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(h.matrix());
    std::vector<double> expected_levels;
    for (int m = -n; m <= n; m += 2) expected_levels.push_back(lam * m * m);
    for (double e : es.eigenvalues()) {
      double best = 1e9;
      for (double x : expected_levels) best = std::min(best, std::abs(e - x));
      CHECK(best < 1e-10);
    }
    const MatrixXc jx = collective_spin(SpinAxis::kX, n).matrix();
    CHECK((h.matrix() * jx - jx * h.matrix()).norm() < 1e-11);
  }

  ModelParams q = ModelParams::homogeneous(2, 3.0, 0.0, 2);
  q.delta_dg = {0.5, -0.2};
  const Operator hi = build_ising(q, derive_squeeze_params(q));
  CHECK(hi.signature() == SpaceSignature::spins(2));
  const double l0 = 0.25 / 3.0;
  const MatrixXc want = l0 * (2.0 * MatrixXc::Identity(4, 4) + 2.0 * oracle::kron(oracle::sx(), oracle::sx())) +
                        0.25 * oracle::kron(oracle::sz(), MatrixXc::Identity(2, 2)) -
                        0.1 * oracle::kron(MatrixXc::Identity(2, 2), oracle::sz());
  CHECK((hi.matrix() - want).norm() < 1e-13);
}

TEST_CASE("time-dependent frame Hamiltonians") {
  const ModelParams p = ModelParams::homogeneous(1, 10.0, 0.0, 6);
  const SpaceSignature sig = p.signature();
  const SqueezeSchedule flat = SqueezeSchedule::constant(0.0);
  const TimeDependentHamiltonian full = build_time_dependent(p, flat, sig, FrameModel::kFull);
  const SqueezeParams s0 = derive_squeeze_params(p);
  const MatrixXc want = (build_squeezed_rabi(p, s0, sig) + build_correction(p, s0, sig)).matrix();
  CHECK((full.at(0.0).matrix() - want).norm() < 1e-12);
  CHECK((full.at(3.7).matrix() - want).norm() < 1e-12);

  const SqueezeSchedule ramp = SqueezeSchedule::tanh_ramp(1.25, 1.0);
  const TimeDependentHamiltonian h = build_time_dependent(p, ramp, sig, FrameModel::kFull);
  const TimeDependentHamiltonian ideal = build_time_dependent(p, ramp, sig, FrameModel::kIdeal);
  for (double t : {0.0, 0.4, 1.0, 2.5, 5.0}) {
    const double r = ramp.value(t);
    CHECK(r == doctest::Approx(1.25 * std::tanh(t / 2.0)));
    CHECK(ramp.derivative(t) == doctest::Approx(1.25 / (2.0 * std::pow(std::cosh(t / 2.0), 2))));
    CHECK(h.at(t).is_hermitian(1e-12));
    ModelParams q = p;
    q.omega_p_amp = pump_for_squeezing(p.delta_m, r);
    const SqueezeParams sq = derive_squeeze_params(q);
    CHECK((ideal.at(t).matrix() - build_squeezed_rabi(q, sq, sig).matrix()).norm() < 1e-10);
    const MatrixXc a = boson_annihilation(sig).matrix();
    const MatrixXc hv = (ramp.derivative(t) / 2.0) * kI * (a * a - a.adjoint() * a.adjoint());
    const MatrixXc want_full = build_squeezed_rabi(q, sq, sig).matrix() + build_correction(q, sq, sig).matrix() + hv;
    CHECK((h.at(t).matrix() - want_full).norm() < 1e-10);
  }
  SqueezeSchedule numeric{[](double t) { return 0.3 * t * t; }, {}};
  CHECK(numeric.derivative(2.0) == doctest::Approx(1.2).epsilon(1e-6));
}

TEST_CASE("interaction-picture Hamiltonian") {
  const SqueezeParams sq{0.5, 40.0, {0.8, 0.8}};
  const SpaceSignature sig = SpaceSignature::boson_spins(4, 2);
  const TimeDependentHamiltonian h = build_interaction_picture(sq, 2, sig);
  const MatrixXc a = boson_annihilation(sig).matrix();
  const MatrixXc jx = (spin_operator(PauliAxis::kX, 0, sig) + spin_operator(PauliAxis::kX, 1, sig)).matrix();
  CHECK((h.at(0.0).matrix() - 0.8 * (a + a.adjoint()) * jx).norm() < 1e-13);
  const double period = 2.0 * std::numbers::pi / 40.0;
  for (double t : {0.01, 0.13, 0.5}) {
    CHECK(h.at(t).is_hermitian(1e-13));
    CHECK((h.at(t).matrix() - h.at(t + period).matrix()).norm() < 1e-11);
  }
  const SqueezeParams uneven{0.5, 40.0, {0.8, 0.9}};
  CHECK_THROWS_AS(build_interaction_picture(uneven, 2, sig), UnsupportedConfiguration);
}

TEST_CASE("device formulas") {
  const DeviceParams d;
  const CantileverParams c = cantilever_params(d);
  CHECK(std::abs(c.omega_m / (2.0 * std::numbers::pi * 11e6) - 1.0) < 0.05);
  CHECK(std::abs(c.z_zpf / 2.14e-13 - 1.0) < 0.02);
  DeviceParams longer = d;
  longer.length *= 2.0;
  CHECK(cantilever_params(longer).omega_m == doctest::Approx(c.omega_m / 4.0).epsilon(1e-12));

  DeviceParams nopump = d;
  nopump.voltage_ac = 0.0;
  CHECK(pump_amplitude(nopump, 2.14e-13).omega_p == 0.0);
  DeviceParams wide = d;
  wide.gap *= 2.0;
  CHECK(pump_amplitude(wide, 2.14e-13).omega_p ==
        doctest::Approx(pump_amplitude(d, 2.14e-13).omega_p / 4.0).epsilon(1e-12));

  CHECK(magnetic_coupling(d, c.z_zpf, 0.0) == 0.0);
  const double lam = magnetic_coupling(d, 2.14e-13, std::numbers::pi / 2.0);
  CHECK(std::abs(lam) / (2.0 * std::numbers::pi) > 50e3);
  CHECK(std::abs(lam) / (2.0 * std::numbers::pi) < 200e3);
  DeviceParams strong = d;
  strong.magnet_gradient *= 3.0;
  CHECK(magnetic_coupling(strong, 2.14e-13, 1.0) == doctest::Approx(3.0 * magnetic_coupling(d, 2.14e-13, 1.0)));

  CHECK(strain_coupling(d, 1.0) == doctest::Approx(2.0 * strain_coupling(d, 0.5)).epsilon(1e-12));
  DeviceParams l2 = d;
  l2.length *= 2.0;
  CHECK(strain_coupling(l2) == doctest::Approx(strain_coupling(d) * std::pow(2.0, -1.5)).epsilon(1e-12));
  // Dimensional check: hbar / (l^3 w sqrt(E rho)) has units of m^2 * (kg m^2 / s) / (m^4 kg / (m^2 s)) = 1.
  const double direct = 2.0 * std::numbers::pi * 180e9 *
                        std::sqrt(si::kHbar / (std::pow(d.length, 3) * d.width *
                                               std::sqrt(d.youngs_modulus * d.density)));
  CHECK(strain_coupling(d, 0.5) == doctest::Approx(direct).epsilon(1e-12));

  CHECK(cooperativity(1.0, 1.0, 1.0, 0.0).ratio == doctest::Approx(0.25));
  CHECK(cooperativity(1.0, 1.0, 1.0, 3.0).ratio == doctest::Approx(std::exp(6.0) / 4.0));
  const double twopi = 2.0 * std::numbers::pi;
  CHECK(cooperativity(twopi * 100e3, twopi * 1e3, 1e3, 5.0).c_s > 1e6);

  CHECK(engineered_dissipation(0.0, 2.0, 4.0).r_prime == 0.0);
  CHECK(engineered_dissipation(0.0, 2.0, 4.0).gamma_m_s == doctest::Approx(4.0));
  const EngineeredDissipation e = engineered_dissipation(std::tanh(1.45), 1.0, 1.0);
  CHECK(e.r_prime == doctest::Approx(1.45));
  CHECK(engineered_dissipation(0.999999, 1.0, 1.0).gamma_m_s < 1e-5);
  CHECK_THROWS(engineered_dissipation(1.0, 1.0, 1.0));
  CHECK(to_lambda_units(2.0, 4.0) == 0.5);
}
