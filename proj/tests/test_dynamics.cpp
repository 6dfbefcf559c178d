#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "spinmech/dynamics.hpp"
#include "spinmech/errors.hpp"
#include "spinmech/models.hpp"

using namespace spinmech;

TEST_CASE("Fock eigenstate is stationary") {
  const SpaceSignature sig({6});
  const Operator h = 1.7 * fock_number(5);
  const auto psi = QuantumState::vector(sig, fock_ket(5, 1));
  const Trajectory tr = evolve_unitary(h, psi, linspace(0.0, 5.0, 11), {{"n", fock_number(5)}});
  for (double v : tr.real("n")) CHECK(std::abs(v - 1.0) < 1e-8);
}

TEST_CASE("unitary evolution matches the matrix exponential") {
  std::mt19937_64 rng(21);
  const SpaceSignature sig({3, 2});
  const Operator h(sig, oracle::random_hermitian(6, rng));
  const VectorXc psi0 = oracle::random_ket(6, rng);
  const auto times = linspace(0.0, 3.0, 7);
  for (Stepper st : {Stepper::kAdaptive, Stepper::kFixed}) {
    IntegratorOptions o;
    o.stepper = st;
    o.rtol = 1e-11;
    o.atol = 1e-13;
    o.fixed_step = 2e-3;
    o.tail_slot = -1;
    const Trajectory tr = evolve_unitary(h, QuantumState::vector(sig, psi0), times, {}, o);
    const VectorXc ref = oracle::expm_taylor(-kI * 3.0 * h.matrix()) * psi0;
    CHECK((tr.final_state().psi() - ref).norm() < 1e-8);

    const Trajectory dm = evolve_lindblad(h, {}, QuantumState::vector(sig, psi0), times, {}, o);
    CHECK((dm.final_state().rho() - ref * ref.adjoint()).norm() < 1e-8);
  }
}

TEST_CASE("resonant Jaynes-Cummings vacuum Rabi oscillation") {
  ModelParams p = ModelParams::homogeneous(1, 1.0, 0.0, 4);
  p.delta_dg = {1.0};
  const SpaceSignature sig = p.signature();
  const Operator h = build_total_hamiltonian(p, sig);
  const auto psi0 = product_state(sig, {fock_ket(4, 0), spin_ket(true)});
  const double period = std::numbers::pi / 1.0;
  const auto times = linspace(0.0, period, 41);
  const Trajectory tr = evolve_unitary(h, psi0, times, {{"sz", spin_operator(PauliAxis::kZ, 0, sig)}});
  const auto sz = tr.real("sz");
  for (std::size_t i = 0; i < times.size(); ++i) CHECK(sz[i] == doctest::Approx(std::cos(2.0 * times[i])).epsilon(1e-7));
}

TEST_CASE("amplitude damping of a single phonon") {
  const double kappa = 0.7;
  const SpaceSignature sig({4});
  const auto rho0 = QuantumState::vector(sig, fock_ket(3, 1));
  const auto times = linspace(0.0, 4.0, 21);
  for (Stepper st : {Stepper::kAdaptive, Stepper::kFixed}) {
    IntegratorOptions o;
    o.stepper = st;
    o.fixed_step = 1e-3;
    const Trajectory tr = evolve_lindblad(Operator::zero(sig), {{fock_annihilation(3), kappa, "a"}}, rho0, times,
                                          {{"n", fock_number(3)}}, o);
    const auto n = tr.real("n");
    for (std::size_t i = 0; i < times.size(); ++i) CHECK(std::abs(n[i] - std::exp(-kappa * times[i])) < 1e-6);
    CHECK(tr.diagnostics().trace_drift < 1e-8);
  }
}

TEST_CASE("pure dephasing agrees with the vectorised superoperator") {
  const double gamma = 0.3;
  const SpaceSignature one = SpaceSignature::spins(1);
  const VectorXc plus = (spin_ket(true) + spin_ket(false)) / std::sqrt(2.0);
  const auto times = linspace(0.0, 2.0, 9);
  const Trajectory tr = evolve_lindblad(Operator::zero(one), {{pauli(PauliAxis::kZ), gamma, "z"}},
                                        QuantumState::vector(one, plus), times,
                                        {{"sx", pauli(PauliAxis::kX)}});

  // Column-stacking vec: vec(A X B) = (B^T kron A) vec(X).
  const oracle::Mat z = oracle::sz(), id = oracle::Mat::Identity(2, 2);
  const oracle::Mat liou = gamma * (oracle::kron(z.transpose(), z) - oracle::kron(id, id));
  Eigen::ComplexEigenSolver<oracle::Mat> es(liou);
  double slowest = 0.0;
  for (auto ev : es.eigenvalues()) slowest = std::min(slowest, ev.real());
  CHECK(slowest == doctest::Approx(-2.0 * gamma));

  const oracle::Mat rho0 = plus * plus.adjoint();
  const auto sx = tr.real("sx");
  for (std::size_t i = 0; i < times.size(); ++i) {
    const oracle::Mat prop = oracle::expm_taylor(liou * times[i]);
    oracle::Vec v = Eigen::Map<const oracle::Vec>(rho0.data(), 4);
    oracle::Vec out = prop * v;
    const oracle::Mat rho = Eigen::Map<oracle::Mat>(out.data(), 2, 2);
    CHECK(sx[i] == doctest::Approx((rho * oracle::sx()).trace().real()).epsilon(1e-9));
    CHECK(sx[i] == doctest::Approx(std::exp(-2.0 * gamma * times[i])).epsilon(1e-9));
  }
}

TEST_CASE("time-dependent generator: driven qubit against a fine product-formula oracle") {
  const SpaceSignature one = SpaceSignature::spins(1);
  TimeDependentHamiltonian h(one);
  h.add_constant(0.5 * pauli(PauliAxis::kZ));
  h.add(pauli(PauliAxis::kX), [](double t) { return cplx(0.8 * std::cos(1.3 * t), 0.0); });
  const auto psi0 = QuantumState::vector(one, spin_ket(false));
  const Trajectory tr = evolve_unitary(h, psi0, {0.0, 2.0});

  VectorXc psi = spin_ket(false);
  const int steps = 20000;
  const double dt = 2.0 / steps;
  for (int k = 0; k < steps; ++k) {
    psi = oracle::expm_taylor(-kI * dt * h.at((k + 0.5) * dt).matrix()) * psi;
  }
  CHECK((tr.final_state().psi() - psi).norm() < 1e-7);
}

TEST_CASE("non-Hermitian generators are rejected") {
  const SpaceSignature one = SpaceSignature::spins(1);
  const auto psi0 = QuantumState::vector(one, spin_ket(false));
  CHECK_THROWS_AS(evolve_unitary(pauli(PauliAxis::kPlus), psi0, {0.0, 1.0}), InvalidArgument);
  TimeDependentHamiltonian h(one);
  h.add(pauli(PauliAxis::kX), [](double t) { return cplx(1.0, 0.5 + t); });
  CHECK_THROWS_AS(evolve_unitary(h, psi0, {0.0, 0.5, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(evolve_unitary(pauli(PauliAxis::kX), psi0, {0.0, 2.0, 1.0}), InvalidArgument);
}

TEST_CASE("trace drift beyond tolerance marks the run failed") {
  const SpaceSignature sig({4});
  const auto rho0 = QuantumState::vector(sig, fock_ket(3, 2));
  IntegratorOptions o;
  o.stepper = Stepper::kFixed;
  o.fixed_step = 0.2;
  o.trace_tolerance = 1e-14;
  const std::vector<CollapseChannel> ch{{fock_annihilation(3), 1.0, "a"}};
  const Operator h = 3.0 * fock_number(3);
  o.throw_on_failure = false;
  // RK4 with a large step does not conserve trace to 1e-14 for this generator
  const Trajectory tr = evolve_lindblad(h, ch, rho0, linspace(0.0, 2.0, 3), {}, o);
  if (tr.diagnostics().trace_drift > 1e-14) {
    CHECK(tr.diagnostics().failed);
    o.throw_on_failure = true;
    CHECK_THROWS_AS(evolve_lindblad(h, ch, rho0, linspace(0.0, 2.0, 3), {}, o), NumericalFailure);
  }
}

TEST_CASE("truncation selection") {
  auto vacuum = [](int n_max) {
    const SpaceSignature sig({n_max + 1});
    return evolve_unitary(fock_number(n_max), QuantumState::vector(sig, fock_ket(n_max, 0)), {0.0, 1.0});
  };
  const TruncationChoice c0 = choose_truncation(vacuum, 4, 1e-6);
  CHECK(c0.n_max == 4);
  CHECK(c0.tested.size() == 1);

  // Resonant drive displacing the vacuum to <n> = 4; the Poisson tail sets the cut-off.
  auto drive = [](int n_max) {
    const SpaceSignature sig({n_max + 1});
    const Operator a = fock_annihilation(n_max);
    const Operator h = 1.0 * (a + a.adjoint());
    return evolve_unitary(h, QuantumState::vector(sig, fock_ket(n_max, 0)), linspace(0.0, 2.0, 5),
                          {{"n", fock_number(n_max)}});
  };
  const TruncationChoice c = choose_truncation(drive, 4, 1e-6);
  CHECK(c.n_max >= 16);
  CHECK(c.trajectory->real("n").back() == doctest::Approx(4.0).epsilon(1e-6));
  double poisson_tail = 0.0;
  double term = std::exp(-4.0);
  for (int n = 0; n <= c.n_max; ++n) {
    if (n >= c.n_max - 1) poisson_tail += term;
    term *= 4.0 / (n + 1);
  }
  CHECK(c.max_tail == doctest::Approx(poisson_tail).epsilon(1e-4));
  CHECK_THROWS_AS(choose_truncation(drive, 4, 1e-30, 16), TruncationError);
}

TEST_CASE("squeezed-frame run converges under doubling of the cut-off") {
  auto run = [](int n_max) {
    ModelParams p = ModelParams::homogeneous(1, 1.0, pump_for_squeezing(1.0, 3.0), n_max, 1.0, 0.1, 0.1);
    const SpaceSignature sig = p.signature();
    const Operator h = build_squeezed_rabi(p, derive_squeeze_params(p), sig);
    const auto rho0 = product_state(sig, {fock_ket(n_max, 0), spin_ket(true)});
    return evolve_lindblad(h, {{boson_annihilation(sig), 0.1, "a"}, {spin_operator(PauliAxis::kZ, 0, sig), 0.1, "z"}},
                           rho0, linspace(0.0, 0.5, 11), {{"n", boson_number(sig)}, {"sz", spin_operator(PauliAxis::kZ, 0, sig)}});
  };
  const TruncationChoice c = choose_truncation(run, 16, 1e-6);
  const Trajectory finer = run(2 * c.n_max);
  for (const char* key : {"n", "sz"}) {
    const auto a = c.trajectory->real(key), b = finer.real(key);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-4);
  }
}

TEST_CASE("observer sees every output sample") {
  const SpaceSignature one = SpaceSignature::spins(1);
  std::vector<double> seen;
  evolve_unitary(pauli(PauliAxis::kX), QuantumState::vector(one, spin_ket(false)), linspace(0.0, 1.0, 6), {}, {},
                 [&](std::size_t i, double t, const QuantumState&) {
                   CHECK(i == seen.size());
                   seen.push_back(t);
                 });
  CHECK(seen.size() == 6);
}
