#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "spinmech/hilbert.hpp"
#include "spinmech/models.hpp"

namespace spinmech {

/// rate * D[op]: op rho op^dag - {op^dag op, rho} / 2.
struct CollapseChannel {
  Operator op;
  double rate = 0.0;
  std::string label;
};

struct Observable {
  std::string name;
  Operator op;
};

using Hamiltonian = std::variant<Operator, TimeDependentHamiltonian>;

enum class Stepper {
  kAdaptive,  ///< Dormand-Prince 5(4) with embedded error control
  kFixed,     ///< classical RK4, equal substeps between output times
};

struct IntegratorOptions {
  Stepper stepper = Stepper::kAdaptive;
  double rtol = 1e-8;
  double atol = 1e-10;
  double fixed_step = 1e-3;
  double initial_step = 0.0;  ///< 0 picks from the generator norm
  std::size_t max_steps = 50'000'000;

  double trace_tolerance = 1e-8;     ///< |tr rho - 1| or |norm psi - 1|
  double hermiticity_tolerance = 1e-10;
  double positivity_warning = -1e-6;
  std::size_t positivity_stride = 10;  ///< eigenvalue check every k-th output sample (0 = final only)
  int tail_slot = 0;                   ///< Fock slot whose top-two-level population is tracked; -1 disables
  bool throw_on_failure = true;
};

struct Diagnostics {
  double trace_drift = 0.0;
  double max_tail = 0.0;
  double min_eigenvalue = 0.0;
  double max_hermiticity_defect = 0.0;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t rhs_evaluations = 0;
  bool failed = false;
  std::string failure;
};

/// Expectation-value series on a time grid plus the final state.
class Trajectory {
 public:
  Trajectory(std::vector<double> times, const std::vector<Observable>& observables,
             QuantumState initial);

  const std::vector<double>& times() const { return times_; }
  const std::vector<std::pair<std::string, std::vector<cplx>>>& series() const { return series_; }
  const std::vector<cplx>& values(const std::string& name) const;
  std::vector<double> real(const std::string& name) const;
  const QuantumState& final_state() const { return final_state_; }
  const Diagnostics& diagnostics() const { return diagnostics_; }

 private:
  friend class Propagator;

  std::vector<double> times_;
  std::vector<std::pair<std::string, std::vector<cplx>>> series_;
  QuantumState final_state_;
  Diagnostics diagnostics_;
};

/// Called at every output time with the current state.
using SampleObserver = std::function<void(std::size_t index, double t, const QuantumState& state)>;

Trajectory evolve_unitary(const Hamiltonian& h, const QuantumState& psi0,
                          const std::vector<double>& times,
                          const std::vector<Observable>& observables = {},
                          const IntegratorOptions& options = {},
                          const SampleObserver& observer = {});

Trajectory evolve_lindblad(const Hamiltonian& h, const std::vector<CollapseChannel>& channels,
                           const QuantumState& rho0, const std::vector<double>& times,
                           const std::vector<Observable>& observables = {},
                           const IntegratorOptions& options = {},
                           const SampleObserver& observer = {});

/// Population of the top two levels of Fock slot `slot`.
double fock_tail_population(const QuantumState& state, std::size_t slot = 0);

/// n evenly spaced points on [t0, t1] (inclusive).
std::vector<double> linspace(double t0, double t1, std::size_t n);

struct TruncationChoice {
  int n_max = 0;
  double max_tail = 0.0;
  std::vector<int> tested;
  std::optional<Trajectory> trajectory;  ///< run at the accepted n_max
};

/// Runs `simulate(n_max)` for n_max = initial, 2 initial, ... until the returned trajectory's
/// max tail population is below tail_tolerance. Throws TruncationError past `cap`.
TruncationChoice choose_truncation(const std::function<Trajectory(int n_max)>& simulate,
                                   int initial_n_max, double tail_tolerance, int cap = 256);

}  // namespace spinmech
