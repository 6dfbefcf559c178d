#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "spinmech/linalg.hpp"

namespace spinmech {

/// Ordered subsystem dimensions of a tensor-product space. Slot 0 is the boson
/// by convention, spins follow in index order.
class SpaceSignature {
 public:
  explicit SpaceSignature(std::vector<int> dims);

  /// [n_max + 1, 2, ..., 2] with n_spins two-level factors.
  static SpaceSignature boson_spins(int n_max, int n_spins);
  static SpaceSignature spins(int n_spins);

  const std::vector<int>& dims() const { return dims_; }
  std::size_t size() const { return dims_.size(); }
  int dim(std::size_t slot) const { return dims_.at(slot); }
  Eigen::Index total() const { return total_; }

  std::string to_string() const;

  friend bool operator==(const SpaceSignature&, const SpaceSignature&) = default;

 private:
  std::vector<int> dims_;
  Eigen::Index total_ = 1;
};

/// Dense complex square matrix tagged with its space.
class Operator {
 public:
  Operator(SpaceSignature signature, MatrixXc matrix);

  static Operator identity(const SpaceSignature& signature);
  static Operator zero(const SpaceSignature& signature);

  const SpaceSignature& signature() const { return signature_; }
  const MatrixXc& matrix() const { return matrix_; }
  Eigen::Index dim() const { return matrix_.rows(); }

  Operator adjoint() const { return {signature_, matrix_.adjoint()}; }
  double hermiticity_defect() const { return spinmech::hermiticity_defect(matrix_); }
  bool is_hermitian(double tol = 1e-12) const { return hermiticity_defect() <= tol; }

 private:
  SpaceSignature signature_;
  MatrixXc matrix_;
};

Operator operator+(const Operator& a, const Operator& b);
Operator operator-(const Operator& a, const Operator& b);
Operator operator-(const Operator& a);
Operator operator*(const Operator& a, const Operator& b);
Operator operator*(cplx s, const Operator& a);
inline Operator operator*(double s, const Operator& a) { return cplx{s, 0.0} * a; }
Operator commutator(const Operator& a, const Operator& b);

void require_same_signature(const SpaceSignature& a, const SpaceSignature& b, const char* what);

/// State vector or density matrix over a SpaceSignature. Invariants are checked on
/// construction: unit norm (1e-10) for vectors; Hermitian (1e-10), unit trace (1e-8)
/// and eigenvalues >= -1e-8 for density matrices.
class QuantumState {
 public:
  enum class Kind { kVector, kDensity };

  static QuantumState vector(SpaceSignature signature, VectorXc psi);
  static QuantumState density(SpaceSignature signature, MatrixXc rho);
  /// Skips the norm check (integrator output; drift is reported separately).
  static QuantumState vector_unchecked(SpaceSignature signature, VectorXc psi);
  /// Skips the positivity check (used for integrator output, where positivity is monitored).
  static QuantumState density_unchecked(SpaceSignature signature, MatrixXc rho);

  const SpaceSignature& signature() const { return signature_; }
  Kind kind() const { return kind_; }
  bool is_vector() const { return kind_ == Kind::kVector; }
  const VectorXc& psi() const;
  const MatrixXc& rho() const;

  /// Projector |psi><psi| for vectors, copy for density matrices.
  QuantumState to_density() const;
  MatrixXc density_matrix() const;
  cplx expectation(const Operator& op) const;

 private:
  QuantumState(SpaceSignature signature, Kind kind, VectorXc psi, MatrixXc rho);

  SpaceSignature signature_;
  Kind kind_;
  VectorXc psi_;
  MatrixXc rho_;
};

enum class PauliAxis { kX, kY, kZ, kPlus, kMinus };
enum class SpinAxis { kX, kY, kZ };
enum class SpinConvention { kPauliSum, kHalfSum };

/// Truncated annihilation operator on n_max + 1 Fock levels.
Operator fock_annihilation(int n_max);
Operator fock_number(int n_max);

/// 2x2 Pauli-type operator in the (|d>, |g>) basis: sigma_z = |d><d| - |g><g|, sigma_+ = |d><g|.
Operator pauli(PauliAxis axis);

/// identity (x) ... (x) local (x) ... (x) identity with local at `slot`.
Operator embed(const Operator& local, std::size_t slot, const SpaceSignature& signature);

/// Sum_j sigma_axis^j over N spins (pauli-sum) or half of it (half-sum).
Operator collective_spin(SpinAxis axis, int n_spins,
                         SpinConvention convention = SpinConvention::kPauliSum);

/// Same, embedded into `signature` with spins at slots first_spin_slot, first_spin_slot + 1, ...
Operator collective_spin(SpinAxis axis, const SpaceSignature& signature,
                         std::size_t first_spin_slot,
                         SpinConvention convention = SpinConvention::kPauliSum);

/// Reduced density matrix over the kept subsystems (kept order follows signature order).
QuantumState partial_trace(const QuantumState& state, std::vector<std::size_t> keep);

// Named basis-state helpers. Spin bits: true = |d>, false = |g>.
inline constexpr int kSpinD = 0;
inline constexpr int kSpinG = 1;

VectorXc fock_ket(int n_max, int n);
VectorXc spin_ket(bool excited);
/// |n>_ph (x) |s_1 ... s_N>, spins given as kets in the (|d>, |g>) basis.
QuantumState product_state(const SpaceSignature& signature, const std::vector<VectorXc>& factors);
/// |0>_ph |g...g> (or |d...d> with excited = true) over boson_spins(n_max, n_spins).
QuantumState vacuum_spins_state(int n_max, int n_spins, bool excited = false);
/// |g...g> over spins(n_spins).
QuantumState all_ground_spins(int n_spins);

}  // namespace spinmech
