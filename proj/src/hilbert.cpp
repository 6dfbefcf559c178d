#include "spinmech/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spinmech/errors.hpp"

namespace spinmech {

SpaceSignature::SpaceSignature(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw InvalidDimension("space signature needs at least one subsystem");
  for (int d : dims_) {
    if (d < 2) throw InvalidDimension("subsystem dimension must be >= 2, got " + std::to_string(d));
    total_ *= d;
  }
}

SpaceSignature SpaceSignature::boson_spins(int n_max, int n_spins) {
  if (n_max < 1) throw InvalidDimension("n_max must be >= 1");
  if (n_spins < 0) throw InvalidDimension("negative spin count");
  std::vector<int> dims{n_max + 1};
  dims.insert(dims.end(), static_cast<std::size_t>(n_spins), 2);
  return SpaceSignature(std::move(dims));
}

SpaceSignature SpaceSignature::spins(int n_spins) {
  if (n_spins < 1) throw InvalidDimension("need at least one spin");
  return SpaceSignature(std::vector<int>(static_cast<std::size_t>(n_spins), 2));
}

std::string SpaceSignature::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < dims_.size(); ++i) os << (i ? "," : "") << dims_[i];
  os << ']';
  return os.str();
}

void require_same_signature(const SpaceSignature& a, const SpaceSignature& b, const char* what) {
  if (!(a == b)) {
    throw SignatureMismatch(std::string(what) + ": " + a.to_string() + " vs " + b.to_string());
  }
}

// ---------------------------------------------------------------------------
// Operator

Operator::Operator(SpaceSignature signature, MatrixXc matrix)
    : signature_(std::move(signature)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != signature_.total() || matrix_.cols() != signature_.total()) {
    throw InvalidDimension("operator matrix is " + std::to_string(matrix_.rows()) + "x" +
                           std::to_string(matrix_.cols()) + ", signature " +
                           signature_.to_string() + " needs " +
                           std::to_string(signature_.total()));
  }
}

Operator Operator::identity(const SpaceSignature& signature) {
  return {signature, MatrixXc::Identity(signature.total(), signature.total())};
}

Operator Operator::zero(const SpaceSignature& signature) {
  return {signature, MatrixXc::Zero(signature.total(), signature.total())};
}

Operator operator+(const Operator& a, const Operator& b) {
  require_same_signature(a.signature(), b.signature(), "operator sum");
  return {a.signature(), a.matrix() + b.matrix()};
}

Operator operator-(const Operator& a, const Operator& b) {
  require_same_signature(a.signature(), b.signature(), "operator difference");
  return {a.signature(), a.matrix() - b.matrix()};
}

Operator operator-(const Operator& a) { return {a.signature(), -a.matrix()}; }

Operator operator*(const Operator& a, const Operator& b) {
  require_same_signature(a.signature(), b.signature(), "operator product");
  return {a.signature(), a.matrix() * b.matrix()};
}

Operator operator*(cplx s, const Operator& a) { return {a.signature(), s * a.matrix()}; }

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

// ---------------------------------------------------------------------------
// QuantumState

QuantumState::QuantumState(SpaceSignature signature, Kind kind, VectorXc psi, MatrixXc rho)
    : signature_(std::move(signature)), kind_(kind), psi_(std::move(psi)), rho_(std::move(rho)) {}

QuantumState QuantumState::vector(SpaceSignature signature, VectorXc psi) {
  if (psi.size() != signature.total()) throw InvalidDimension("state vector length mismatch");
  const double norm = psi.norm();
  if (std::abs(norm - 1.0) > 1e-10) {
    throw InvalidState("state vector norm " + std::to_string(norm) + " differs from 1");
  }
  return {std::move(signature), Kind::kVector, std::move(psi), MatrixXc()};
}

QuantumState QuantumState::vector_unchecked(SpaceSignature signature, VectorXc psi) {
  if (psi.size() != signature.total()) throw InvalidDimension("state vector length mismatch");
  return {std::move(signature), Kind::kVector, std::move(psi), MatrixXc()};
}

QuantumState QuantumState::density_unchecked(SpaceSignature signature, MatrixXc rho) {
  if (rho.rows() != signature.total() || rho.cols() != signature.total()) {
    throw InvalidDimension("density matrix dimension mismatch");
  }
  return {std::move(signature), Kind::kDensity, VectorXc(), std::move(rho)};
}

QuantumState QuantumState::density(SpaceSignature signature, MatrixXc rho) {
  if (rho.rows() != signature.total() || rho.cols() != signature.total()) {
    throw InvalidDimension("density matrix dimension mismatch");
  }
  if (spinmech::hermiticity_defect(rho) > 1e-10) throw InvalidState("density matrix not Hermitian");
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > 1e-8) {
    throw InvalidState("density matrix trace " + std::to_string(tr) + " differs from 1");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-8) throw InvalidState("density matrix not positive");
  return density_unchecked(std::move(signature), std::move(rho));
}

const VectorXc& QuantumState::psi() const {
  if (kind_ != Kind::kVector) throw InvalidState("state is a density matrix");
  return psi_;
}

const MatrixXc& QuantumState::rho() const {
  if (kind_ != Kind::kDensity) throw InvalidState("state is a vector");
  return rho_;
}

MatrixXc QuantumState::density_matrix() const {
  return kind_ == Kind::kVector ? MatrixXc(psi_ * psi_.adjoint()) : rho_;
}

QuantumState QuantumState::to_density() const {
  return density_unchecked(signature_, density_matrix());
}

cplx QuantumState::expectation(const Operator& op) const {
  require_same_signature(signature_, op.signature(), "expectation value");
  if (kind_ == Kind::kVector) return psi_.dot(op.matrix() * psi_);
  return op.matrix().cwiseProduct(rho_.transpose()).sum();
}

// ---------------------------------------------------------------------------
// Elementary operators

Operator fock_annihilation(int n_max) {
  if (n_max < 1) throw InvalidDimension("fock_annihilation needs n_max >= 1");
  MatrixXc a = MatrixXc::Zero(n_max + 1, n_max + 1);
  for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return {SpaceSignature({n_max + 1}), std::move(a)};
}

Operator fock_number(int n_max) {
  if (n_max < 1) throw InvalidDimension("fock_number needs n_max >= 1");
  MatrixXc n = MatrixXc::Zero(n_max + 1, n_max + 1);
  for (int k = 0; k <= n_max; ++k) n(k, k) = k;
  return {SpaceSignature({n_max + 1}), std::move(n)};
}

Operator pauli(PauliAxis axis) {
  MatrixXc m(2, 2);
  switch (axis) {
    case PauliAxis::kX: m << 0, 1, 1, 0; break;
    case PauliAxis::kY: m << 0, -kI, kI, 0; break;
    case PauliAxis::kZ: m << 1, 0, 0, -1; break;
    case PauliAxis::kPlus: m << 0, 1, 0, 0; break;   // |d><g|
    case PauliAxis::kMinus: m << 0, 0, 1, 0; break;  // |g><d|
  }
  return {SpaceSignature({2}), std::move(m)};
}

Operator embed(const Operator& local, std::size_t slot, const SpaceSignature& signature) {
  if (slot >= signature.size()) {
    throw InvalidArgument("embed slot " + std::to_string(slot) + " out of range for " +
                          signature.to_string());
  }
  if (local.dim() != signature.dim(slot)) {
    throw InvalidDimension("embed: local operator dimension " + std::to_string(local.dim()) +
                           " does not match slot dimension " + std::to_string(signature.dim(slot)));
  }
  Eigen::Index left = 1, right = 1;
  for (std::size_t i = 0; i < slot; ++i) left *= signature.dim(i);
  for (std::size_t i = slot + 1; i < signature.size(); ++i) right *= signature.dim(i);
  MatrixXc out = kron(MatrixXc::Identity(left, left).eval(), local.matrix());
  out = kron(out, MatrixXc::Identity(right, right).eval());
  return {signature, std::move(out)};
}

namespace {

PauliAxis to_pauli(SpinAxis axis) {
  switch (axis) {
    case SpinAxis::kX: return PauliAxis::kX;
    case SpinAxis::kY: return PauliAxis::kY;
    case SpinAxis::kZ: return PauliAxis::kZ;
  }
  return PauliAxis::kZ;
}

}  // namespace

Operator collective_spin(SpinAxis axis, const SpaceSignature& signature,
                         std::size_t first_spin_slot, SpinConvention convention) {
  if (first_spin_slot >= signature.size()) throw InvalidArgument("no spins in signature");
  const Operator local = pauli(to_pauli(axis));
  Operator sum = Operator::zero(signature);
  for (std::size_t s = first_spin_slot; s < signature.size(); ++s) sum = sum + embed(local, s, signature);
  return convention == SpinConvention::kHalfSum ? 0.5 * sum : sum;
}

Operator collective_spin(SpinAxis axis, int n_spins, SpinConvention convention) {
  if (n_spins < 1) throw InvalidDimension("collective_spin needs N >= 1");
  return collective_spin(axis, SpaceSignature::spins(n_spins), 0, convention);
}

QuantumState partial_trace(const QuantumState& state, std::vector<std::size_t> keep) {
  const SpaceSignature& sig = state.signature();
  if (keep.empty()) throw InvalidArgument("partial_trace: empty keep set");
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  if (keep.back() >= sig.size()) throw InvalidArgument("partial_trace: subsystem index out of range");

  std::vector<bool> kept(sig.size(), false);
  std::vector<int> kept_dims;
  for (std::size_t k : keep) {
    kept[k] = true;
    kept_dims.push_back(sig.dim(k));
  }
  const MatrixXc rho = state.density_matrix();
  const Eigen::Index total = sig.total();

  // Split every full index into (kept multi-index, traced multi-index), both flattened.
  std::vector<Eigen::Index> kept_index(static_cast<std::size_t>(total));
  std::vector<Eigen::Index> traced_index(static_cast<std::size_t>(total));
  for (Eigen::Index i = 0; i < total; ++i) {
    Eigen::Index rem = i, kstride = 1, tstride = 1, ki = 0, ti = 0;
    for (std::size_t s = sig.size(); s-- > 0;) {
      const int d = sig.dim(s);
      const Eigen::Index digit = rem % d;
      rem /= d;
      if (kept[s]) {
        ki += digit * kstride;
        kstride *= d;
      } else {
        ti += digit * tstride;
        tstride *= d;
      }
    }
    kept_index[static_cast<std::size_t>(i)] = ki;
    traced_index[static_cast<std::size_t>(i)] = ti;
  }

  SpaceSignature reduced(kept_dims);
  MatrixXc out = MatrixXc::Zero(reduced.total(), reduced.total());
  for (Eigen::Index j = 0; j < total; ++j) {
    const auto tj = traced_index[static_cast<std::size_t>(j)];
    const auto kj = kept_index[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < total; ++i) {
      if (traced_index[static_cast<std::size_t>(i)] == tj) {
        out(kept_index[static_cast<std::size_t>(i)], kj) += rho(i, j);
      }
    }
  }
  return QuantumState::density_unchecked(std::move(reduced), std::move(out));
}

// ---------------------------------------------------------------------------
// Basis states

VectorXc fock_ket(int n_max, int n) {
  if (n < 0 || n > n_max) throw InvalidArgument("Fock level out of range");
  VectorXc v = VectorXc::Zero(n_max + 1);
  v(n) = 1.0;
  return v;
}

VectorXc spin_ket(bool excited) {
  VectorXc v = VectorXc::Zero(2);
  v(excited ? kSpinD : kSpinG) = 1.0;
  return v;
}

QuantumState product_state(const SpaceSignature& signature, const std::vector<VectorXc>& factors) {
  if (factors.size() != signature.size()) throw InvalidArgument("product_state: factor count mismatch");
  VectorXc psi = VectorXc::Ones(1);
  for (std::size_t s = 0; s < factors.size(); ++s) {
    if (factors[s].size() != signature.dim(s)) throw InvalidDimension("product_state: factor size");
    psi = kron(psi, factors[s]);
  }
  return QuantumState::vector(signature, psi.normalized());
}

QuantumState vacuum_spins_state(int n_max, int n_spins, bool excited) {
  const SpaceSignature sig = SpaceSignature::boson_spins(n_max, n_spins);
  std::vector<VectorXc> f{fock_ket(n_max, 0)};
  for (int j = 0; j < n_spins; ++j) f.push_back(spin_ket(excited));
  return product_state(sig, f);
}

QuantumState all_ground_spins(int n_spins) {
  const SpaceSignature sig = SpaceSignature::spins(n_spins);
  return product_state(sig, std::vector<VectorXc>(static_cast<std::size_t>(n_spins), spin_ket(false)));
}

}  // namespace spinmech
