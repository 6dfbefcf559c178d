#include "spinmech/dynamics.hpp"

#include <Eigen/SparseCore>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "spinmech/errors.hpp"

namespace spinmech {

namespace {

using SparseXc = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;
using SparseColXc = Eigen::SparseMatrix<cplx>;

constexpr double kSparseFill = 0.25;

bool is_diagonal(const MatrixXc& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (i != j && m(i, j) != cplx{}) return false;
    }
  }
  return true;
}

double fill_fraction(const MatrixXc& m) {
  if (m.size() == 0) return 0.0;
  const auto nnz = (m.array() != cplx{}).count();
  return static_cast<double>(nnz) / static_cast<double>(m.size());
}

// A constant matrix stored densely or sparsely depending on its fill.
class StoredMatrix {
 public:
  explicit StoredMatrix(const MatrixXc& m) {
    if (fill_fraction(m) < kSparseFill) {
      sparse_ = m.sparseView();
      sparse_.makeCompressed();
      adjoint_ = m.adjoint().sparseView();
      adjoint_.makeCompressed();
      use_sparse_ = true;
    } else {
      dense_ = m;
      dense_adjoint_ = m.adjoint();
    }
  }

  // out += c * x M^dag; dense times column-major sparse is Eigen's fast kernel
  void apply_right_adjoint_add(cplx c, const MatrixXc& x, MatrixXc& out) const {
    if (use_sparse_) {
      out.noalias() += c * (x * adjoint_);
    } else {
      out.noalias() += c * (x * dense_adjoint_);
    }
  }

  void apply_right_adjoint(const MatrixXc& x, MatrixXc& out) const {
    if (use_sparse_) {
      out.noalias() = x * adjoint_;
    } else {
      out.noalias() = x * dense_adjoint_;
    }
  }

  // out += c * M x
  void apply_add(cplx c, const MatrixXc& x, MatrixXc& out) const {
    if (use_sparse_) {
      out.noalias() += c * (sparse_ * x);
    } else {
      out.noalias() += c * (dense_ * x);
    }
  }

  void apply(const MatrixXc& x, MatrixXc& out) const {
    if (use_sparse_) {
      out.noalias() = sparse_ * x;
    } else {
      out.noalias() = dense_ * x;
    }
  }

 private:
  bool use_sparse_ = false;
  SparseXc sparse_;
  SparseColXc adjoint_;
  MatrixXc dense_, dense_adjoint_;
};

// K(t) = sum_k c_k(t) M_k; for open systems K = H - (i/2) sum gamma c^dag c.
class Generator {
 public:
  Generator(const Hamiltonian& h, const std::vector<CollapseChannel>& channels,
            const SpaceSignature& signature) {
    if (const auto* op = std::get_if<Operator>(&h)) {
      require_same_signature(signature, op->signature(), "Hamiltonian");
      if (op->hermiticity_defect() > 1e-10) {
        throw InvalidArgument("Hamiltonian is not Hermitian (defect " +
                              std::to_string(op->hermiticity_defect()) + ")");
      }
      constant_ = op->matrix();
    } else {
      const auto& td = std::get<TimeDependentHamiltonian>(h);
      require_same_signature(signature, td.signature(), "Hamiltonian");
      constant_ = MatrixXc::Zero(td.dim(), td.dim());
      for (const auto& term : td.terms()) {
        terms_.emplace_back(StoredMatrix(term.op.matrix()), term.coefficient);
      }
      td_ = &td;
    }
    for (const auto& ch : channels) {
      require_same_signature(signature, ch.op.signature(), "collapse channel");
      if (ch.rate < 0.0) throw InvalidArgument("collapse rate must be non-negative");
      if (ch.rate == 0.0) continue;
      constant_ -= (0.5 * ch.rate) * kI * (ch.op.matrix().adjoint() * ch.op.matrix());
    }
    has_constant_ = constant_.cwiseAbs().maxCoeff() > 0.0;
    stored_constant_.emplace(constant_);
  }

  // out = K(t) x
  void apply(double t, const MatrixXc& x, MatrixXc& out) const {
    if (has_constant_) {
      stored_constant_->apply(x, out);
    } else {
      out.setZero(x.rows(), x.cols());
    }
    for (const auto& [m, coeff] : terms_) {
      const cplx c = coeff(t);
      if (c != cplx{}) m.apply_add(c, x, out);
    }
  }

  // out = x K(t)^dag
  void apply_right_adjoint(double t, const MatrixXc& x, MatrixXc& out) const {
    if (has_constant_) {
      stored_constant_->apply_right_adjoint(x, out);
    } else {
      out.setZero(x.rows(), x.cols());
    }
    for (const auto& [m, coeff] : terms_) {
      const cplx c = coeff(t);
      if (c != cplx{}) m.apply_right_adjoint_add(std::conj(c), x, out);
    }
  }

  double hermiticity_defect(double t) const {
    if (td_ == nullptr) return 0.0;
    return td_->at(t).hermiticity_defect();
  }

  // Rough scale of the generator for the first step guess.
  double scale(double t) const {
    MatrixXc k = constant_;
    for (const auto& term : td_ ? td_->terms() : std::vector<TimeDependentHamiltonian::Term>{}) {
      k += term.coefficient(t) * term.op.matrix();
    }
    return k.cwiseAbs().rowwise().sum().maxCoeff();
  }

 private:
  MatrixXc constant_;
  bool has_constant_ = false;
  std::optional<StoredMatrix> stored_constant_;
  std::vector<std::pair<StoredMatrix, TimeDependentHamiltonian::Coefficient>> terms_;
  const TimeDependentHamiltonian* td_ = nullptr;
};

// Dissipator jump part sum_k rate_k c_k rho c_k^dag for Hermitian rho. Diagonal
// operators collapse into a single elementwise weight.
class JumpTerms {
 public:
  void add(const MatrixXc& c, double rate) {
    if (is_diagonal(c)) {
      const VectorXc d = c.diagonal();
      const MatrixXc w = rate * (d * d.adjoint());
      if (weights_.size() == 0) weights_ = w;
      else weights_ += w;
    } else {
      SparseColXc adj = c.adjoint().sparseView();
      adj.makeCompressed();
      general_.emplace_back(std::move(adj), rate);
    }
  }

  // out += jumps(rho); each general term is symmetrized so the result stays exactly Hermitian
  void apply_add(const MatrixXc& rho, MatrixXc& out, MatrixXc& s, MatrixXc& s_adj, MatrixXc& t) const {
    if (weights_.size() != 0) out.array() += weights_.array() * rho.array();
    for (const auto& [cdag, rate] : general_) {
      s.noalias() = rho * cdag;  // rho c^dag
      s_adj = s.adjoint();       // c rho
      t.noalias() = s_adj * cdag;
      out.noalias() += (0.5 * rate) * t;
      out.noalias() += (0.5 * rate) * t.adjoint();
    }
  }

 private:
  MatrixXc weights_;
  std::vector<std::pair<SparseColXc, double>> general_;
};

double tail_population(const MatrixXc& y, bool is_vector, const SpaceSignature& sig,
                       std::size_t slot) {
  const int dim = sig.dim(slot);
  Eigen::Index stride = 1;
  for (std::size_t s = slot + 1; s < sig.size(); ++s) stride *= sig.dim(s);
  double pop = 0.0;
  for (Eigen::Index i = 0; i < sig.total(); ++i) {
    const auto level = static_cast<int>((i / stride) % dim);
    if (level < dim - 2) continue;
    pop += is_vector ? std::norm(y(i, 0)) : y(i, i).real();
  }
  return pop;
}

}  // namespace

// ---------------------------------------------------------------------------

Trajectory::Trajectory(std::vector<double> times, const std::vector<Observable>& observables,
                       QuantumState initial)
    : times_(std::move(times)), final_state_(std::move(initial)) {
  for (const auto& obs : observables) {
    series_.emplace_back(obs.name, std::vector<cplx>());
    series_.back().second.reserve(times_.size());
  }
}

const std::vector<cplx>& Trajectory::values(const std::string& name) const {
  for (const auto& [n, v] : series_) {
    if (n == name) return v;
  }
  throw InvalidArgument("trajectory has no observable named '" + name + "'");
}

std::vector<double> Trajectory::real(const std::string& name) const {
  const auto& v = values(name);
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](cplx c) { return c.real(); });
  return out;
}

// Drives one integration run: either d psi/dt = -i H psi or the Lindblad equation.
class Propagator {
 public:
  Propagator(const Hamiltonian& h, const std::vector<CollapseChannel>& channels,
             const QuantumState& initial, const std::vector<double>& times,
             const std::vector<Observable>& observables, const IntegratorOptions& options,
             const SampleObserver& observer, bool density)
      : signature_(initial.signature()),
        generator_(h, channels, initial.signature()),
        times_(times),
        observables_(observables),
        options_(options),
        observer_(observer),
        density_(density) {
    if (times_.empty()) throw InvalidArgument("time grid is empty");
    for (std::size_t i = 1; i < times_.size(); ++i) {
      if (!(times_[i] > times_[i - 1])) throw InvalidArgument("time grid must be strictly increasing");
    }
    for (const auto& obs : observables_) {
      require_same_signature(signature_, obs.op.signature(), "observable");
    }
    if (options_.tail_slot >= 0 && static_cast<std::size_t>(options_.tail_slot) >= signature_.size()) {
      track_tail_ = false;
    } else {
      track_tail_ = options_.tail_slot >= 0;
    }
    if (density_) {
      for (const auto& ch : channels) {
        if (ch.rate > 0.0) jumps_.add(ch.op.matrix(), ch.rate);
      }
      y_ = initial.density_matrix();
    } else {
      y_ = initial.psi();
    }
  }

  Trajectory run() {
    Trajectory traj(times_, observables_, make_state());
    Diagnostics& diag = traj.diagnostics_;
    diag.min_eigenvalue = std::numeric_limits<double>::infinity();

    double t = times_.front();
    record(traj, 0, t);
    double h = initial_step(t);
    for (std::size_t k = 1; k < times_.size() && !stop_; ++k) {
      const double t_out = times_[k];
      if (options_.stepper == Stepper::kAdaptive) {
        h = advance_adaptive(t, t_out, h, diag);
      } else {
        advance_fixed(t, t_out, diag);
      }
      t = t_out;
      record(traj, k, t);
    }
    if (!(diag.min_eigenvalue < std::numeric_limits<double>::infinity())) diag.min_eigenvalue = 0.0;
    if (density_) {
      const double last = min_eigenvalue();
      diag.min_eigenvalue = std::min(diag.min_eigenvalue, last);
    }
    if (diag.min_eigenvalue < options_.positivity_warning) {
      spdlog::warn("density matrix eigenvalue {:.3e} below {:.1e}", diag.min_eigenvalue,
                   options_.positivity_warning);
    }
    traj.final_state_ = make_state();
    if (diag.failed && options_.throw_on_failure) throw NumericalFailure(diag.failure);
    return traj;
  }

 private:
  QuantumState make_state() const {
    if (density_) return QuantumState::density_unchecked(signature_, y_);
    return QuantumState::vector_unchecked(signature_, y_.col(0));
  }

  void rhs(double t, const MatrixXc& y, MatrixXc& dy) {
    ++rhs_count_;
    if (!density_) {
      generator_.apply(t, y, dy);
      dy *= -kI;
      return;
    }
    // -i(K rho - rho K^dag) = W + W^dag with W = i rho K^dag, using K rho = (rho K^dag)^dag
    generator_.apply_right_adjoint(t, y, work_);
    work_ *= kI;
    dy = work_;
    dy += work_.adjoint();
    jumps_.apply_add(y, dy, scratch_, scratch_adj_, scratch_t_);
  }

  double initial_step(double t) const {
    if (options_.initial_step > 0.0) return options_.initial_step;
    const double s = generator_.scale(t);
    return s > 0.0 ? 0.05 / s : 0.1;
  }

  double drift() const {
    if (density_) return std::abs(y_.trace() - cplx{1.0, 0.0});
    return std::abs(y_.col(0).norm() - 1.0);
  }

  void after_step(Diagnostics& diag, double t) {
    if (density_) {
      MatrixXc sym = 0.5 * (y_ + y_.adjoint());
      y_.swap(sym);
    }
    const double d = drift();
    diag.trace_drift = std::max(diag.trace_drift, d);
    if (d > options_.trace_tolerance && !diag.failed) {
      diag.failed = true;
      diag.failure = std::string(density_ ? "trace" : "norm") + " drift " + std::to_string(d) +
                     " exceeds tolerance at t = " + std::to_string(t);
      spdlog::error("{}", diag.failure);
      if (options_.throw_on_failure) stop_ = true;
    }
    if (diag.accepted_steps + diag.rejected_steps > options_.max_steps) {
      throw NumericalFailure("integrator exceeded the maximum step count");
    }
  }

  double error_norm(const MatrixXc& err, const MatrixXc& y_new) const {
    // squared moduli avoid a hypot per entry
    const cplx* e = err.data();
    const cplx* a = y_.data();
    const cplx* b = y_new.data();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
      const double scale = options_.atol + options_.rtol * std::sqrt(std::max(std::norm(a[i]), std::norm(b[i])));
      worst = std::max(worst, std::norm(e[i]) / (scale * scale));
    }
    return std::sqrt(worst);
  }

  // Dormand-Prince 5(4), FSAL; lands exactly on t_out. Returns the next step suggestion.
  double advance_adaptive(double& t, double t_out, double h, Diagnostics& diag) {
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                            a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                            b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                            e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    const Eigen::Index r = y_.rows(), c = y_.cols();
    for (auto* k : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_}) k->resize(r, c);
    if (!fsal_valid_ || fsal_t_ != t) {
      rhs(t, y_, k1_);
    }
    h = std::min(h, t_out - t);
    double suggestion = h;
    while (t < t_out && !stop_) {
      bool last = false;
      double step = h;
      if (t + step >= t_out || t_out - (t + step) < 1e-12 * std::max(1.0, std::abs(t_out))) {
        step = t_out - t;
        last = true;
      }
      stage_ = y_ + (step * a21) * k1_;
      rhs(t + step / 5.0, stage_, k2_);
      stage_ = y_ + step * (a31 * k1_ + a32 * k2_);
      rhs(t + 3.0 * step / 10.0, stage_, k3_);
      stage_ = y_ + step * (a41 * k1_ + a42 * k2_ + a43 * k3_);
      rhs(t + 4.0 * step / 5.0, stage_, k4_);
      stage_ = y_ + step * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
      rhs(t + 8.0 * step / 9.0, stage_, k5_);
      stage_ = y_ + step * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
      rhs(t + step, stage_, k6_);
      y_new_ = y_ + step * (b1 * k1_ + b3 * k3_ + b4 * k4_ + b5 * k5_ + b6 * k6_);
      rhs(t + step, y_new_, k7_);
      err_ = step * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
      double en = error_norm(err_, y_new_);
      if (!density_) {
        // Explicit RK does not conserve |psi|^2; each step gets a share of the drift
        // budget proportional to its length so the accumulated drift stays below half of it.
        const double span = times_.back() - times_.front();
        const double budget = 0.5 * options_.trace_tolerance * step / span;
        en = std::max(en, std::abs(y_new_.squaredNorm() - y_.squaredNorm()) / budget);
      }
      if (!std::isfinite(en)) throw NumericalFailure("integrator produced non-finite values");

      if (en <= 1.0) {
        y_.swap(y_new_);
        t = last ? t_out : t + step;
        ++diag.accepted_steps;
        after_step(diag, t);
        if (density_) {
          // The generator maps Hermitian parts to Hermitian parts, so the FSAL stage
          // of the symmetrized state is the symmetrized stage.
          k1_ = 0.5 * (k7_ + k7_.adjoint());
        } else {
          k1_.swap(k7_);
        }
        const double fac = en > 0.0 ? std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0) : 5.0;
        // Keep the unclipped size when the landing step was shortened.
        suggestion = last ? std::max(h, step * fac) : step * fac;
        h = step * fac;
      } else {
        ++diag.rejected_steps;
        h = step * std::max(0.2, 0.9 * std::pow(en, -0.2));
        if (h < 1e-14 * std::max(1.0, std::abs(t))) {
          throw NumericalFailure("step size underflow at t = " + std::to_string(t));
        }
      }
    }
    fsal_valid_ = true;
    fsal_t_ = t;
    diag.rhs_evaluations = rhs_count_;
    return suggestion;
  }

  void advance_fixed(double& t, double t_out, Diagnostics& diag) {
    if (!(options_.fixed_step > 0.0)) throw InvalidArgument("fixed step must be positive");
    const double span = t_out - t;
    const auto n = std::max<long>(1, static_cast<long>(std::ceil(span / options_.fixed_step - 1e-9)));
    const double h = span / static_cast<double>(n);
    const double t0 = t;
    for (long i = 0; i < n && !stop_; ++i) {
      const double ti = t0 + static_cast<double>(i) * h;
      rhs(ti, y_, k1_);
      stage_ = y_ + (0.5 * h) * k1_;
      rhs(ti + 0.5 * h, stage_, k2_);
      stage_ = y_ + (0.5 * h) * k2_;
      rhs(ti + 0.5 * h, stage_, k3_);
      stage_ = y_ + h * k3_;
      rhs(ti + h, stage_, k4_);
      y_ += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
      ++diag.accepted_steps;
      after_step(diag, i + 1 == n ? t_out : t0 + static_cast<double>(i + 1) * h);
    }
    t = t_out;
    diag.rhs_evaluations = rhs_count_;
  }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(y_, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
  }

  void record(Trajectory& traj, std::size_t index, double t) {
    Diagnostics& diag = traj.diagnostics_;
    for (std::size_t i = 0; i < observables_.size(); ++i) {
      const MatrixXc& o = observables_[i].op.matrix();
      cplx v;
      if (density_) {
        v = (o.array() * y_.transpose().array()).sum();
      } else {
        v = y_.col(0).dot(o * y_.col(0));
      }
      traj.series_[i].second.push_back(v);
    }
    if (track_tail_) {
      diag.max_tail = std::max(
          diag.max_tail,
          tail_population(y_, !density_, signature_, static_cast<std::size_t>(options_.tail_slot)));
    }
    const double herm = generator_.hermiticity_defect(t);
    diag.max_hermiticity_defect = std::max(diag.max_hermiticity_defect, herm);
    if (herm > options_.hermiticity_tolerance) {
      throw InvalidArgument("time-dependent Hamiltonian is not Hermitian at t = " + std::to_string(t));
    }
    if (density_ && options_.positivity_stride > 0 && index % options_.positivity_stride == 0) {
      diag.min_eigenvalue = std::min(diag.min_eigenvalue, min_eigenvalue());
    }
    if (observer_) observer_(index, t, make_state());
  }

  SpaceSignature signature_;
  Generator generator_;
  JumpTerms jumps_;
  const std::vector<double>& times_;
  const std::vector<Observable>& observables_;
  IntegratorOptions options_;
  const SampleObserver& observer_;
  bool density_;
  bool track_tail_ = false;
  bool stop_ = false;

  MatrixXc y_;
  MatrixXc k1_, k2_, k3_, k4_, k5_, k6_, k7_, stage_, y_new_, err_, work_, scratch_, scratch_adj_, scratch_t_;
  bool fsal_valid_ = false;
  double fsal_t_ = 0.0;
  std::size_t rhs_count_ = 0;
};

Trajectory evolve_unitary(const Hamiltonian& h, const QuantumState& psi0,
                          const std::vector<double>& times,
                          const std::vector<Observable>& observables,
                          const IntegratorOptions& options, const SampleObserver& observer) {
  if (!psi0.is_vector()) throw InvalidState("evolve_unitary needs a state vector");
  Propagator prop(h, {}, psi0, times, observables, options, observer, false);
  return prop.run();
}

Trajectory evolve_lindblad(const Hamiltonian& h, const std::vector<CollapseChannel>& channels,
                           const QuantumState& rho0, const std::vector<double>& times,
                           const std::vector<Observable>& observables,
                           const IntegratorOptions& options, const SampleObserver& observer) {
  const QuantumState rho = rho0.is_vector() ? rho0.to_density() : rho0;
  Propagator prop(h, channels, rho, times, observables, options, observer, true);
  return prop.run();
}

double fock_tail_population(const QuantumState& state, std::size_t slot) {
  if (slot >= state.signature().size()) throw InvalidArgument("tail slot out of range");
  if (state.is_vector()) {
    MatrixXc y = state.psi();
    return tail_population(y, true, state.signature(), slot);
  }
  return tail_population(state.rho(), false, state.signature(), slot);
}

std::vector<double> linspace(double t0, double t1, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {t0};
  std::vector<double> out(n);
  const double dt = (t1 - t0) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = t0 + dt * static_cast<double>(i);
  out.back() = t1;
  return out;
}

TruncationChoice choose_truncation(const std::function<Trajectory(int n_max)>& simulate,
                                   int initial_n_max, double tail_tolerance, int cap) {
  if (!(tail_tolerance > 0.0 && tail_tolerance < 1.0)) {
    throw InvalidArgument("tail tolerance must lie in (0, 1)");
  }
  if (initial_n_max < 1) throw InvalidDimension("initial n_max must be >= 1");
  TruncationChoice choice;
  int n = initial_n_max;
  while (n <= cap) {
    Trajectory traj = simulate(n);
    choice.tested.push_back(n);
    const double tail = traj.diagnostics().max_tail;
    spdlog::debug("choose_truncation: n_max = {} tail = {:.3e}", n, tail);
    if (tail < tail_tolerance) {
      choice.n_max = n;
      choice.max_tail = tail;
      choice.trajectory.emplace(std::move(traj));
      return choice;
    }
    if (n == cap) break;
    n = std::min(2 * n, cap);
  }
  throw TruncationError("Fock truncation not converged up to n_max = " + std::to_string(cap) +
                        " at tail tolerance " + std::to_string(tail_tolerance));
}

}  // namespace spinmech
