#include "spinmech/transforms.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <spdlog/spdlog.h>

#include <cmath>
#include <numbers>

#include "spinmech/errors.hpp"

namespace spinmech {

namespace {

MatrixXc squeeze_generator(double r, int n_max) {
  const MatrixXc a = fock_annihilation(n_max).matrix();
  const MatrixXc ad = a.adjoint();
  return (r / 2.0) * (a * a - ad * ad);
}

void check_squeeze_truncation(double r, int n_max) {
  const double s2 = std::sinh(r) * std::sinh(r);
  if (s2 > n_max / 2.0) {
    throw TruncationError("squeeze_operator: sinh^2 r = " + std::to_string(s2) +
                          " exceeds n_max / 2 = " + std::to_string(n_max / 2.0));
  }
  if (s2 > n_max / 4.0) {
    spdlog::warn("squeeze_operator: sinh^2 r = {:.3f} > n_max / 4, edge rows are unreliable", s2);
  }
}

// Rows/columns whose boson level is below `levels`.
std::vector<Eigen::Index> low_phonon_indices(const SpaceSignature& sig, int levels) {
  Eigen::Index stride = 1;
  for (std::size_t s = 1; s < sig.size(); ++s) stride *= sig.dim(s);
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < sig.total(); ++i) {
    if (i / stride < levels) idx.push_back(i);
  }
  return idx;
}

double restricted_norm(const MatrixXc& m, const std::vector<Eigen::Index>& idx) {
  return spectral_norm(m(idx, idx));
}

struct Residuals {
  double plain = 0.0;
  double flipped = 0.0;
  double pair = 0.0;
};

Residuals sw_residuals(const ModelParams& params, int low_levels) {
  const SqueezeParams squeeze = derive_squeeze_params(params);
  const SpaceSignature sig = params.signature();
  const LambDickeReport ld = lamb_dicke_eta(squeeze);

  const Operator rabi = build_squeezed_rabi(params, squeeze, sig);
  const Operator conj = conjugate(rabi, polaron_transform(ld.eta, sig));

  const Operator ising = build_ising(params, squeeze);
  const SpaceSignature spins = SpaceSignature::spins(params.n_spins);
  Operator hz = Operator::zero(spins);
  for (int j = 0; j < params.n_spins; ++j) {
    hz = hz + (params.delta_dg[static_cast<std::size_t>(j)] / 2.0) *
                  spin_operator(PauliAxis::kZ, j, spins, 0);
  }
  const MatrixXc id_ph = MatrixXc::Identity(sig.dim(0), sig.dim(0));
  const MatrixXc id_sp = MatrixXc::Identity(spins.total(), spins.total());
  const MatrixXc phonon = squeeze.delta_m_eff * kron(fock_number(params.n_max).matrix(), id_sp);

  const auto idx = low_phonon_indices(sig, low_levels);
  Residuals out;
  out.plain = restricted_norm(conj.matrix() - phonon - kron(id_ph, ising.matrix()), idx);
  const MatrixXc flipped = 2.0 * hz.matrix() - ising.matrix();
  out.flipped = restricted_norm(conj.matrix() - phonon - kron(id_ph, flipped), idx);

  if (params.n_spins >= 2) {
    const Eigen::Index ns = spins.total();
    const MatrixXc vac = conj.matrix().topLeftCorner(ns, ns);
    const MatrixXc xx = (spin_operator(PauliAxis::kX, 0, spins, 0) *
                         spin_operator(PauliAxis::kX, 1, spins, 0)).matrix();
    out.pair = (vac * xx).trace().real() / static_cast<double>(ns);
  }
  return out;
}

}  // namespace

FrameTransform squeeze_operator(double r, int n_max) {
  if (n_max < 1) throw InvalidDimension("n_max must be >= 1");
  check_squeeze_truncation(r, n_max);
  const Operator u(SpaceSignature({n_max + 1}), expm_antihermitian(squeeze_generator(r, n_max)));
  return {u, "squeeze(" + std::to_string(r) + ")"};
}

FrameTransform squeeze_operator(double r, const SpaceSignature& signature) {
  const int n_max = signature.dim(0) - 1;
  FrameTransform local = squeeze_operator(r, n_max);
  return {embed(local.unitary, 0, signature), local.label};
}

FrameTransform polaron_transform(const std::vector<double>& eta, const SpaceSignature& signature) {
  if (eta.size() + 1 != signature.size()) {
    throw SignatureMismatch("polaron_transform: one eta per spin slot expected");
  }
  const Operator a = boson_annihilation(signature);
  const Operator p = a.adjoint() - a;
  Operator gen = Operator::zero(signature);
  std::string label = "polaron(";
  for (std::size_t k = 0; k < eta.size(); ++k) {
    gen = gen + eta[k] * (p * spin_operator(PauliAxis::kX, static_cast<int>(k), signature));
    label += (k ? "," : "") + std::to_string(eta[k]);
  }
  return {Operator(signature, expm_antihermitian(gen.matrix())), label + ")"};
}

Operator conjugate(const Operator& h, const FrameTransform& frame) {
  require_same_signature(h.signature(), frame.unitary.signature(), "conjugate");
  const MatrixXc& u = frame.unitary.matrix();
  return {h.signature(), u * h.matrix() * u.adjoint()};
}

SchriefferWolffReport schrieffer_wolff_check(const ModelParams& params, int low_levels,
                                             double max_eta) {
  params.validate();
  if (low_levels < 1 || low_levels > params.n_max + 1) {
    throw InvalidArgument("low_levels must lie in [1, n_max + 1]");
  }
  const SqueezeParams squeeze = derive_squeeze_params(params);
  SchriefferWolffReport rep;
  rep.eta = lamb_dicke_eta(squeeze).eta_max;
  rep.low_levels = low_levels;
  if (rep.eta > max_eta) {
    throw InvalidArgument("schrieffer_wolff_check: eta = " + std::to_string(rep.eta) +
                          " is too large for the expansion");
  }
  const Residuals full = sw_residuals(params, low_levels);
  ModelParams half = params;
  for (double& l : half.lambda_j) l *= 0.5;
  const Residuals halved = sw_residuals(half, low_levels);

  rep.residual = full.plain;
  rep.residual_half = halved.plain;
  rep.ratio = halved.plain > 0.0 ? full.plain / halved.plain : 0.0;
  rep.residual_flipped = full.flipped;
  rep.residual_flipped_half = halved.flipped;
  rep.pair_coefficient = full.pair;
  return rep;
}

VectorXc coherent_ket(cplx alpha, int n_max, double tail_tolerance) {
  if (n_max < 1) throw InvalidDimension("n_max must be >= 1");
  VectorXc c(n_max + 1);
  const double n_mean = std::norm(alpha);
  // c_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!), built recursively
  c(0) = std::exp(-n_mean / 2.0);
  for (int n = 1; n <= n_max; ++n) c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  const double kept = c.squaredNorm();
  const double tail = 1.0 - kept;
  if (tail > tail_tolerance) {
    throw TruncationError("coherent state |alpha|^2 = " + std::to_string(n_mean) +
                          " loses population " + std::to_string(tail) + " at n_max = " +
                          std::to_string(n_max));
  }
  return c / std::sqrt(kept);
}

QuantumState coherent_state(cplx alpha, int n_max, double tail_tolerance) {
  return QuantumState::vector(SpaceSignature({n_max + 1}), coherent_ket(alpha, n_max, tail_tolerance));
}

cplx cat_alpha(double lambda, double delta_m, const SqueezeSchedule& schedule, double t,
               double tolerance) {
  using boost::math::quadrature::gauss_kronrod;
  if (t < 0.0) throw InvalidArgument("cat_alpha: t must be non-negative");
  if (t == 0.0) return {};
  auto detuning = [&](double s) { return delta_m / std::cosh(2.0 * schedule.value(s)); };

  // Cumulative G(s) = int_0^s Delta_m on a panel grid; G inside a panel by one more quadrature.
  const double span_rate = std::max(std::abs(delta_m), 1.0);
  const auto panels = static_cast<std::size_t>(std::ceil(t * span_rate / 2.0)) + 1;
  const double h = t / static_cast<double>(panels);
  std::vector<double> g_nodes(panels + 1, 0.0);
  for (std::size_t i = 0; i < panels; ++i) {
    double err = 0.0;
    g_nodes[i + 1] = g_nodes[i] + gauss_kronrod<double, 31>::integrate(
                                      detuning, h * i, h * (i + 1), 10, 1e-14, &err);
  }
  auto cumulative = [&](double s) {
    auto i = static_cast<std::size_t>(std::floor(s / h));
    i = std::min(i, panels - 1);
    const double s0 = h * static_cast<double>(i);
    if (s == s0) return g_nodes[i];
    return g_nodes[i] + gauss_kronrod<double, 15>::integrate(detuning, s0, s, 0, 0.0);
  };

  cplx integral{};
  double total_err = 0.0;
  for (std::size_t i = 0; i < panels; ++i) {
    double err_re = 0.0, err_im = 0.0;
    auto re = [&](double s) { return std::exp(schedule.value(s)) * std::cos(cumulative(s)); };
    auto im = [&](double s) { return std::exp(schedule.value(s)) * std::sin(cumulative(s)); };
    const double a = h * i, b = h * (i + 1);
    integral += cplx{gauss_kronrod<double, 31>::integrate(re, a, b, 12, 1e-13, &err_re),
                     gauss_kronrod<double, 31>::integrate(im, a, b, 12, 1e-13, &err_im)};
    total_err += err_re + err_im;
  }
  const cplx alpha = lambda / (2.0 * kI) * std::exp(-kI * g_nodes.back()) * integral;
  if (std::abs(lambda) / 2.0 * total_err > tolerance) {
    throw NumericalFailure("cat_alpha quadrature did not converge (error estimate " +
                           std::to_string(total_err) + ")");
  }
  return alpha;
}

QuantumState target_cat_state(cplx alpha, int n_max) {
  const VectorXc plus = coherent_ket(alpha, n_max);
  const VectorXc minus = coherent_ket(-alpha, n_max);
  const double s = 1.0 / std::numbers::sqrt2;
  const VectorXc x_plus = s * (spin_ket(true) + spin_ket(false));
  const VectorXc x_minus = s * (spin_ket(true) - spin_ket(false));
  VectorXc psi = kron(plus, x_plus) - kron(minus, x_minus);
  psi.normalize();
  return QuantumState::vector(SpaceSignature::boson_spins(n_max, 1), std::move(psi));
}

QuantumState ghz_target(int n_spins) {
  if (n_spins < 2) throw InvalidArgument("ghz_target needs N >= 2");
  const SpaceSignature sig = SpaceSignature::spins(n_spins);
  VectorXc psi = VectorXc::Zero(sig.total());
  const cplx phase = std::exp(kI * (std::numbers::pi / 4.0));
  // |d...d> is index 0 and |g...g> the last index in the (|d>, |g>) ordering.
  psi(0) = phase / std::numbers::sqrt2;
  psi(sig.total() - 1) = std::conj(phase) / std::numbers::sqrt2;
  return QuantumState::vector(sig, std::move(psi));
}

}  // namespace spinmech
