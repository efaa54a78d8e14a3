#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "radarhr/errors.hpp"
#include "radarhr/types.hpp"

namespace radarhr {

enum class OmegaInit { Uniform, Zero, Random };

struct VmdParams {
  Index k_modes = 5;
  double alpha = 2000.0;
  /// Dual ascent step. 0 leaves the reconstruction constraint unenforced,
  /// so noise is not forced into the modes.
  double tau = 0.0;
  double tolerance = 1e-6;
  int max_iterations = 500;
  OmegaInit init_mode = OmegaInit::Uniform;
  std::uint64_t init_seed = 0;

  void validate() const {
    if (k_modes < 1) throw InvalidArgument("VmdParams: k_modes must be >= 1");
    if (!(alpha > 0)) throw InvalidArgument("VmdParams: alpha must be > 0");
    if (!(tau >= 0)) throw InvalidArgument("VmdParams: tau must be >= 0");
    if (!(tolerance > 0)) throw InvalidArgument("VmdParams: tolerance must be > 0");
    if (max_iterations < 1) throw InvalidArgument("VmdParams: max_iterations must be >= 1");
  }
};

/// Decomposition result. Modes are columns of `modes`, sorted by ascending
/// center frequency.
template <typename Scalar>
struct ImfSet {
  ModeMatrix<Scalar> modes;
  Series<Scalar> center_freqs_hz;
  Series<Scalar> residual;
  int iterations_used = 0;
  bool converged = false;
  /// Value of the relative-change metric at the last iteration.
  Scalar final_change = 0;
  Scalar rate_hz = 0;

  Index k() const { return modes.cols(); }
  Index length() const { return modes.rows(); }
};

namespace detail {

template <typename Scalar>
Series<Scalar> initial_omegas(const VmdParams& p, Index signal_len) {
  Series<Scalar> omega(p.k_modes);
  switch (p.init_mode) {
    case OmegaInit::Uniform:
      for (Index k = 0; k < p.k_modes; ++k) omega(k) = Scalar(0.5) * Scalar(k) / Scalar(p.k_modes);
      break;
    case OmegaInit::Zero:
      omega.setZero();
      break;
    case OmegaInit::Random: {
      // Log-uniform between the lowest resolvable frequency and Nyquist.
      std::mt19937_64 rng(p.init_seed);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      const double lo = std::log(1.0 / static_cast<double>(signal_len));
      const double hi = std::log(0.5);
      for (Index k = 0; k < p.k_modes; ++k) omega(k) = static_cast<Scalar>(std::exp(lo + (hi - lo) * u(rng)));
      std::sort(omega.data(), omega.data() + omega.size());
      break;
    }
  }
  return omega;
}

}  // namespace detail

/// Variational mode decomposition of a real signal sampled at rate_hz.
///
/// Runs the alternating Fourier-domain scheme on the mirror-extended signal
/// (half the length reflected on each side): each mode is the Wiener-filtered
/// one-sided residual spectrum with gain 1 / (1 + 2*alpha*(f - f_k)^2), where
/// f is in cycles/sample; each center frequency is the power-weighted mean
/// frequency of its mode; the dual variable ascends with step tau. Stops when
/// sum_k |u_k^{n+1} - u_k^n|^2 / |u_k^n|^2 falls below params.tolerance.
template <typename Derived>
ImfSet<typename Derived::Scalar> decompose(const Eigen::MatrixBase<Derived>& signal,
                                           typename Derived::Scalar rate_hz, const VmdParams& params) {
  using Scalar = typename Derived::Scalar;
  using Complex = std::complex<Scalar>;
  using CArray = Eigen::Array<Complex, Eigen::Dynamic, 1>;
  using RArray = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  params.validate();
  const Index len = signal.size();
  if (len < 16) throw InvalidArgument("decompose: signal needs at least 16 samples");
  if (!(rate_hz > 0)) throw InvalidArgument("decompose: rate must be positive");
  if (!all_finite(signal)) throw InvalidArgument("decompose: non-finite sample");
  if (params.k_modes > len / 4) throw OverDecomposition("decompose: k_modes exceeds length/4");

  const Index K = params.k_modes;
  const Index head = len / 2;
  const Index tail = len - head;
  const Index T = 2 * len;
  const Index H = T / 2;  // non-negative frequency bins 0..H-1

  Series<Scalar> mirrored(T);
  mirrored.head(head) = signal.head(head).reverse();
  mirrored.segment(head, len) = signal;
  mirrored.tail(tail) = signal.tail(tail).reverse();

  Eigen::FFT<Scalar> fft;
  Eigen::Matrix<Complex, Eigen::Dynamic, 1> spectrum;
  fft.fwd(spectrum, mirrored);
  const CArray f_plus = spectrum.head(H).array();
  const RArray freqs = RArray::LinSpaced(H, Scalar(0), Scalar(H - 1)) / Scalar(T);

  Eigen::Array<Complex, Eigen::Dynamic, Eigen::Dynamic> u = Eigen::Array<Complex, Eigen::Dynamic, Eigen::Dynamic>::Zero(H, K);
  CArray sum_all = CArray::Zero(H);
  CArray lambda = CArray::Zero(H);
  Series<Scalar> omega = detail::initial_omegas<Scalar>(params, len);
  const Scalar two_alpha = Scalar(2) * static_cast<Scalar>(params.alpha);
  const Scalar tau = static_cast<Scalar>(params.tau);

  ImfSet<Scalar> out;
  out.rate_hz = rate_hz;
  const Scalar* fr = freqs.data();
  const Complex* fp = f_plus.data();
  const Complex* lam = lambda.data();
  Complex* sum = sum_all.data();
  for (int iter = 1; iter <= params.max_iterations; ++iter) {
    Scalar change = 0;
    for (Index k = 0; k < K; ++k) {
      // One fused pass: Wiener update, running sum, change metric, spectral centroid.
      Complex* uk = &u(0, k);
      const Scalar wk = omega(k);
      Scalar old_norm = 0, diff = 0, power = 0, weighted = 0;
      for (Index b = 0; b < H; ++b) {
        const Complex old = uk[b];
        const Scalar d = fr[b] - wk;
        const Complex next = (fp[b] - (sum[b] - old) - lam[b] * Scalar(0.5)) * (Scalar(1) / (Scalar(1) + two_alpha * d * d));
        const Complex delta = next - old;
        old_norm += std::norm(old);
        diff += std::norm(delta);
        sum[b] += delta;
        uk[b] = next;
        const Scalar p = std::norm(next);
        power += p;
        weighted += fr[b] * p;
      }
      if (old_norm > 0) {
        change += diff / old_norm;
      } else if (diff > 0) {
        change = std::numeric_limits<Scalar>::infinity();
      }
      if (power > 0) omega(k) = weighted / power;
    }
    if (tau > 0) lambda += tau * (sum_all - f_plus);
    out.iterations_used = iter;
    out.final_change = change;
    if (change < static_cast<Scalar>(params.tolerance)) {
      out.converged = true;
      break;
    }
  }

  // Hermitian completion, inverse FFT, crop the mirror margins.
  std::vector<Index> order(static_cast<std::size_t>(K));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return omega(a) < omega(b); });

  out.modes.resize(len, K);
  out.center_freqs_hz.resize(K);
  Eigen::Matrix<Complex, Eigen::Dynamic, 1> full(T), time(T);
  for (Index j = 0; j < K; ++j) {
    const Index k = order[static_cast<std::size_t>(j)];
    full.setZero();
    full.head(H) = u.col(k).matrix();
    full(0) = Complex(full(0).real(), Scalar(0));
    full(H) = Complex(0);
    for (Index b = 1; b < H; ++b) full(T - b) = std::conj(full(b));
    fft.inv(time, full);
    out.modes.col(j) = time.segment(head, len).real();
    out.center_freqs_hz(j) = omega(k) * rate_hz;
  }
  out.residual = signal - out.modes.rowwise().sum();
  return out;
}

}  // namespace radarhr
