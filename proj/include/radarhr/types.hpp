#pragma once

#include <complex>

#include <Eigen/Core>

namespace radarhr {

using Eigen::Index;

template <typename Scalar>
using Series = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using ModeMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Chirp-major complex matrix: one row per chirp (slow time), one column per
/// fast-time sample or range bin.
template <typename Scalar>
using ComplexMatrix =
    Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using SeriesD = Series<double>;
using ComplexMatrixD = ComplexMatrix<double>;

/// Unwrapped slow-time phase, radians.
struct PhaseSeries {
  SeriesD phase;
  double rate_hz = 0.0;
  /// Range bin the phase came from; -1 when unknown (e.g. read from CSV).
  Index origin_bin = -1;

  Index size() const { return phase.size(); }
  double duration_s() const { return rate_hz > 0 ? static_cast<double>(phase.size()) / rate_hz : 0.0; }
};

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& x) {
  return x.derived().array().isFinite().all();
}

}  // namespace radarhr
