#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>

#include "radarhr/errors.hpp"
#include "radarhr/types.hpp"

namespace radarhr {

inline constexpr double kSpeedOfLight = 299'792'458.0;

/// Upper bound on chirps * fast_time_samples for a synthesized cube (2 GiB of
/// complex<double>).
inline constexpr Index kMaxCubeSamples = Index{1} << 27;

/// FMCW waveform parameters. Defaults describe a 60 GHz sensor sweeping
/// 3.2 GHz in 50 us, with the ADC window spanning the whole chirp.
struct RadarConfig {
  double carrier_freq_hz = 60e9;
  double bandwidth_hz = 3.2e9;
  double chirp_duration_s = 50e-6;
  Index fast_time_samples = 32;
  double slow_time_rate_hz = 2000.0;
  double adc_rate_hz = 640e3;

  double wavelength() const { return kSpeedOfLight / carrier_freq_hz; }
  double slope_hz_per_s() const { return bandwidth_hz / chirp_duration_s; }
  double beat_frequency(double range_m) const { return 2.0 * slope_hz_per_s() * range_m / kSpeedOfLight; }
  /// Meters per range bin; c/(2B) when the ADC window covers the full chirp.
  double range_resolution() const {
    return kSpeedOfLight * adc_rate_hz / (2.0 * slope_hz_per_s() * static_cast<double>(fast_time_samples));
  }
  /// Fractional range-FFT bin of a target at range_m.
  double range_bin(double range_m) const {
    return beat_frequency(range_m) * static_cast<double>(fast_time_samples) / adc_rate_hz;
  }

  void validate() const;
};

struct DisplacementTrace {
  SeriesD samples;  // meters
  double rate_hz = 0.0;
  double base_range_m = 0.2;

  void validate() const;
};

/// Dechirped IF samples, chirps x fast_time.
struct IQCube {
  ComplexMatrixD samples;
  RadarConfig config;

  Index chirps() const { return samples.rows(); }
  bool empty() const { return samples.size() == 0; }
};

struct RangeBinSelection {
  Index bin = 0;
  double peak_to_mean_db = 0.0;
  bool low_confidence = false;
};

struct PhaseExtraction {
  PhaseSeries phase;
  RangeBinSelection selection;
};

/// Phase change 4*pi*dR/lambda produced by a displacement dR.
template <typename Scalar>
Scalar displacement_to_phase(Scalar delta_r, Scalar wavelength) {
  if (!std::isfinite(delta_r) || !std::isfinite(wavelength)) {
    throw InvalidArgument("displacement_to_phase: non-finite input");
  }
  if (!(wavelength > Scalar(0))) throw InvalidArgument("displacement_to_phase: wavelength must be positive");
  return Scalar(4) * std::numbers::pi_v<Scalar> * delta_r / wavelength;
}

template <typename Derived>
auto displacement_to_phase(const Eigen::ArrayBase<Derived>& delta_r, typename Derived::Scalar wavelength) {
  using Scalar = typename Derived::Scalar;
  if (!(wavelength > Scalar(0)) || !std::isfinite(wavelength)) {
    throw InvalidArgument("displacement_to_phase: wavelength must be positive");
  }
  if (!delta_r.isFinite().all()) throw InvalidArgument("displacement_to_phase: non-finite input");
  return (Scalar(4) * std::numbers::pi_v<Scalar> * delta_r / wavelength).eval();
}

template <typename Derived>
auto phase_to_displacement(const Eigen::ArrayBase<Derived>& phase, typename Derived::Scalar wavelength) {
  using Scalar = typename Derived::Scalar;
  return (phase * wavelength / (Scalar(4) * std::numbers::pi_v<Scalar>)).eval();
}

/// Classic unwrapping: shift by 2*pi whenever a consecutive difference exceeds pi.
template <typename Derived>
Series<typename Derived::Scalar> unwrap_phase(const Eigen::MatrixBase<Derived>& wrapped) {
  using Scalar = typename Derived::Scalar;
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  Series<Scalar> out(wrapped.size());
  Scalar offset = 0;
  for (Index i = 0; i < wrapped.size(); ++i) {
    if (i > 0) {
      const Scalar d = wrapped(i) - wrapped(i - 1);
      if (d > pi) offset -= 2 * pi;
      else if (d < -pi) offset += 2 * pi;
    }
    out(i) = wrapped(i) + offset;
  }
  return out;
}

/// Dechirped IF cube for a point target moving by trace.samples around
/// trace.base_range_m. Complex white noise at snr_db (per sample, relative to
/// unit signal power) is added when given. Same seed, same cube.
IQCube synthesize_iq(const DisplacementTrace& trace, const RadarConfig& config,
                     std::optional<double> noise_snr_db, std::uint64_t seed);

/// Per-chirp DFT over fast time.
ComplexMatrixD range_profile(const IQCube& cube);

/// Bin with the largest mean slow-time magnitude (lowest index on ties).
RangeBinSelection select_range_bin(const ComplexMatrixD& profile);

PhaseSeries extract_unwrapped_phase(const ComplexMatrixD& profile, Index bin, double rate_hz);

/// Low-pass and downsample by the integer factor rate_hz / target_rate_hz.
PhaseSeries decimate(const PhaseSeries& phase, double target_rate_hz);

/// range_profile -> select_range_bin -> extract_unwrapped_phase -> decimate.
PhaseExtraction extract_phase(const IQCube& cube, double target_rate_hz);

}  // namespace radarhr
