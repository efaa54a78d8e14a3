#include "radarhr/signal_model.hpp"

#include <cmath>
#include <random>
#include <string>

#include <unsupported/Eigen/FFT>

#include "radarhr/filters.hpp"

namespace radarhr {

void RadarConfig::validate() const {
  if (!(carrier_freq_hz > 0) || !(bandwidth_hz > 0) || !(chirp_duration_s > 0)) {
    throw InvalidArgument("RadarConfig: carrier, bandwidth and chirp duration must be positive");
  }
  if (fast_time_samples < 1 || !(adc_rate_hz > 0) || !(slow_time_rate_hz > 0)) {
    throw InvalidArgument("RadarConfig: sample counts and rates must be positive");
  }
  // Allow a relative rounding slack on the window-fits-in-chirp check.
  if (static_cast<double>(fast_time_samples) / adc_rate_hz > chirp_duration_s * (1.0 + 1e-9)) {
    throw InvalidArgument("RadarConfig: fast-time window exceeds chirp duration");
  }
}

void DisplacementTrace::validate() const {
  if (!(rate_hz > 0)) throw InvalidArgument("DisplacementTrace: rate_hz must be positive");
  if (!all_finite(samples)) throw InvalidArgument("DisplacementTrace: non-finite sample");
  if (samples.size() > 0 && !(samples.cwiseAbs().maxCoeff() < base_range_m)) {
    throw InvalidArgument("DisplacementTrace: |displacement| must stay below base range");
  }
}

IQCube synthesize_iq(const DisplacementTrace& trace, const RadarConfig& config,
                     std::optional<double> noise_snr_db, std::uint64_t seed) {
  config.validate();
  trace.validate();
  if (std::abs(trace.rate_hz - config.slow_time_rate_hz) > 1e-9 * config.slow_time_rate_hz) {
    throw InvalidArgument("synthesize_iq: trace rate must equal slow-time rate");
  }
  const Index chirps = trace.samples.size();
  const Index fast = config.fast_time_samples;
  if (chirps > 0 && chirps > kMaxCubeSamples / fast) {
    throw CapacityError("synthesize_iq: trace of " + std::to_string(chirps) + " chirps exceeds cube capacity");
  }

  IQCube cube;
  cube.config = config;
  cube.samples.resize(chirps, fast);
  if (chirps == 0) return cube;

  const double two_pi = 2.0 * std::numbers::pi;
  const double lambda = config.wavelength();
  const double dt = 1.0 / config.adc_rate_hz;

  for (Index n = 0; n < chirps; ++n) {
    const double range = trace.base_range_m + trace.samples(n);
    const double fb = config.beat_frequency(range);
    const double phase0 = displacement_to_phase(range, lambda);
    for (Index m = 0; m < fast; ++m) {
      cube.samples(n, m) = std::polar(1.0, two_pi * fb * static_cast<double>(m) * dt + phase0);
    }
  }

  if (noise_snr_db) {
    if (!std::isfinite(*noise_snr_db)) throw InvalidArgument("synthesize_iq: non-finite SNR");
    std::mt19937_64 rng(seed);
    const double sigma = std::sqrt(std::pow(10.0, -*noise_snr_db / 10.0) / 2.0);
    std::normal_distribution<double> noise(0.0, sigma);
    for (Index n = 0; n < chirps; ++n) {
      for (Index m = 0; m < fast; ++m) {
        const double re = noise(rng);
        const double im = noise(rng);
        cube.samples(n, m) += std::complex<double>(re, im);
      }
    }
  }
  return cube;
}

ComplexMatrixD range_profile(const IQCube& cube) {
  if (cube.empty()) throw InvalidArgument("range_profile: empty cube");
  if (cube.samples.cols() != cube.config.fast_time_samples) {
    throw InvalidArgument("range_profile: cube width does not match fast_time_samples");
  }
  const Index fast = cube.samples.cols();
  ComplexMatrixD profile(cube.samples.rows(), fast);
  Eigen::FFT<double> fft;
  Eigen::VectorXcd in(fast), out(fast);
  for (Index n = 0; n < cube.samples.rows(); ++n) {
    in = cube.samples.row(n).transpose();
    fft.fwd(out, in);
    profile.row(n) = out.transpose();
  }
  return profile;
}

RangeBinSelection select_range_bin(const ComplexMatrixD& profile) {
  if (profile.size() == 0) throw InvalidArgument("select_range_bin: empty profile");
  const Eigen::RowVectorXd mean_mag = profile.cwiseAbs().colwise().mean();
  RangeBinSelection sel;
  for (Index b = 1; b < mean_mag.size(); ++b) {
    if (mean_mag(b) > mean_mag(sel.bin)) sel.bin = b;
  }
  const double overall = mean_mag.mean();
  sel.peak_to_mean_db = overall > 0 ? 20.0 * std::log10(mean_mag(sel.bin) / overall) : 0.0;
  sel.low_confidence = sel.peak_to_mean_db < 3.0;
  return sel;
}

PhaseSeries extract_unwrapped_phase(const ComplexMatrixD& profile, Index bin, double rate_hz) {
  if (bin < 0 || bin >= profile.cols()) throw InvalidArgument("extract_unwrapped_phase: bin out of range");
  if (!(rate_hz > 0)) throw InvalidArgument("extract_unwrapped_phase: rate must be positive");
  SeriesD wrapped(profile.rows());
  for (Index n = 0; n < profile.rows(); ++n) wrapped(n) = std::arg(profile(n, bin));
  return PhaseSeries{unwrap_phase(wrapped), rate_hz, bin};
}

PhaseSeries decimate(const PhaseSeries& phase, double target_rate_hz) {
  if (!(target_rate_hz > 0) || !(phase.rate_hz > 0)) throw InvalidArgument("decimate: rates must be positive");
  const double ratio = phase.rate_hz / target_rate_hz;
  const auto factor = static_cast<Index>(std::llround(ratio));
  if (factor < 1 || std::abs(ratio - static_cast<double>(factor)) > 1e-6 * ratio) {
    throw InvalidArgument("decimate: rate ratio must be a positive integer");
  }
  if (factor == 1) return phase;

  const SeriesD h = fir_lowpass(0.4 / static_cast<double>(factor), 8 * factor + 1);
  const Index half = h.size() / 2;
  const Index n = phase.size();
  const Index out_n = (n + factor - 1) / factor;
  // Even reflection about the end samples.
  auto at = [&](Index i) {
    if (n == 1) return phase.phase(0);
    while (i < 0 || i >= n) i = i < 0 ? -i : 2 * (n - 1) - i;
    return phase.phase(i);
  };
  PhaseSeries out{SeriesD(out_n), phase.rate_hz / static_cast<double>(factor), phase.origin_bin};
  for (Index k = 0; k < out_n; ++k) {
    const Index c = k * factor;
    double acc = 0.0;
    if (c - half >= 0 && c + half < n) {
      acc = h.dot(phase.phase.segment(c - half, h.size()));
    } else {
      for (Index t = 0; t < h.size(); ++t) acc += h(t) * at(c - half + t);
    }
    out.phase(k) = acc;
  }
  return out;
}

PhaseExtraction extract_phase(const IQCube& cube, double target_rate_hz) {
  const ComplexMatrixD profile = range_profile(cube);
  PhaseExtraction ex;
  ex.selection = select_range_bin(profile);
  ex.phase = decimate(extract_unwrapped_phase(profile, ex.selection.bin, cube.config.slow_time_rate_hz), target_rate_hz);
  return ex;
}

}  // namespace radarhr
