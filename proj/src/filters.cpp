#include "radarhr/filters.hpp"

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "radarhr/errors.hpp"

namespace radarhr {

namespace {

constexpr double kButterQ = std::numbers::sqrt2 / 2.0;

void check_cutoff(double cutoff_hz, double rate_hz) {
  if (!(rate_hz > 0) || !(cutoff_hz > 0) || !(cutoff_hz < rate_hz / 2)) {
    throw InvalidArgument("filter cutoff must lie in (0, rate/2)");
  }
}

}  // namespace

// Bilinear-transform biquads with frequency prewarping.
Biquad butterworth_lowpass(double cutoff_hz, double rate_hz) {
  check_cutoff(cutoff_hz, rate_hz);
  const double w0 = 2.0 * std::numbers::pi * cutoff_hz / rate_hz;
  const double cw = std::cos(w0);
  const double alpha = std::sin(w0) / (2.0 * kButterQ);
  const double a0 = 1.0 + alpha;
  Biquad s;
  s.b = {(1.0 - cw) / 2.0 / a0, (1.0 - cw) / a0, (1.0 - cw) / 2.0 / a0};
  s.a = {-2.0 * cw / a0, (1.0 - alpha) / a0};
  return s;
}

Biquad butterworth_highpass(double cutoff_hz, double rate_hz) {
  check_cutoff(cutoff_hz, rate_hz);
  const double w0 = 2.0 * std::numbers::pi * cutoff_hz / rate_hz;
  const double cw = std::cos(w0);
  const double alpha = std::sin(w0) / (2.0 * kButterQ);
  const double a0 = 1.0 + alpha;
  Biquad s;
  s.b = {(1.0 + cw) / 2.0 / a0, -(1.0 + cw) / a0, (1.0 + cw) / 2.0 / a0};
  s.a = {-2.0 * cw / a0, (1.0 - alpha) / a0};
  return s;
}

std::vector<Biquad> butterworth_bandpass(double low_hz, double high_hz, double rate_hz) {
  if (!(low_hz < high_hz)) throw InvalidArgument("band-pass requires low < high");
  return {butterworth_highpass(low_hz, rate_hz), butterworth_lowpass(high_hz, rate_hz)};
}

SeriesD sosfilt(const std::vector<Biquad>& sections, const SeriesD& x) {
  SeriesD y = x;
  for (const auto& s : sections) {
    double z1 = 0.0, z2 = 0.0;
    for (Index i = 0; i < y.size(); ++i) {
      const double in = y(i);
      const double out = s.b[0] * in + z1;
      z1 = s.b[1] * in - s.a[0] * out + z2;
      z2 = s.b[2] * in - s.a[1] * out;
      y(i) = out;
    }
  }
  return y;
}

SeriesD filtfilt(const std::vector<Biquad>& sections, const SeriesD& x, Index pad) {
  const Index n = x.size();
  if (n == 0) return x;
  pad = std::min(pad, n - 1);
  SeriesD ext(n + 2 * pad);
  for (Index i = 0; i < pad; ++i) {
    ext(pad - 1 - i) = 2.0 * x(0) - x(i + 1);
    ext(pad + n + i) = 2.0 * x(n - 1) - x(n - 2 - i);
  }
  ext.segment(pad, n) = x;
  SeriesD fwd = sosfilt(sections, ext);
  SeriesD bwd = sosfilt(sections, fwd.reverse().eval());
  return bwd.reverse().segment(pad, n);
}

SeriesD fir_lowpass(double cutoff, Index taps) {
  if (taps < 1 || taps % 2 == 0) throw InvalidArgument("fir_lowpass: taps must be odd and positive");
  if (!(cutoff > 0 && cutoff <= 0.5)) throw InvalidArgument("fir_lowpass: cutoff must be in (0, 0.5]");
  SeriesD h(taps);
  const Index mid = taps / 2;
  for (Index i = 0; i < taps; ++i) {
    const double k = static_cast<double>(i - mid);
    const double sinc = k == 0 ? 2.0 * cutoff : std::sin(2.0 * std::numbers::pi * cutoff * k) / (std::numbers::pi * k);
    const double w = taps == 1 ? 1.0 : 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(taps - 1));
    h(i) = sinc * w;
  }
  return h / h.sum();
}

Index next_pow2(Index n) {
  Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

SeriesD magnitude_spectrum(const SeriesD& x, Index nfft) {
  if (nfft < x.size()) throw InvalidArgument("magnitude_spectrum: nfft shorter than input");
  SeriesD padded = SeriesD::Zero(nfft);
  padded.head(x.size()) = x;
  Eigen::FFT<double> fft;
  Eigen::VectorXcd spec;
  fft.fwd(spec, padded);
  return spec.head(nfft / 2 + 1).cwiseAbs();
}

}  // namespace radarhr
