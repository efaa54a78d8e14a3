#pragma once

#include <array>
#include <vector>

#include "radarhr/types.hpp"

namespace radarhr {

/// Second-order section, normalized so a0 == 1.
struct Biquad {
  std::array<double, 3> b{1.0, 0.0, 0.0};
  std::array<double, 2> a{0.0, 0.0};
};

Biquad butterworth_lowpass(double cutoff_hz, double rate_hz);
Biquad butterworth_highpass(double cutoff_hz, double rate_hz);

/// Cascade of 2nd-order Butterworth high-pass at low_hz and low-pass at high_hz
/// (4th-order band-pass overall).
std::vector<Biquad> butterworth_bandpass(double low_hz, double high_hz, double rate_hz);

/// Causal direct-form-II-transposed filtering through a cascade.
SeriesD sosfilt(const std::vector<Biquad>& sections, const SeriesD& x);

/// Zero-phase forward-backward filtering with odd reflection padding at both ends.
SeriesD filtfilt(const std::vector<Biquad>& sections, const SeriesD& x, Index pad);

/// Hamming-windowed sinc low-pass, unit DC gain. cutoff is in cycles/sample.
SeriesD fir_lowpass(double cutoff, Index taps);

Index next_pow2(Index n);

/// |DFT| of x zero-padded to nfft, bins 0..nfft/2.
SeriesD magnitude_spectrum(const SeriesD& x, Index nfft);

}  // namespace radarhr
