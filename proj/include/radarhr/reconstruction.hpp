#pragma once

#include <vector>

#include "radarhr/errors.hpp"
#include "radarhr/vmd.hpp"

namespace radarhr {

/// Cardiac band, inclusive at both ends. 0.5-2 Hz is 30-120 BPM.
struct BandSpec {
  double low_hz = 0.5;
  double high_hz = 2.0;

  void validate() const {
    if (!(low_hz > 0 && low_hz < high_hz)) throw InvalidArgument("BandSpec: need 0 < low_hz < high_hz");
  }
  bool contains(double f_hz) const { return f_hz >= low_hz && f_hz <= high_hz; }
};

template <typename Scalar>
struct CmsSignal {
  Series<Scalar> signal;
  /// No mode fell inside the band, or the selected modes carry no energy;
  /// signal is all zeros either way.
  bool empty_band = false;
};

/// Indices of modes whose center frequency lies in the band, ascending by frequency.
template <typename Scalar>
std::vector<Index> select_cardiac_modes(const ImfSet<Scalar>& imfs, const BandSpec& band) {
  band.validate();
  std::vector<Index> idx;
  for (Index k = 0; k < imfs.center_freqs_hz.size(); ++k) {
    if (band.contains(static_cast<double>(imfs.center_freqs_hz(k)))) idx.push_back(k);
  }
  return idx;
}

template <typename Scalar>
CmsSignal<Scalar> reconstruct(const ImfSet<Scalar>& imfs, const std::vector<Index>& indices) {
  CmsSignal<Scalar> out{Series<Scalar>::Zero(imfs.length()), indices.empty()};
  for (const Index k : indices) {
    if (k < 0 || k >= imfs.k()) throw InvalidArgument("reconstruct: mode index out of range");
    out.signal += imfs.modes.col(k);
  }
  // Zero-energy modes keep their initial center frequency, so they can sit in
  // the band without carrying anything.
  if (!out.signal.isZero(0)) return out;
  out.empty_band = true;
  return out;
}

}  // namespace radarhr
