#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "radarhr/errors.hpp"
#include "radarhr/types.hpp"

namespace radarhr {

struct PeakConfig {
  double window_s = 2.0;
  double threshold_k = 0.8;
  double refractory_s = 0.5;

  void validate() const {
    if (!(window_s > 0)) throw InvalidArgument("PeakConfig: window_s must be > 0");
    if (!(refractory_s > 0)) throw InvalidArgument("PeakConfig: refractory_s must be > 0");
    if (!std::isfinite(threshold_k)) throw InvalidArgument("PeakConfig: threshold_k must be finite");
  }
};

struct BpmEstimate {
  double bpm = 0.0;
  std::vector<Index> peak_indices;
  std::string method_tag;
  /// 60 / median inter-beat interval; NaN with fewer than two peaks.
  double ibi_median_bpm = std::numeric_limits<double>::quiet_NaN();
  bool low_confidence = false;
  bool empty_band = false;
};

/// R-peak picking: local maxima (a flat top counts once, at its middle) above
/// the centered-window threshold mean + k*std (windows truncated at the edges),
/// then a refractory pass in which a later peak inside the refractory period
/// replaces the accepted one only when strictly taller.
template <typename Derived>
std::vector<Index> detect_r_peaks(const Eigen::MatrixBase<Derived>& cms, double rate_hz, const PeakConfig& cfg = {}) {
  cfg.validate();
  if (!(rate_hz > 0)) throw InvalidArgument("detect_r_peaks: rate must be positive");
  const Index n = cms.size();
  const auto window = std::max<Index>(1, static_cast<Index>(std::llround(cfg.window_s * rate_hz)));
  if (n < window) throw InvalidArgument("detect_r_peaks: series shorter than one threshold window");
  const auto x = cms.template cast<double>().eval();
  const Index half = window / 2;
  const double refractory = cfg.refractory_s * rate_hz;

  std::vector<Index> peaks;
  for (Index start = 1; start + 1 < n; ++start) {
    if (!(x(start) > x(start - 1))) continue;
    // A flat top (equal neighbours, e.g. a crest between two samples) counts
    // once, at its middle sample.
    Index end = start;
    while (end + 1 < n && x(end + 1) == x(start)) ++end;
    if (end + 1 >= n || !(x(end + 1) < x(start))) continue;
    const Index i = start + (end - start) / 2;
    start = end;
    const Index lo = std::max<Index>(0, i - half);
    const Index hi = std::min<Index>(n - 1, i + half);
    const auto seg = x.segment(lo, hi - lo + 1).array();
    const double mean = seg.mean();
    const double sd = std::sqrt((seg - mean).square().mean());
    if (!(x(i) > mean + cfg.threshold_k * sd)) continue;

    if (peaks.empty() || static_cast<double>(i - peaks.back()) >= refractory) {
      peaks.push_back(i);
    } else if (x(i) > x(peaks.back())) {
      peaks.back() = i;
    }
  }
  return peaks;
}

double median_ibi_bpm(const std::vector<Index>& peaks, double rate_hz);

/// Count-based rate: peaks * 60 / duration_s.
BpmEstimate bpm_from_peaks(const std::vector<Index>& peaks, double rate_hz, double duration_s);

}  // namespace radarhr
