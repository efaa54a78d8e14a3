#include "radarhr/heart_rate.hpp"

namespace radarhr {

double median_ibi_bpm(const std::vector<Index>& peaks, double rate_hz) {
  if (peaks.size() < 2 || !(rate_hz > 0)) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> ibi;
  ibi.reserve(peaks.size() - 1);
  for (std::size_t i = 1; i < peaks.size(); ++i) ibi.push_back(static_cast<double>(peaks[i] - peaks[i - 1]) / rate_hz);
  std::sort(ibi.begin(), ibi.end());
  const std::size_t mid = ibi.size() / 2;
  const double med = ibi.size() % 2 ? ibi[mid] : 0.5 * (ibi[mid - 1] + ibi[mid]);
  return 60.0 / med;
}

BpmEstimate bpm_from_peaks(const std::vector<Index>& peaks, double rate_hz, double duration_s) {
  if (!(duration_s > 0)) throw InvalidArgument("bpm_from_peaks: duration must be positive");
  BpmEstimate est;
  est.peak_indices = peaks;
  est.bpm = static_cast<double>(peaks.size()) * 60.0 / duration_s;
  est.ibi_median_bpm = median_ibi_bpm(peaks, rate_hz);
  return est;
}

}  // namespace radarhr
