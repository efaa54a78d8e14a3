#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "radarhr/nrbo.hpp"
#include "radarhr/signal_model.hpp"
#include "radarhr/vmd.hpp"

namespace radarhr {

namespace fs = std::filesystem;

/// A uniformly sampled series read from `t_s,value` CSV.
struct SampledSeries {
  SeriesD values;
  double rate_hz = 0.0;
};

void write_series_csv(const fs::path& path, const SeriesD& values, double rate_hz);
/// Rate is recovered from the first and last timestamps. Needs >= 2 rows.
SampledSeries read_series_csv(const fs::path& path);

void write_phase_csv(const fs::path& path, const PhaseSeries& phase);
PhaseSeries read_phase_csv(const fs::path& path);
DisplacementTrace read_trace_csv(const fs::path& path, double base_range_m);

nlohmann::json radar_config_to_json(const RadarConfig& cfg);
/// Strict: exactly the six RadarConfig keys.
RadarConfig radar_config_from_json(const nlohmann::json& j);

/// Interleaved little-endian int16 I/Q, chirp-major, plus a JSON sidecar with
/// the RadarConfig. Samples are scaled so the largest component maps to 32767.
void write_iq(const fs::path& bin_path, const fs::path& sidecar_path, const IQCube& cube);
IQCube read_iq(const fs::path& bin_path, const fs::path& sidecar_path);

/// `# {json header}` line with center_freqs_hz and params, then t_s,mode_1..mode_K.
void write_imfs_csv(const fs::path& path, const ImfSet<double>& imfs, const VmdParams& params);

/// index,t_s,amplitude
void write_peaks_csv(const fs::path& path, const SeriesD& cms, const std::vector<Index>& peaks, double rate_hz);

/// One JSON object per line: {iter, best_k, best_alpha, best_fitness}.
void write_optimizer_trace(std::ostream& os, const OptResult& result);

nlohmann::json read_json_file(const fs::path& path);
void write_text_file(const fs::path& path, const std::string& text);

}  // namespace radarhr
