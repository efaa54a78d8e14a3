#pragma once

#include "json.hpp"

#include "radarhr/baselines.hpp"
#include "radarhr/heart_rate.hpp"
#include "radarhr/nrbo.hpp"
#include "radarhr/reconstruction.hpp"
#include "radarhr/sample_entropy.hpp"
#include "radarhr/signal_model.hpp"
#include "radarhr/vmd.hpp"

namespace radarhr {

/// Everything the four estimation methods need.
///
/// `vmd_params` drives the fixed-parameter VMD baseline; its tau, tolerance,
/// max_iterations and init policy are also the base settings for the NRBO and
/// GA fits, whose k_modes/alpha come from the search.
struct PipelineConfig {
  RadarConfig radar_config;
  double decimate_to_hz = 10.0;
  VmdParams vmd_params = fixed_vmd_defaults();
  NrboConfig nrbo_config;
  GaConfig ga_config;
  Bounds bounds;
  SampEnConfig sampen_config;
  BandSpec band_spec;
  PeakConfig peak_config;

  CmsFitOptions fit_options() const {
    CmsFitOptions o;
    o.vmd = vmd_params;
    o.band = band_spec;
    return o;
  }
  void validate() const;
};

/// Strict parsing: unknown keys or wrong types raise ConfigError. Missing
/// keys keep their defaults.
PipelineConfig pipeline_config_from_json(const nlohmann::json& j);
nlohmann::json pipeline_config_to_json(const PipelineConfig& cfg);

nlohmann::json vmd_params_to_json(const VmdParams& p);

}  // namespace radarhr
