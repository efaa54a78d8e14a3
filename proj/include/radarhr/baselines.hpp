#pragma once

#include <cstdint>

#include "radarhr/heart_rate.hpp"
#include "radarhr/nrbo.hpp"
#include "radarhr/reconstruction.hpp"
#include "radarhr/types.hpp"
#include "radarhr/vmd.hpp"

namespace radarhr {

inline constexpr const char* kTagBpfFft = "bpf";
inline constexpr const char* kTagFixedVmd = "vmd";
inline constexpr const char* kTagGaVmd = "ga-vmd";
inline constexpr const char* kTagNrboVmd = "nrbo-vmd";

struct GaConfig {
  int population_n = 15;
  int generations = 30;
  double crossover_rate = 0.8;
  double mutation_rate = 0.1;
  int tournament_size = 3;
  std::uint64_t seed = 0;
  int workers = 1;

  void validate() const;
};

/// Generational GA on the normalized (K, alpha) square: tournament selection,
/// uniform crossover, per-gene Gaussian mutation with sigma = 0.1 (10% of each
/// range), clamping, elitism of one. The elite is carried over without
/// re-evaluation, so evaluations = N + generations * (N - 1).
OptResult ga_optimize(const FitnessFn& fitness, const Bounds& bounds, const GaConfig& cfg);

VmdFit ga_vmd_fit(const PhaseSeries& phase, const Bounds& bounds, const GaConfig& ga, const SampEnConfig& sampen,
                  const CmsFitOptions& opts = {});

/// K = 5, alpha = 2000, other fields at their defaults.
VmdParams fixed_vmd_defaults();

/// Zero-phase band-pass, zero-padded magnitude spectrum (<= 0.01 Hz bins),
/// 60 x frequency of the largest in-band bin. Flagged low-confidence when the
/// maximum lies within 1/duration of a band edge, is not a spectral local
/// maximum, or is less than twice every in-band bin outside its main lobe.
BpmEstimate bpf_fft_estimate(const PhaseSeries& phase, const BandSpec& band = {});

BpmEstimate fixed_vmd_estimate(const PhaseSeries& phase, const VmdParams& params = fixed_vmd_defaults(),
                               const BandSpec& band = {}, const PeakConfig& cfg = {});

}  // namespace radarhr
