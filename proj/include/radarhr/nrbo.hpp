#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "radarhr/heart_rate.hpp"
#include "radarhr/reconstruction.hpp"
#include "radarhr/sample_entropy.hpp"
#include "radarhr/types.hpp"
#include "radarhr/vmd.hpp"

namespace radarhr {

/// One (K, alpha) point. Lower fitness is better.
struct Candidate {
  int k_modes = 0;
  double alpha = 0.0;
  double fitness = 0.0;
};

/// Search box for (K, alpha). Intervals are closed.
struct Bounds {
  int k_min = 3;
  int k_max = 10;
  double alpha_min = 500.0;
  double alpha_max = 8000.0;

  void validate() const;

  /// Map a point of the unit square to (K, alpha); K rounded to nearest.
  Candidate decode(const Eigen::Vector2d& unit) const;
  bool contains(const Candidate& c) const {
    return c.k_modes >= k_min && c.k_modes <= k_max && c.alpha >= alpha_min && c.alpha <= alpha_max;
  }
};

using FitnessFn = std::function<double(const Candidate&)>;

struct NrboConfig {
  int population_n = 15;
  int max_iterations = 30;
  std::uint64_t seed = 0;
  /// "Close to the global best": Euclidean distance in the unit square below this.
  double proximity_eps = 0.05;
  std::array<double, 2> local_delta_range{-0.1, 0.1};
  int stall_limit = 20;
  /// Threads used to evaluate one batch of proposals. Results do not depend on it.
  int workers = 1;

  void validate() const;
};

struct OptResult {
  Candidate best;
  /// Best fitness after initialization, then after each iteration.
  std::vector<double> history;
  /// Best candidate at the same points as history.
  std::vector<Candidate> trace;
  std::size_t evaluations = 0;
};

/// Evaluates fitness over a batch of candidates with up to `workers` threads;
/// results come back in input order.
std::vector<double> evaluate_batch(const FitnessFn& fitness, const std::vector<Candidate>& batch, int workers);

/// Population search over (K, alpha) in a normalized unit square.
///
/// Each iteration runs three phases against the population, each phase
/// generating all proposals first (sequential RNG draws, candidate order),
/// evaluating them as one batch, then applying greedy replacement in order:
///   1. global:      x_i + r1 (x_g - x_i) + r2 (x_j - x_k), j != k != i;
///   2. local:       x_i + d (x_g - x_i), d ~ U(local_delta_range), only for
///                   members within proximity_eps of x_g;
///   3. cooperation: x_l + r3 (x_i - x_l) for members worse than the leader
///                   x_l of their group; groups are a fresh random partition
///                   into ceil(N/5) parts every iteration.
/// x_g is fixed during an iteration and refreshed at its end. Proposals are
/// clamped to the box. Stops after max_iterations, or after stall_limit
/// iterations without improvement of the best fitness.
OptResult nrbo_optimize(const FitnessFn& fitness, const Bounds& bounds, const NrboConfig& cfg);

/// Settings shared by the optimizer-driven VMD fits.
struct CmsFitOptions {
  /// tau, tolerance, iteration cap and init policy; k_modes and alpha are
  /// overwritten by each candidate.
  VmdParams vmd;
  BandSpec band;
  /// Fitness for candidates whose reconstruction has no in-band mode.
  double empty_band_penalty = 1e6;
};

struct VmdFit {
  Candidate best;
  ImfSet<double> imfs;
  CmsSignal<double> cms;
  OptResult search;
};

/// Fitness = sample entropy of the cardiac-band reconstruction of
/// decompose(phase, K, alpha). Empty or constant reconstructions get the penalty.
FitnessFn make_cms_fitness(const PhaseSeries& phase, const SampEnConfig& sampen, const CmsFitOptions& opts);

/// Decomposes with the candidate's parameters and rebuilds the CMS.
VmdFit refit(const PhaseSeries& phase, const Candidate& best, const CmsFitOptions& opts);

VmdFit nrbo_vmd_fit(const PhaseSeries& phase, const Bounds& bounds, const NrboConfig& cfg,
                    const SampEnConfig& sampen, const CmsFitOptions& opts = {});

/// Peak detection + count-based BPM on a fitted CMS.
BpmEstimate estimate_from_cms(const CmsSignal<double>& cms, double rate_hz, const PeakConfig& peaks,
                              const std::string& method_tag);

}  // namespace radarhr
