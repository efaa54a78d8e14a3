#include "radarhr/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "radarhr/errors.hpp"
#include "radarhr/filters.hpp"

namespace radarhr {

namespace {

constexpr double kDominance = 2.0;

}  // namespace

void GaConfig::validate() const {
  if (population_n < 2) throw InvalidArgument("GaConfig: population_n must be >= 2");
  if (generations < 0) throw InvalidArgument("GaConfig: generations must be >= 0");
  if (!(crossover_rate >= 0 && crossover_rate <= 1)) throw InvalidArgument("GaConfig: crossover_rate outside [0,1]");
  if (!(mutation_rate >= 0 && mutation_rate <= 1)) throw InvalidArgument("GaConfig: mutation_rate outside [0,1]");
  if (tournament_size < 1) throw InvalidArgument("GaConfig: tournament_size must be >= 1");
}

OptResult ga_optimize(const FitnessFn& fitness, const Bounds& bounds, const GaConfig& cfg) {
  cfg.validate();
  bounds.validate();
  const auto n = static_cast<std::size_t>(cfg.population_n);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 0.1);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);

  std::vector<Eigen::Vector2d> pos(n);
  std::vector<Candidate> batch(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = unit(rng);
    const double b = unit(rng);
    pos[i] = Eigen::Vector2d(a, b);
    batch[i] = bounds.decode(pos[i]);
  }
  std::vector<double> fit = evaluate_batch(fitness, batch, cfg.workers);

  OptResult result;
  result.evaluations = n;
  auto best_index = [&] { return static_cast<std::size_t>(std::min_element(fit.begin(), fit.end()) - fit.begin()); };
  auto record = [&] {
    const std::size_t g = best_index();
    Candidate c = bounds.decode(pos[g]);
    c.fitness = fit[g];
    result.history.push_back(c.fitness);
    result.trace.push_back(c);
    result.best = c;
  };
  record();

  auto tournament = [&] {
    std::size_t winner = pick(rng);
    for (int t = 1; t < cfg.tournament_size; ++t) {
      const std::size_t c = pick(rng);
      if (fit[c] < fit[winner]) winner = c;
    }
    return winner;
  };

  for (int gen = 0; gen < cfg.generations; ++gen) {
    const std::size_t elite = best_index();
    std::vector<Eigen::Vector2d> children;
    children.reserve(n - 1);
    while (children.size() + 1 < n) {
      const std::size_t p1 = tournament();
      const std::size_t p2 = tournament();
      Eigen::Vector2d child = pos[p1];
      if (unit(rng) < cfg.crossover_rate) {
        for (int d = 0; d < 2; ++d) {
          if (unit(rng) < 0.5) child(d) = pos[p2](d);
        }
      }
      for (int d = 0; d < 2; ++d) {
        if (unit(rng) < cfg.mutation_rate) child(d) += gauss(rng);
      }
      children.push_back(child.cwiseMax(0.0).cwiseMin(1.0));
    }
    batch.clear();
    for (const auto& c : children) batch.push_back(bounds.decode(c));
    const std::vector<double> child_fit = evaluate_batch(fitness, batch, cfg.workers);
    result.evaluations += batch.size();

    std::vector<Eigen::Vector2d> next_pos{pos[elite]};
    std::vector<double> next_fit{fit[elite]};
    next_pos.insert(next_pos.end(), children.begin(), children.end());
    next_fit.insert(next_fit.end(), child_fit.begin(), child_fit.end());
    pos = std::move(next_pos);
    fit = std::move(next_fit);
    record();
  }
  return result;
}

VmdFit ga_vmd_fit(const PhaseSeries& phase, const Bounds& bounds, const GaConfig& ga, const SampEnConfig& sampen,
                  const CmsFitOptions& opts) {
  OptResult search = ga_optimize(make_cms_fitness(phase, sampen, opts), bounds, ga);
  VmdFit fit = refit(phase, search.best, opts);
  fit.search = std::move(search);
  return fit;
}

VmdParams fixed_vmd_defaults() {
  VmdParams p;
  p.k_modes = 5;
  p.alpha = 2000.0;
  return p;
}

BpmEstimate bpf_fft_estimate(const PhaseSeries& phase, const BandSpec& band) {
  band.validate();
  if (!(phase.rate_hz > 0)) throw InvalidArgument("bpf_fft_estimate: rate must be positive");
  if (phase.duration_s() < 10.0) throw InvalidArgument("bpf_fft_estimate: need at least 10 s of phase");
  if (!all_finite(phase.phase)) throw InvalidArgument("bpf_fft_estimate: non-finite sample");

  const SeriesD centered = (phase.phase.array() - phase.phase.mean()).matrix();
  const auto pad = static_cast<Index>(std::ceil(3.0 * phase.rate_hz / band.low_hz));
  const SeriesD filtered = filtfilt(butterworth_bandpass(band.low_hz, band.high_hz, phase.rate_hz), centered, pad);

  const Index nfft = next_pow2(std::max(phase.size(), static_cast<Index>(std::ceil(phase.rate_hz / 0.01))));
  const SeriesD mag = magnitude_spectrum(filtered, nfft);
  const double df = phase.rate_hz / static_cast<double>(nfft);
  const auto lo = static_cast<Index>(std::ceil(band.low_hz / df));
  const auto hi = std::min<Index>(mag.size() - 1, static_cast<Index>(std::floor(band.high_hz / df)));

  BpmEstimate est;
  est.method_tag = kTagBpfFft;
  if (lo > hi) {
    est.low_confidence = true;
    return est;
  }
  Index best = lo;
  for (Index b = lo + 1; b <= hi; ++b) {
    if (mag(b) > mag(best)) best = b;
  }
  est.bpm = 60.0 * static_cast<double>(best) * df;
  const bool local_max = best > 0 && best + 1 < mag.size() && mag(best) > mag(best - 1) && mag(best) > mag(best + 1);
  // Within one resolution cell (1/T) of an edge the peak cannot be told apart
  // from out-of-band content leaking through the skirt.
  const auto cell = static_cast<Index>(std::ceil(1.0 / (phase.duration_s() * df)));
  const bool near_edge = best - lo < cell || hi - best < cell;
  // Outside its own main lobe the band must hold nothing within 6 dB of the
  // peak; leakage sidelobes and noise fail this, a windowed tone passes.
  double rival = 0.0;
  for (Index b = lo; b <= hi; ++b) {
    if (std::abs(b - best) > 2 * cell) rival = std::max(rival, mag(b));
  }
  est.low_confidence = near_edge || !local_max || !(mag(best) >= kDominance * rival) || !(mag(best) > 0);
  return est;
}

BpmEstimate fixed_vmd_estimate(const PhaseSeries& phase, const VmdParams& params, const BandSpec& band,
                               const PeakConfig& cfg) {
  const ImfSet<double> imfs = decompose(phase.phase, phase.rate_hz, params);
  const CmsSignal<double> cms = reconstruct(imfs, select_cardiac_modes(imfs, band));
  return estimate_from_cms(cms, phase.rate_hz, cfg, kTagFixedVmd);
}

}  // namespace radarhr
