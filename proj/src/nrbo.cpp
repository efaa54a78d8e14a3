#include "radarhr/nrbo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include "radarhr/errors.hpp"

namespace radarhr {

void Bounds::validate() const {
  if (k_min < 1) throw InvalidArgument("Bounds: k_min must be >= 1");
  if (k_min > k_max) throw InvalidArgument("Bounds: empty K interval");
  if (!(alpha_min > 0)) throw InvalidArgument("Bounds: alpha_min must be > 0");
  if (!(alpha_min <= alpha_max)) throw InvalidArgument("Bounds: empty alpha interval");
}

Candidate Bounds::decode(const Eigen::Vector2d& unit) const {
  Candidate c;
  const double k = static_cast<double>(k_min) + unit(0) * static_cast<double>(k_max - k_min);
  c.k_modes = std::clamp(static_cast<int>(std::lround(k)), k_min, k_max);
  c.alpha = std::clamp(alpha_min + unit(1) * (alpha_max - alpha_min), alpha_min, alpha_max);
  return c;
}

void NrboConfig::validate() const {
  if (population_n < 4) throw InvalidArgument("NrboConfig: population_n must be >= 4");
  if (max_iterations < 0) throw InvalidArgument("NrboConfig: max_iterations must be >= 0");
  if (!(proximity_eps >= 0)) throw InvalidArgument("NrboConfig: proximity_eps must be >= 0");
  if (!(local_delta_range[0] <= local_delta_range[1])) throw InvalidArgument("NrboConfig: empty local_delta_range");
  if (stall_limit < 1) throw InvalidArgument("NrboConfig: stall_limit must be >= 1");
}

std::vector<double> evaluate_batch(const FitnessFn& fitness, const std::vector<Candidate>& batch, int workers) {
  std::vector<double> out(batch.size());
  auto eval_one = [&](std::size_t i) {
    const double f = fitness(batch[i]);
    if (std::isnan(f)) throw NumericalError("fitness returned NaN");
    out[i] = f;
  };
  const auto n_workers = static_cast<std::size_t>(std::max(1, workers));
  if (n_workers == 1 || batch.size() < 2) {
    for (std::size_t i = 0; i < batch.size(); ++i) eval_one(i);
    return out;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(n_workers, batch.size()); ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < batch.size(); i += n_workers) {
          try {
            eval_one(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

namespace {

struct Population {
  std::vector<Eigen::Vector2d> pos;
  std::vector<double> fit;

  std::size_t best() const {
    return static_cast<std::size_t>(std::min_element(fit.begin(), fit.end()) - fit.begin());
  }
};

Eigen::Vector2d clamp_unit(const Eigen::Vector2d& x) { return x.cwiseMax(0.0).cwiseMin(1.0); }

// Evaluates proposals for the listed members and keeps each one that improves.
std::size_t apply_proposals(Population& pop, const std::vector<std::size_t>& members,
                            const std::vector<Eigen::Vector2d>& proposals, const Bounds& bounds,
                            const FitnessFn& fitness, int workers) {
  std::vector<Candidate> batch;
  batch.reserve(proposals.size());
  for (const auto& p : proposals) batch.push_back(bounds.decode(p));
  const std::vector<double> f = evaluate_batch(fitness, batch, workers);
  for (std::size_t t = 0; t < members.size(); ++t) {
    const std::size_t i = members[t];
    if (f[t] < pop.fit[i]) {
      pop.pos[i] = proposals[t];
      pop.fit[i] = f[t];
    }
  }
  return batch.size();
}

}  // namespace

OptResult nrbo_optimize(const FitnessFn& fitness, const Bounds& bounds, const NrboConfig& cfg) {
  cfg.validate();
  bounds.validate();
  const auto n = static_cast<std::size_t>(cfg.population_n);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> delta(cfg.local_delta_range[0], cfg.local_delta_range[1]);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);

  OptResult result;
  Population pop;
  pop.pos.resize(n);
  std::vector<Candidate> init(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = unit(rng);
    const double b = unit(rng);
    pop.pos[i] = Eigen::Vector2d(a, b);
    init[i] = bounds.decode(pop.pos[i]);
  }
  pop.fit = evaluate_batch(fitness, init, cfg.workers);
  result.evaluations = n;

  auto record = [&] {
    const std::size_t g = pop.best();
    Candidate c = bounds.decode(pop.pos[g]);
    c.fitness = pop.fit[g];
    result.history.push_back(c.fitness);
    result.trace.push_back(c);
    result.best = c;
  };
  record();

  const std::size_t n_groups = (n + 4) / 5;
  std::vector<std::size_t> perm(n);
  int stall = 0;
  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    const std::size_t g = pop.best();
    const Eigen::Vector2d x_g = pop.pos[g];
    const double prev_best = pop.fit[g];

    // Global search.
    {
      std::vector<std::size_t> members(n);
      std::vector<Eigen::Vector2d> proposals(n);
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t j, k;
        do j = pick(rng); while (j == i);
        do k = pick(rng); while (k == i || k == j);
        const double r1 = unit(rng);
        const double r2 = unit(rng);
        members[i] = i;
        proposals[i] = clamp_unit(pop.pos[i] + r1 * (x_g - pop.pos[i]) + r2 * (pop.pos[j] - pop.pos[k]));
      }
      result.evaluations += apply_proposals(pop, members, proposals, bounds, fitness, cfg.workers);
    }

    // Local search around the global best.
    {
      std::vector<std::size_t> members;
      std::vector<Eigen::Vector2d> proposals;
      for (std::size_t i = 0; i < n; ++i) {
        if ((pop.pos[i] - x_g).norm() >= cfg.proximity_eps) continue;
        const double d = delta(rng);
        const Eigen::Vector2d p = clamp_unit(pop.pos[i] + d * (x_g - pop.pos[i]));
        if (p == pop.pos[i]) continue;
        members.push_back(i);
        proposals.push_back(p);
      }
      result.evaluations += apply_proposals(pop, members, proposals, bounds, fitness, cfg.workers);
    }

    // Cooperation with group leaders.
    {
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      std::shuffle(perm.begin(), perm.end(), rng);
      std::vector<std::size_t> members;
      std::vector<Eigen::Vector2d> proposals;
      for (std::size_t grp = 0; grp < n_groups; ++grp) {
        const std::size_t lo = grp * n / n_groups;
        const std::size_t hi = (grp + 1) * n / n_groups;
        std::size_t leader = perm[lo];
        for (std::size_t p = lo + 1; p < hi; ++p) {
          if (pop.fit[perm[p]] < pop.fit[leader]) leader = perm[p];
        }
        for (std::size_t p = lo; p < hi; ++p) {
          const std::size_t i = perm[p];
          if (!(pop.fit[i] > pop.fit[leader])) continue;
          const double r3 = unit(rng);
          members.push_back(i);
          proposals.push_back(clamp_unit(pop.pos[leader] + r3 * (pop.pos[i] - pop.pos[leader])));
        }
      }
      result.evaluations += apply_proposals(pop, members, proposals, bounds, fitness, cfg.workers);
    }

    record();
    if (result.best.fitness < prev_best) {
      stall = 0;
    } else if (++stall >= cfg.stall_limit) {
      break;
    }
  }
  return result;
}

FitnessFn make_cms_fitness(const PhaseSeries& phase, const SampEnConfig& sampen, const CmsFitOptions& opts) {
  sampen.validate();
  opts.band.validate();
  return [phase, sampen, opts](const Candidate& c) {
    VmdParams p = opts.vmd;
    p.k_modes = c.k_modes;
    p.alpha = c.alpha;
    const ImfSet<double> imfs = decompose(phase.phase, phase.rate_hz, p);
    const CmsSignal<double> cms = reconstruct(imfs, select_cardiac_modes(imfs, opts.band));
    if (cms.empty_band) return opts.empty_band_penalty;
    try {
      return sample_entropy(cms.signal, sampen);
    } catch (const DegenerateInput&) {
      return opts.empty_band_penalty;
    }
  };
}

VmdFit refit(const PhaseSeries& phase, const Candidate& best, const CmsFitOptions& opts) {
  VmdParams p = opts.vmd;
  p.k_modes = best.k_modes;
  p.alpha = best.alpha;
  VmdFit fit;
  fit.best = best;
  fit.imfs = decompose(phase.phase, phase.rate_hz, p);
  fit.cms = reconstruct(fit.imfs, select_cardiac_modes(fit.imfs, opts.band));
  return fit;
}

VmdFit nrbo_vmd_fit(const PhaseSeries& phase, const Bounds& bounds, const NrboConfig& cfg,
                    const SampEnConfig& sampen, const CmsFitOptions& opts) {
  OptResult search = nrbo_optimize(make_cms_fitness(phase, sampen, opts), bounds, cfg);
  VmdFit fit = refit(phase, search.best, opts);
  fit.search = std::move(search);
  return fit;
}

BpmEstimate estimate_from_cms(const CmsSignal<double>& cms, double rate_hz, const PeakConfig& peaks,
                              const std::string& method_tag) {
  const double duration = static_cast<double>(cms.signal.size()) / rate_hz;
  BpmEstimate est = bpm_from_peaks(cms.empty_band ? std::vector<Index>{} : detect_r_peaks(cms.signal, rate_hz, peaks),
                                   rate_hz, duration);
  est.method_tag = method_tag;
  est.empty_band = cms.empty_band;
  est.low_confidence = cms.empty_band;
  return est;
}

}  // namespace radarhr
