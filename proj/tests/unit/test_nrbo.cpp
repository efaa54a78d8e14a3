#include <atomic>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "radarhr/filters.hpp"
#include "radarhr/nrbo.hpp"

using namespace radarhr;

namespace {

const Bounds kSphereBounds{2, 12, 200.0, 8000.0};

double sphere(const Candidate& c) {
  const double dk = c.k_modes - 6;
  const double da = (c.alpha - 2000.0) / 500.0;
  return dk * dk + da * da;
}

// Exhaustive scan over every integer K and a fine alpha grid.
double sphere_grid_minimum(const Bounds& b) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = b.k_min; k <= b.k_max; ++k) {
    for (double a = b.alpha_min; a <= b.alpha_max; a += 1.0) best = std::min(best, sphere({k, a, 0}));
  }
  return best;
}

PhaseSeries two_tone_phase(double rate, double seconds) {
  const auto n = static_cast<Index>(std::llround(rate * seconds));
  PhaseSeries ph{SeriesD(n), rate, -1};
  for (Index i = 0; i < n; ++i) {
    const double t = double(i) / rate;
    ph.phase(i) = 3.0 * std::sin(2 * std::numbers::pi * 0.25 * t) + 0.6 * std::sin(2 * std::numbers::pi * 1.2 * t + 0.4);
  }
  return ph;
}

}  // namespace

TEST_SUITE("nrbo") {

TEST_CASE("sphere benchmark reaches the grid minimum") {
  REQUIRE(sphere_grid_minimum(kSphereBounds) == 0.0);
  NrboConfig cfg;
  cfg.population_n = 20;
  cfg.max_iterations = 150;
  cfg.seed = 7;
  const OptResult r = nrbo_optimize(sphere, kSphereBounds, cfg);
  CHECK(r.best.fitness < 0.5);
  CHECK(r.best.k_modes == 6);
  CHECK(r.best.fitness == r.history.back());
  CHECK(r.best.fitness == doctest::Approx(sphere(r.best)));
}

TEST_CASE("zero iterations returns the best initial member") {
  NrboConfig cfg;
  cfg.max_iterations = 0;
  cfg.seed = 3;
  std::vector<double> seen;
  const OptResult r = nrbo_optimize(
      [&](const Candidate& c) {
        seen.push_back(sphere(c));
        return seen.back();
      },
      kSphereBounds, cfg);
  CHECK(r.history.size() == 1);
  CHECK(r.evaluations == 15);
  CHECK(r.best.fitness == *std::min_element(seen.begin(), seen.end()));
}

TEST_CASE("fixed seed gives bit-identical results, workers included") {
  NrboConfig cfg;
  cfg.population_n = 12;
  cfg.max_iterations = 40;
  cfg.seed = 99;
  const OptResult a = nrbo_optimize(sphere, kSphereBounds, cfg);
  const OptResult b = nrbo_optimize(sphere, kSphereBounds, cfg);
  cfg.workers = 3;
  const OptResult c = nrbo_optimize(sphere, kSphereBounds, cfg);
  for (const OptResult* o : {&b, &c}) {
    CHECK(o->history == a.history);
    CHECK(o->evaluations == a.evaluations);
    CHECK(o->best.k_modes == a.best.k_modes);
    CHECK(o->best.alpha == a.best.alpha);
    REQUIRE(o->trace.size() == a.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) CHECK(o->trace[i].alpha == a.trace[i].alpha);
  }
}

TEST_CASE("history is non-increasing, candidates stay in bounds, evaluation budget holds") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int landscape = 0; landscape < 50; ++landscape) {
    const double c0 = u(rng), c1 = u(rng), c2 = u(rng), c3 = u(rng);
    const Bounds b{3, 10, 500.0, 8000.0};
    std::atomic<bool> out_of_bounds{false};
    auto f = [&](const Candidate& c) {
      if (!b.contains(c)) out_of_bounds = true;
      const double x = c.k_modes / 10.0, y = c.alpha / 8000.0;
      return std::sin(7 * c0 * x + 3 * c1 * y) + c2 * x * y + c3 * std::cos(11 * y);
    };
    NrboConfig cfg;
    cfg.population_n = 10;
    cfg.max_iterations = 25;
    cfg.seed = static_cast<std::uint64_t>(landscape);
    const OptResult r = nrbo_optimize(f, b, cfg);
    for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1]);
    CHECK_FALSE(out_of_bounds.load());
    CHECK(r.evaluations <= std::size_t(cfg.population_n) * (3 * std::size_t(cfg.max_iterations) + 1));
  }
}

TEST_CASE("stall limit stops a flat landscape early") {
  NrboConfig cfg;
  cfg.max_iterations = 100;
  cfg.stall_limit = 5;
  const OptResult r = nrbo_optimize([](const Candidate&) { return 1.0; }, kSphereBounds, cfg);
  CHECK(r.history.size() == 6);
}

TEST_CASE("configuration errors") {
  NrboConfig cfg;
  cfg.population_n = 3;
  CHECK_THROWS_AS(nrbo_optimize(sphere, kSphereBounds, cfg), InvalidArgument);
  cfg.population_n = 10;
  CHECK_THROWS_AS(nrbo_optimize(sphere, Bounds{5, 4, 500, 8000}, cfg), InvalidArgument);
  CHECK_THROWS_AS(nrbo_optimize(sphere, Bounds{3, 10, 900, 800}, cfg), InvalidArgument);
  CHECK_THROWS_AS(nrbo_optimize([](const Candidate&) { return std::nan(""); }, kSphereBounds, cfg), NumericalError);
}

TEST_CASE("decode maps the unit square onto the bounds") {
  const Bounds b{3, 10, 500, 8000};
  const Candidate lo = b.decode(Eigen::Vector2d(0, 0));
  const Candidate hi = b.decode(Eigen::Vector2d(1, 1));
  CHECK(lo.k_modes == 3);
  CHECK(lo.alpha == 500);
  CHECK(hi.k_modes == 10);
  CHECK(hi.alpha == 8000);
  CHECK(b.decode(Eigen::Vector2d(0.5, 0.5)).k_modes == 7);  // 6.5 rounds away from zero
}

TEST_CASE("NRBO-VMD recovers the cardiac tone of a two-tone phase") {
  const PhaseSeries ph = two_tone_phase(20, 60);
  NrboConfig cfg;
  cfg.seed = 1;
  const VmdFit fit = nrbo_vmd_fit(ph, Bounds{}, cfg, SampEnConfig{});
  REQUIRE_FALSE(fit.cms.empty_band);
  CHECK(Bounds{}.contains(fit.best));
  const Index nfft = 4096;
  const SeriesD mag = magnitude_spectrum(fit.cms.signal, nfft);
  Index peak = 0;
  mag.maxCoeff(&peak);
  CHECK(std::abs(double(peak) * 20.0 / nfft - 1.2) <= 0.05);

  // Greedy replacement: the winner is at least as good as every starting point.
  CHECK(fit.search.history.back() <= fit.search.history.front());
  CHECK(fit.best.fitness == doctest::Approx(make_cms_fitness(ph, SampEnConfig{}, CmsFitOptions{})(fit.best)));
}

TEST_CASE("pure 1 Hz sinusoid: best beats the whole initial population") {
  const Index n = 600;
  PhaseSeries ph{SeriesD(n), 20.0, -1};
  for (Index i = 0; i < n; ++i) ph.phase(i) = std::sin(2 * std::numbers::pi * double(i) / 20.0);
  NrboConfig cfg;
  cfg.population_n = 6;
  cfg.max_iterations = 3;
  cfg.seed = 5;
  std::vector<double> initial;
  const FitnessFn base = make_cms_fitness(ph, SampEnConfig{}, CmsFitOptions{});
  const OptResult r = nrbo_optimize(
      [&](const Candidate& c) {
        const double f = base(c);
        if (initial.size() < 6) initial.push_back(f);
        return f;
      },
      Bounds{}, cfg);
  for (double f : initial) CHECK(r.best.fitness <= f);
}

TEST_CASE("all-noise input terminates with a finite fitness") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0, 1);
  PhaseSeries ph{SeriesD(400), 20.0, -1};
  for (Index i = 0; i < ph.size(); ++i) ph.phase(i) = g(rng);
  NrboConfig cfg;
  cfg.population_n = 5;
  cfg.max_iterations = 2;
  const VmdFit fit = nrbo_vmd_fit(ph, Bounds{}, cfg, SampEnConfig{});
  CHECK(std::isfinite(fit.best.fitness));
  const BpmEstimate est = estimate_from_cms(fit.cms, ph.rate_hz, PeakConfig{}, "nrbo-vmd");
  CHECK(est.bpm >= 0);
}

TEST_CASE("empty-band candidates receive the penalty") {
  PhaseSeries ph{SeriesD(400), 20.0, -1};
  for (Index i = 0; i < ph.size(); ++i) ph.phase(i) = std::sin(2 * std::numbers::pi * 0.1 * double(i) / 20.0);
  CmsFitOptions opts;
  opts.band = BandSpec{5.0, 6.0};
  opts.empty_band_penalty = 123.0;
  CHECK(make_cms_fitness(ph, SampEnConfig{}, opts)(Candidate{2, 2000, 0}) == 123.0);
}

TEST_CASE("evaluate_batch keeps input order across workers") {
  std::vector<Candidate> batch;
  for (int k = 1; k <= 20; ++k) batch.push_back({k, double(k), 0});
  const auto f = [](const Candidate& c) { return c.alpha * 2; };
  const std::vector<double> serial = evaluate_batch(f, batch, 1);
  CHECK(evaluate_batch(f, batch, 4) == serial);
  CHECK(serial[7] == 16.0);
}

}  // TEST_SUITE
