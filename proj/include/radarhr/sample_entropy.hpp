#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "radarhr/errors.hpp"
#include "radarhr/types.hpp"

namespace radarhr {

struct SampEnConfig {
  Index embedding_m = 2;
  /// Match tolerance in units of the series' (population) standard deviation.
  double tolerance_r = 0.2;

  void validate() const {
    if (embedding_m < 1) throw InvalidArgument("SampEnConfig: embedding_m must be >= 1");
    if (!(tolerance_r > 0)) throw InvalidArgument("SampEnConfig: tolerance_r must be > 0");
  }
};

/// Template-match counts behind a SampEn value. B counts pairs of length-m
/// templates within tolerance, A the pairs that still match at length m+1.
/// Both use the same N-m template start positions; self-matches excluded.
struct SampEnCounts {
  std::int64_t a = 0;
  std::int64_t b = 0;
  Index n = 0;
  Index m = 0;
};

/// -ln(A/B); when A == 0 the finite ceiling ln(max(B,1) * (N-m)) is returned.
inline double sample_entropy_from_counts(const SampEnCounts& c) {
  if (c.a > 0) return -std::log(static_cast<double>(c.a) / static_cast<double>(c.b));
  return std::log(static_cast<double>(std::max<std::int64_t>(c.b, 1)) * static_cast<double>(c.n - c.m));
}

/// Absolute tolerance r * std for a series, validating the preconditions.
template <typename Derived>
double sample_entropy_radius(const Eigen::MatrixBase<Derived>& x, const SampEnConfig& cfg) {
  cfg.validate();
  if (x.size() < cfg.embedding_m + 2) throw InvalidArgument("sample_entropy: series too short");
  if (!all_finite(x)) throw InvalidArgument("sample_entropy: non-finite sample");
  const auto xd = x.template cast<double>().eval();
  const double mean = xd.mean();
  const double sd = std::sqrt((xd.array() - mean).square().mean());
  if (!(sd > 0)) throw DegenerateInput("sample_entropy: zero-variance series");
  return cfg.tolerance_r * sd;
}

/// Match counts via a sorted sweep on the first template element: only pairs
/// whose leading samples lie within r are examined. The per-pair comparisons
/// are identical to the plain double loop, so counts agree exactly.
template <typename Derived>
SampEnCounts sample_entropy_counts(const Eigen::MatrixBase<Derived>& x, const SampEnConfig& cfg) {
  const double r = sample_entropy_radius(x, cfg);
  const auto xd = x.template cast<double>().eval();
  const Index m = cfg.embedding_m;
  const Index n_templates = xd.size() - m;

  std::vector<Index> order(static_cast<std::size_t>(n_templates));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return xd(a) < xd(b); });

  SampEnCounts c{0, 0, xd.size(), m};
  for (std::size_t p = 0; p < order.size(); ++p) {
    const Index i = order[p];
    for (std::size_t q = p + 1; q < order.size(); ++q) {
      const Index j = order[q];
      if (std::abs(xd(j) - xd(i)) > r) break;
      bool match = true;
      for (Index l = 1; l < m; ++l) {
        if (std::abs(xd(i + l) - xd(j + l)) > r) {
          match = false;
          break;
        }
      }
      if (!match) continue;
      ++c.b;
      if (std::abs(xd(i + m) - xd(j + m)) <= r) ++c.a;
    }
  }
  return c;
}

/// Sample entropy with Chebyshev template distance and std-relative tolerance.
template <typename Derived>
double sample_entropy(const Eigen::MatrixBase<Derived>& x, const SampEnConfig& cfg = {}) {
  return sample_entropy_from_counts(sample_entropy_counts(x, cfg));
}

}  // namespace radarhr
