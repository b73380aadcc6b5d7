#pragma once

// Distribution-free median confidence intervals from order statistics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "aqc/bits.hpp"

namespace aqc {

inline constexpr std::size_t min_ci_samples = 6;

/// P(lo <= B <= hi) for B ~ Binomial(s, 1/2).
inline double binomial_half_probability(std::size_t s, std::size_t lo, std::size_t hi) {
  if (lo > hi || lo > s) return 0.0;
  hi = std::min(hi, s);
  const long double ln2 = std::log(2.0L);
  long double sum = 0.0L;
  for (std::size_t i = lo; i <= hi; ++i) {
    long double lp = std::lgamma(static_cast<long double>(s) + 1) -
                     std::lgamma(static_cast<long double>(i) + 1) -
                     std::lgamma(static_cast<long double>(s - i) + 1) -
                     static_cast<long double>(s) * ln2;
    sum += std::exp(lp);
  }
  return static_cast<double>(sum);
}

/// Coverage of (x_(l), x_(u)) for the median of a continuous distribution,
/// ranks 1-based: P(l <= #{x_i < median} <= u - 1).
inline double order_statistic_coverage(std::size_t s, std::size_t l, std::size_t u) {
  if (l < 1 || u > s || l >= u) return 0.0;
  return binomial_half_probability(s, l, u - 1);
}

/// Tightest symmetric ranks (l, s+1-l) whose coverage reaches `level`.
inline std::pair<std::size_t, std::size_t> median_ci_ranks(std::size_t s, double level = 0.95) {
  if (s < min_ci_samples)
    throw ValidationError("median confidence interval needs at least " +
                          std::to_string(min_ci_samples) + " samples, got " + std::to_string(s));
  std::size_t best = 0;
  for (std::size_t l = 1; 2 * l <= s; ++l) {
    if (order_statistic_coverage(s, l, s + 1 - l) >= level)
      best = l;
    else
      break;
  }
  if (best == 0)
    throw ValidationError("no symmetric order-statistic interval reaches coverage " +
                          std::to_string(level) + " with " + std::to_string(s) + " samples");
  return {best, s + 1 - best};
}

struct MedianSummary {
  std::size_t s = 0;
  double median = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t lo_rank = 0;
  std::size_t hi_rank = 0;
  double coverage = 0.0;
};

inline double median_of_sorted(const std::vector<double>& x) {
  const std::size_t s = x.size();
  return s % 2 ? x[s / 2] : 0.5 * (x[s / 2 - 1] + x[s / 2]);
}

inline MedianSummary median_ci(std::vector<double> samples, double level = 0.95) {
  const auto [l, u] = median_ci_ranks(samples.size(), level);
  std::sort(samples.begin(), samples.end());
  MedianSummary m;
  m.s = samples.size();
  m.median = median_of_sorted(samples);
  m.lo = samples[l - 1];
  m.hi = samples[u - 1];
  m.lo_rank = l;
  m.hi_rank = u;
  m.coverage = order_statistic_coverage(m.s, l, u);
  return m;
}

}  // namespace aqc
