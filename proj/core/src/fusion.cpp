#include "wisig/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "wisig/error.hpp"

namespace wisig {

namespace {

// Correctly rounded sum of the exact real sum (Shewchuk partials, as in
// Python's math.fsum). Independent of input order and monotone in every term.
double exact_sum(std::span<const double> xs) {
  std::vector<double> partials;
  for (double x : xs) {
    std::size_t i = 0;
    for (double y : partials) {
      if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials[i++] = lo;
      x = hi;
    }
    partials.resize(i);
    partials.push_back(x);
  }

  std::size_t n = partials.size();
  if (n == 0) return 0.0;
  double hi = partials[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials[--n];
    hi = x + y;
    lo = y - (hi - x);
    if (lo != 0.0) break;
  }
  // Half-way case: round toward the sign of the remaining partials.
  if (n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    if (y == x - hi) hi = x;
  }
  return hi;
}

}  // namespace

std::string_view to_string(FusionRule rule) noexcept {
  switch (rule) {
    case FusionRule::max: return "max";
    case FusionRule::mean: return "mean";
    case FusionRule::median: return "median";
    case FusionRule::min: return "min";
  }
  return "?";
}

std::optional<FusionRule> parse_fusion_rule(std::string_view text) noexcept {
  for (FusionRule r : kAllFusionRules) {
    if (to_string(r) == text) return r;
  }
  return std::nullopt;
}

double fuse(std::span<const double> scores, FusionRule rule) {
  if (scores.empty()) throw InvalidInput("fuse: empty score list");
  for (double s : scores) {
    if (!std::isfinite(s)) throw InvalidInput("fuse: non-finite score");
  }

  switch (rule) {
    case FusionRule::max: return *std::max_element(scores.begin(), scores.end());
    case FusionRule::min: return *std::min_element(scores.begin(), scores.end());
    case FusionRule::mean: {
      const double mean = exact_sum(scores) / static_cast<double>(scores.size());
      // Rounding can push the mean a hair outside [min, max] for near-equal scores.
      const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
      return std::clamp(mean, *lo, *hi);
    }
    case FusionRule::median: {
      std::vector<double> sorted(scores.begin(), scores.end());
      std::sort(sorted.begin(), sorted.end());
      const std::size_t n = sorted.size();
      if (n % 2 == 1) return sorted[n / 2];
      return (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
    }
  }
  throw InvalidInput("fuse: unknown rule");
}

}  // namespace wisig
