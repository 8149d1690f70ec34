#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wisig {

enum class QueryTruth { genuine, random_forgery, simple_forgery, skilled_forgery };

std::string_view to_string(QueryTruth truth) noexcept;

struct ScoredQuery {
  std::string writer_id;  // claimed writer
  double fused_score = 0.0;
  QueryTruth truth = QueryTruth::genuine;
};

// Decision rule used everywhere: accept iff score >= threshold.
// Rates are percentages in [0, 100].

/// Percentage of genuine scores strictly below `threshold`.
/// Throws InvalidInput on an empty list.
double false_rejection_rate(std::span<const double> genuine, double threshold);
/// Percentage of forgery scores at or above `threshold`.
/// Throws InvalidInput on an empty list.
double false_acceptance_rate(std::span<const double> forgeries, double threshold);

/// FRR over the genuine queries; throws InvalidInput if there are none.
double frr(std::span<const ScoredQuery> queries, double threshold);
/// FAR over the queries of `forgery_type`; nullopt when none are present.
std::optional<double> far(std::span<const ScoredQuery> queries, QueryTruth forgery_type,
                          double threshold);

struct ThresholdChoice {
  double threshold = 0.0;
  double frr = 0.0;
  double far = 0.0;
  double eer() const noexcept { return (frr + far) / 2.0; }
};

/// Threshold where the FRR and FAR curves cross. Candidates are every
/// distinct observed score and the midpoints between adjacent ones; the
/// winner minimises |FRR - FAR|, then FRR, then the threshold itself.
/// Throws InvalidInput if either list is empty or holds a non-finite value.
ThresholdChoice global_threshold(std::span<const double> genuine,
                                 std::span<const double> forgeries);

/// (FRR + FAR) / 2 at the global threshold.
double equal_error_rate(std::span<const double> genuine, std::span<const double> forgeries);

struct UserThresholdEer {
  double eer = 0.0;  // mean of the per-writer EERs
  std::size_t writers = 0;
  std::size_t excluded_writers = 0;  // writers lacking genuine or forgery queries
};

/// Per-writer thresholds: each writer's genuine scores against that writer's
/// forgeries of `forgery_type`, averaged over writers. Throws InvalidInput
/// when no writer has both kinds of query.
UserThresholdEer user_threshold_eer(std::span<const ScoredQuery> queries,
                                    QueryTruth forgery_type = QueryTruth::skilled_forgery);

struct MetricsReport {
  double frr = 0.0;
  std::optional<double> far_random;
  std::optional<double> far_simple;
  double far_skilled = 0.0;
  double aer = 0.0;
  double aer_genuine_skilled = 0.0;
  double eer_global = 0.0;
  double eer_user = 0.0;
  double threshold_global = 0.0;
  std::size_t excluded_writers = 0;
};

/// Full report for one replication: global threshold from genuine vs skilled
/// forgeries, every rate at that threshold, and the user-threshold EER.
/// Throws InvalidInput without genuine or skilled queries.
MetricsReport evaluate_queries(std::span<const ScoredQuery> queries);

struct Stat {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single value

  bool operator==(const Stat&) const = default;
};

Stat summarize(std::span<const double> values);
/// "mean (std)" with two decimals, e.g. "2.45 (0.13)".
std::string format_stat(const Stat& stat);

struct AggregatedReport {
  std::size_t replications = 0;
  Stat frr;
  std::optional<Stat> far_random;
  std::optional<Stat> far_simple;
  Stat far_skilled;
  Stat aer;
  Stat aer_genuine_skilled;
  Stat eer_global;
  Stat eer_user;
  Stat threshold_global;
  std::size_t excluded_writers = 0;  // summed over replications

  bool operator==(const AggregatedReport&) const = default;
};

/// Mean and sample std per field. Throws InvalidInput on an empty list or
/// when optional fields are present in some reports and absent in others.
AggregatedReport aggregate(std::span<const MetricsReport> reports);

}  // namespace wisig
