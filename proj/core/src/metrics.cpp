#include "wisig/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iterator>
#include <map>
#include <tuple>

#include "wisig/error.hpp"
#include "wisig/types.hpp"

namespace wisig {

namespace {

void require_scores(std::span<const double> scores, const char* what) {
  if (scores.empty()) throw InvalidInput(std::string(what) + ": empty score list");
  for (double s : scores) {
    if (!std::isfinite(s)) throw InvalidInput(std::string(what) + ": non-finite score");
  }
}

double percent(std::size_t count, std::size_t total) {
  return 100.0 * static_cast<double>(count) / static_cast<double>(total);
}

std::vector<double> scores_of(std::span<const ScoredQuery> queries, QueryTruth truth) {
  std::vector<double> out;
  for (const auto& q : queries) {
    if (q.truth == truth) out.push_back(q.fused_score);
  }
  return out;
}

struct WriterLess {
  bool operator()(const std::string& a, const std::string& b) const noexcept {
    return writer_less(a, b);
  }
};

}  // namespace

std::string_view to_string(QueryTruth truth) noexcept {
  switch (truth) {
    case QueryTruth::genuine: return "genuine";
    case QueryTruth::random_forgery: return "random";
    case QueryTruth::simple_forgery: return "simple";
    case QueryTruth::skilled_forgery: return "skilled";
  }
  return "?";
}

double false_rejection_rate(std::span<const double> genuine, double threshold) {
  require_scores(genuine, "false_rejection_rate");
  const auto rejected = std::count_if(genuine.begin(), genuine.end(),
                                      [&](double s) { return s < threshold; });
  return percent(static_cast<std::size_t>(rejected), genuine.size());
}

double false_acceptance_rate(std::span<const double> forgeries, double threshold) {
  require_scores(forgeries, "false_acceptance_rate");
  const auto accepted = std::count_if(forgeries.begin(), forgeries.end(),
                                      [&](double s) { return s >= threshold; });
  return percent(static_cast<std::size_t>(accepted), forgeries.size());
}

double frr(std::span<const ScoredQuery> queries, double threshold) {
  const auto genuine = scores_of(queries, QueryTruth::genuine);
  if (genuine.empty()) throw InvalidInput("frr: no genuine queries");
  return false_rejection_rate(genuine, threshold);
}

std::optional<double> far(std::span<const ScoredQuery> queries, QueryTruth forgery_type,
                          double threshold) {
  if (forgery_type == QueryTruth::genuine) throw InvalidInput("far: genuine is not a forgery type");
  const auto forged = scores_of(queries, forgery_type);
  if (forged.empty()) return std::nullopt;
  return false_acceptance_rate(forged, threshold);
}

ThresholdChoice global_threshold(std::span<const double> genuine,
                                 std::span<const double> forgeries) {
  require_scores(genuine, "global_threshold");
  require_scores(forgeries, "global_threshold");

  std::vector<double> g(genuine.begin(), genuine.end());
  std::vector<double> f(forgeries.begin(), forgeries.end());
  std::sort(g.begin(), g.end());
  std::sort(f.begin(), f.end());

  std::vector<double> distinct;
  distinct.reserve(g.size() + f.size());
  std::merge(g.begin(), g.end(), f.begin(), f.end(), std::back_inserter(distinct));
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  std::vector<double> candidates;
  candidates.reserve(2 * distinct.size());
  for (std::size_t k = 0; k < distinct.size(); ++k) {
    candidates.push_back(distinct[k]);
    if (k + 1 < distinct.size()) candidates.push_back((distinct[k] + distinct[k + 1]) / 2.0);
  }

  // Integer keys: |FRR - FAR| is compared as |rej * nf - acc * ng| so that
  // ties are detected exactly.
  const auto ng = static_cast<std::int64_t>(g.size());
  const auto nf = static_cast<std::int64_t>(f.size());
  std::size_t gi = 0;  // genuine strictly below the candidate
  std::size_t fi = 0;  // forgeries strictly below the candidate
  std::tuple<std::int64_t, std::int64_t, double> best{INT64_MAX, INT64_MAX, 0.0};
  std::int64_t best_rej = 0;
  std::int64_t best_acc = 0;
  for (double t : candidates) {
    while (gi < g.size() && g[gi] < t) ++gi;
    while (fi < f.size() && f[fi] < t) ++fi;
    const auto rej = static_cast<std::int64_t>(gi);
    const auto acc = nf - static_cast<std::int64_t>(fi);
    const std::int64_t diff = rej * nf - acc * ng;
    const std::tuple<std::int64_t, std::int64_t, double> key{diff < 0 ? -diff : diff, rej, t};
    if (key < best) {
      best = key;
      best_rej = rej;
      best_acc = acc;
    }
  }

  return {std::get<2>(best), percent(static_cast<std::size_t>(best_rej), g.size()),
          percent(static_cast<std::size_t>(best_acc), f.size())};
}

double equal_error_rate(std::span<const double> genuine, std::span<const double> forgeries) {
  return global_threshold(genuine, forgeries).eer();
}

UserThresholdEer user_threshold_eer(std::span<const ScoredQuery> queries,
                                    QueryTruth forgery_type) {
  struct PerWriter {
    std::vector<double> genuine;
    std::vector<double> forged;
  };
  std::map<std::string, PerWriter, WriterLess> by_writer;
  for (const auto& q : queries) {
    auto& w = by_writer[q.writer_id];
    if (q.truth == QueryTruth::genuine) w.genuine.push_back(q.fused_score);
    else if (q.truth == forgery_type) w.forged.push_back(q.fused_score);
  }

  UserThresholdEer out;
  double sum = 0.0;
  for (const auto& [writer, w] : by_writer) {
    if (w.genuine.empty() || w.forged.empty()) {
      ++out.excluded_writers;
      continue;
    }
    sum += equal_error_rate(w.genuine, w.forged);
    ++out.writers;
  }
  if (out.writers == 0) {
    throw InvalidInput("user_threshold_eer: no writer has both genuine and " +
                       std::string(to_string(forgery_type)) + " queries");
  }
  out.eer = sum / static_cast<double>(out.writers);
  return out;
}

MetricsReport evaluate_queries(std::span<const ScoredQuery> queries) {
  const auto genuine = scores_of(queries, QueryTruth::genuine);
  const auto skilled = scores_of(queries, QueryTruth::skilled_forgery);
  if (genuine.empty()) throw InvalidInput("evaluate: no genuine queries");
  if (skilled.empty()) throw InvalidInput("evaluate: no skilled-forgery queries");

  const auto choice = global_threshold(genuine, skilled);
  MetricsReport r;
  r.threshold_global = choice.threshold;
  r.frr = choice.frr;
  r.far_skilled = choice.far;
  r.far_random = far(queries, QueryTruth::random_forgery, choice.threshold);
  r.far_simple = far(queries, QueryTruth::simple_forgery, choice.threshold);

  double sum = r.frr + r.far_skilled;
  int terms = 2;
  for (const auto& opt : {r.far_random, r.far_simple}) {
    if (opt) {
      sum += *opt;
      ++terms;
    }
  }
  r.aer = sum / terms;
  r.aer_genuine_skilled = (r.frr + r.far_skilled) / 2.0;
  r.eer_global = choice.eer();

  const auto user = user_threshold_eer(queries);
  r.eer_user = user.eer;
  r.excluded_writers = user.excluded_writers;
  return r;
}

Stat summarize(std::span<const double> values) {
  if (values.empty()) throw InvalidInput("summarize: no values");
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

std::string format_stat(const Stat& stat) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f (%.2f)", stat.mean, stat.std);
  return buf;
}

AggregatedReport aggregate(std::span<const MetricsReport> reports) {
  if (reports.empty()) throw InvalidInput("aggregate: no reports");
  const bool has_random = reports.front().far_random.has_value();
  const bool has_simple = reports.front().far_simple.has_value();
  for (const auto& r : reports) {
    if (r.far_random.has_value() != has_random || r.far_simple.has_value() != has_simple) {
      throw InvalidInput("aggregate: reports disagree on which FAR fields are present");
    }
  }

  auto field = [&](auto get) {
    std::vector<double> v;
    v.reserve(reports.size());
    for (const auto& r : reports) v.push_back(get(r));
    return summarize(v);
  };

  AggregatedReport out;
  out.replications = reports.size();
  out.frr = field([](const MetricsReport& r) { return r.frr; });
  if (has_random) out.far_random = field([](const MetricsReport& r) { return *r.far_random; });
  if (has_simple) out.far_simple = field([](const MetricsReport& r) { return *r.far_simple; });
  out.far_skilled = field([](const MetricsReport& r) { return r.far_skilled; });
  out.aer = field([](const MetricsReport& r) { return r.aer; });
  out.aer_genuine_skilled = field([](const MetricsReport& r) { return r.aer_genuine_skilled; });
  out.eer_global = field([](const MetricsReport& r) { return r.eer_global; });
  out.eer_user = field([](const MetricsReport& r) { return r.eer_user; });
  out.threshold_global = field([](const MetricsReport& r) { return r.threshold_global; });
  for (const auto& r : reports) out.excluded_writers += r.excluded_writers;
  return out;
}

}  // namespace wisig
