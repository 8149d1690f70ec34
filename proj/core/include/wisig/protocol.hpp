#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wisig/dataset.hpp"
#include "wisig/fusion.hpp"
#include "wisig/metrics.hpp"
#include "wisig/rng.hpp"
#include "wisig/svm.hpp"
#include "wisig/types.hpp"

namespace wisig {

enum class DatasetKind { brazilian, gpds160, gpds300, synthetic };

std::string_view to_string(DatasetKind kind) noexcept;
std::optional<DatasetKind> parse_dataset_kind(std::string_view text) noexcept;

/// Inclusive range of writer numbers.
struct WriterRange {
  long long first = 0;
  long long last = -1;

  bool contains(long long n) const noexcept { return n >= first && n <= last; }
  std::size_t size() const noexcept {
    return last < first ? 0 : static_cast<std::size_t>(last - first + 1);
  }
  bool overlaps(const WriterRange& o) const noexcept {
    return size() > 0 && o.size() > 0 && first <= o.last && o.first <= last;
  }
  bool operator==(const WriterRange&) const = default;
};

/// Dataset partition recipe plus the experiment grid it is run over.
struct ProtocolConfig {
  DatasetKind dataset_kind = DatasetKind::synthetic;
  WriterRange development;
  WriterRange exploitation;

  // Learning set: C(m, 2) within pairs and refs x impostors between pairs per
  // development writer.
  std::size_t m_genuine_for_within = 12;
  std::size_t refs_for_between = 11;
  std::size_t impostors_per_writer = 6;

  // Reference and questioned sets per exploitation writer.
  std::size_t reference_size = 12;
  std::size_t questioned_genuine = 10;
  std::size_t questioned_simple = 0;
  std::size_t questioned_skilled = 10;
  std::size_t questioned_random = 10;

  std::vector<std::size_t> n_reference_sweep{12};
  std::vector<FusionRule> fusion_rules{FusionRule::max};
  std::size_t replications = 5;
  std::uint64_t seed = 0;
  /// L2-normalise features before the dichotomy transform. Off by default.
  bool normalize_features = false;
  SvmConfig svm;

  /// Throws InvalidInput when the recipe is inconsistent.
  void validate() const;

  static ProtocolConfig brazilian();
  static ProtocolConfig gpds160();
  static ProtocolConfig gpds300();
  /// Exploitation writers 1..n_exploitation, development writers after them.
  static ProtocolConfig synthetic(std::size_t n_development = 20, std::size_t n_exploitation = 10);
  static ProtocolConfig preset(DatasetKind kind);
};

/// Checks that every writer the recipe touches has enough samples.
/// Throws ProtocolError naming the first offending writer.
void validate_dataset(const Dataset& dataset, const ProtocolConfig& config);

/// Development writers' within and between pairs, within first then between,
/// each in writer order. `stream` is the replication's learning-set stream.
std::vector<DissimilarityVector> build_learning_set(const Dataset& dataset,
                                                    const ProtocolConfig& config,
                                                    std::uint64_t stream);

struct Query {
  std::string claimed_writer;
  SignatureSample sample;
  QueryTruth truth = QueryTruth::genuine;
};

struct WriterReferences {
  std::string writer_id;
  long long writer_number = 0;
  std::vector<SignatureSample> references;
};

struct Enrollment {
  std::vector<WriterReferences> references;  // writer order
  std::vector<Query> questioned;             // writer order, then genuine/simple/skilled/random
};

/// Reference set R and questioned set Q for the exploitation writers.
Enrollment build_reference_and_questioned(const Dataset& dataset, const ProtocolConfig& config,
                                          std::uint64_t stream);

/// Indices of the n_reference references a query is compared with: all of
/// them, in order, when n_reference == n_available; otherwise a draw without
/// replacement from `rng`. Throws InvalidInput for n_reference outside
/// [1, n_available].
std::vector<std::size_t> select_references(std::size_t n_available, std::size_t n_reference,
                                           Rng& rng);

/// Scores `query` against n_reference references (chosen with
/// select_references) and fuses the partial scores.
double verify_query(const SvmModel& model, std::span<const SignatureSample> references,
                    const SignatureSample& query, FusionRule rule, std::size_t n_reference,
                    Rng& rng);

/// Substream used to pick a writer's reference subset. Independent of the
/// fusion rule, so all rules in a replication see the same references.
std::uint64_t reference_subset_stream(std::uint64_t seed, std::size_t replication,
                                      std::size_t n_reference, long long writer_number) noexcept;
std::uint64_t learning_set_stream(std::uint64_t seed, std::size_t replication) noexcept;
std::uint64_t enrollment_stream(std::uint64_t seed, std::size_t replication) noexcept;

struct PlanCell {
  FusionRule rule = FusionRule::max;
  std::size_t n_reference = 0;
  std::size_t replication = 0;
  std::uint64_t learning_stream = 0;
  std::uint64_t enrollment_stream = 0;
};

struct ExperimentPlan {
  ProtocolConfig config;

  /// Rule-major, then n_reference, then replication.
  std::vector<PlanCell> cells() const;
};

struct CellReport {
  FusionRule rule = FusionRule::max;
  std::size_t n_reference = 0;
  std::vector<MetricsReport> replications;
  std::optional<AggregatedReport> summary;  // absent when the cell failed
  std::string error;
};

struct ReplicationInfo {
  std::size_t index = 0;
  std::size_t learning_set_size = 0;
  std::size_t support_vectors = 0;
  std::uint64_t iterations = 0;
  double training_accuracy = 0.0;
};

struct ExperimentResult {
  std::vector<CellReport> cells;  // ordered (rule, n_reference)
  std::vector<ReplicationInfo> training;

  bool all_ok() const noexcept;
};

/// Runs every replication (fresh learning set, fresh SVM, fresh R/Q) and
/// evaluates every (rule, n_reference) cell on it. A failing cell is
/// recorded with its coordinates and the remaining cells still run.
/// Throws ProtocolError if the dataset does not fit the recipe.
ExperimentResult run_experiment(const ExperimentPlan& plan, const Dataset& dataset);

}  // namespace wisig
