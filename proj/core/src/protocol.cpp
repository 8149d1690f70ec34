#include "wisig/protocol.hpp"

#include <algorithm>
#include <set>
#include <thread>

#include "wisig/dichotomy.hpp"
#include "wisig/error.hpp"

namespace wisig {

namespace {

std::vector<const WriterEntry*> writers_in(const Dataset& dataset, const WriterRange& range) {
  std::vector<const WriterEntry*> out;
  for (const auto& w : dataset.writers()) {
    if (range.contains(w.number)) out.push_back(&w);
  }
  return out;
}

std::string range_text(const WriterRange& r) {
  return std::to_string(r.first) + "-" + std::to_string(r.last);
}

// Every writer number in the range must be present; the published set sizes
// depend on it.
void check_complete(const Dataset& dataset, const WriterRange& range, const char* split) {
  for (long long n = range.first; n <= range.last; ++n) {
    if (dataset.find_writer_number(n) == nullptr) {
      throw ProtocolError(std::string(split) + " writer " + std::to_string(n) + " (range " +
                          range_text(range) + ") is missing from the dataset");
    }
  }
}

void check_development(const Dataset& dataset, const ProtocolConfig& config) {
  check_complete(dataset, config.development, "development");
  const auto dev = writers_in(dataset, config.development);
  if (dev.size() < config.impostors_per_writer + 1) {
    throw ProtocolError("development set has " + std::to_string(dev.size()) +
                        " writers; need at least " + std::to_string(config.impostors_per_writer + 1) +
                        " to draw " + std::to_string(config.impostors_per_writer) +
                        " distinct impostor writers");
  }
  for (const auto* w : dev) {
    if (w->genuine.size() < config.m_genuine_for_within) {
      throw ProtocolError("development writer '" + w->id + "' has " +
                          std::to_string(w->genuine.size()) + " genuine samples; need " +
                          std::to_string(config.m_genuine_for_within));
    }
  }
}

void check_exploitation(const Dataset& dataset, const ProtocolConfig& config) {
  check_complete(dataset, config.exploitation, "exploitation");
  const auto ex = writers_in(dataset, config.exploitation);
  if (config.questioned_random > 0 && ex.size() < config.questioned_random + 1) {
    throw ProtocolError("exploitation set has " + std::to_string(ex.size()) +
                        " writers; need at least " + std::to_string(config.questioned_random + 1) +
                        " to draw " + std::to_string(config.questioned_random) +
                        " random forgeries from distinct writers");
  }
  const std::size_t need_genuine = config.reference_size + config.questioned_genuine;
  for (const auto* w : ex) {
    auto fail = [&](const char* what, std::size_t have, std::size_t need) {
      throw ProtocolError("exploitation writer '" + w->id + "' has " + std::to_string(have) + " " +
                          what + " samples; need " + std::to_string(need));
    };
    if (w->genuine.size() < need_genuine) fail("genuine", w->genuine.size(), need_genuine);
    if (w->simple.size() < config.questioned_simple) {
      fail("simple-forgery", w->simple.size(), config.questioned_simple);
    }
    if (w->skilled.size() < config.questioned_skilled) {
      fail("skilled-forgery", w->skilled.size(), config.questioned_skilled);
    }
  }
}

std::vector<SignatureSample> gather(const Dataset& dataset, const std::vector<std::size_t>& pool,
                                    std::span<const std::size_t> picks) {
  std::vector<SignatureSample> out;
  out.reserve(picks.size());
  for (std::size_t p : picks) out.push_back(dataset.sample(pool[p]));
  return out;
}

// Draws `count` distinct writers other than `self` and one random genuine
// sample of each.
std::vector<SignatureSample> draw_impostors(const Dataset& dataset,
                                            const std::vector<const WriterEntry*>& writers,
                                            const WriterEntry* self, std::size_t count, Rng& rng) {
  std::vector<const WriterEntry*> others;
  others.reserve(writers.size());
  for (const auto* w : writers) {
    if (w != self) others.push_back(w);
  }
  std::vector<SignatureSample> out;
  out.reserve(count);
  for (std::size_t k : rng.sample_indices(others.size(), count)) {
    const auto* w = others[k];
    if (w->genuine.empty()) {
      throw ProtocolError("impostor writer '" + w->id + "' has no genuine samples");
    }
    out.push_back(dataset.sample(w->genuine[rng.uniform_index(w->genuine.size())]));
  }
  return out;
}

template <typename Fn>
void parallel_for(std::size_t n, Fn fn) {
  const unsigned hw = std::max(1u, std::min(std::thread::hardware_concurrency(), 16u));
  const std::size_t workers = std::min<std::size_t>(hw, n / 32 + 1);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
}

std::string cell_name(FusionRule rule, std::size_t n_reference) {
  return "cell (fusion=" + std::string(to_string(rule)) +
         ", n_reference=" + std::to_string(n_reference) + ")";
}

}  // namespace

std::string_view to_string(DatasetKind kind) noexcept {
  switch (kind) {
    case DatasetKind::brazilian: return "brazilian";
    case DatasetKind::gpds160: return "gpds160";
    case DatasetKind::gpds300: return "gpds300";
    case DatasetKind::synthetic: return "synthetic";
  }
  return "?";
}

std::optional<DatasetKind> parse_dataset_kind(std::string_view text) noexcept {
  for (auto k : {DatasetKind::brazilian, DatasetKind::gpds160, DatasetKind::gpds300,
                 DatasetKind::synthetic}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

void ProtocolConfig::validate() const {
  if (development.size() == 0) throw InvalidInput("protocol: empty development range");
  if (exploitation.size() == 0) throw InvalidInput("protocol: empty exploitation range");
  if (development.overlaps(exploitation)) {
    throw InvalidInput("protocol: development and exploitation ranges overlap");
  }
  if (m_genuine_for_within < 2) throw InvalidInput("protocol: m_genuine_for_within must be >= 2");
  if (refs_for_between < 1 || refs_for_between > m_genuine_for_within) {
    throw InvalidInput("protocol: refs_for_between must be in [1, m_genuine_for_within]");
  }
  if (impostors_per_writer < 1 || impostors_per_writer >= development.size()) {
    throw InvalidInput("protocol: impostors_per_writer must be in [1, development writers)");
  }
  if (questioned_random >= exploitation.size()) {
    throw InvalidInput("protocol: questioned_random must be below the exploitation writer count");
  }
  if (reference_size < 1) throw InvalidInput("protocol: reference_size must be >= 1");
  if (questioned_genuine < 1) throw InvalidInput("protocol: questioned_genuine must be >= 1");
  if (questioned_skilled < 1) throw InvalidInput("protocol: questioned_skilled must be >= 1");
  if (n_reference_sweep.empty()) throw InvalidInput("protocol: empty n_reference sweep");
  for (const auto n : n_reference_sweep) {
    if (n < 1 || n > reference_size) {
      throw InvalidInput("protocol: n_reference " + std::to_string(n) + " outside [1, " +
                         std::to_string(reference_size) + "]");
    }
  }
  if (fusion_rules.empty()) throw InvalidInput("protocol: no fusion rules");
  if (replications < 1) throw InvalidInput("protocol: replications must be >= 1");
  svm.validate();
}

ProtocolConfig ProtocolConfig::brazilian() {
  ProtocolConfig c;
  c.dataset_kind = DatasetKind::brazilian;
  c.development = {61, 168};
  c.exploitation = {1, 60};
  c.m_genuine_for_within = 30;
  c.refs_for_between = 29;
  c.impostors_per_writer = 15;
  c.reference_size = 30;
  c.questioned_genuine = 10;
  c.questioned_simple = 10;
  c.questioned_skilled = 10;
  c.questioned_random = 10;
  c.n_reference_sweep = {30};
  return c;
}

ProtocolConfig ProtocolConfig::gpds160() {
  ProtocolConfig c;
  c.dataset_kind = DatasetKind::gpds160;
  c.development = {161, 881};
  c.exploitation = {1, 160};
  c.m_genuine_for_within = 12;
  c.refs_for_between = 11;
  c.impostors_per_writer = 6;
  c.reference_size = 12;
  c.questioned_genuine = 10;
  c.questioned_simple = 0;
  c.questioned_skilled = 10;
  c.questioned_random = 10;
  c.n_reference_sweep = {12};
  return c;
}

ProtocolConfig ProtocolConfig::gpds300() {
  ProtocolConfig c = gpds160();
  c.dataset_kind = DatasetKind::gpds300;
  c.development = {301, 881};
  c.exploitation = {1, 300};
  return c;
}

ProtocolConfig ProtocolConfig::synthetic(std::size_t n_development, std::size_t n_exploitation) {
  ProtocolConfig c = gpds160();
  c.dataset_kind = DatasetKind::synthetic;
  const auto ne = static_cast<long long>(n_exploitation);
  const auto nd = static_cast<long long>(n_development);
  c.exploitation = {1, ne};
  c.development = {ne + 1, ne + nd};
  c.questioned_simple = 10;
  c.questioned_random = std::min<std::size_t>(10, n_exploitation > 0 ? n_exploitation - 1 : 0);
  c.impostors_per_writer = std::min<std::size_t>(6, n_development > 0 ? n_development - 1 : 0);
  return c;
}

ProtocolConfig ProtocolConfig::preset(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::brazilian: return brazilian();
    case DatasetKind::gpds160: return gpds160();
    case DatasetKind::gpds300: return gpds300();
    case DatasetKind::synthetic: return synthetic();
  }
  return synthetic();
}

void validate_dataset(const Dataset& dataset, const ProtocolConfig& config) {
  config.validate();
  check_development(dataset, config);
  check_exploitation(dataset, config);
}

std::vector<DissimilarityVector> build_learning_set(const Dataset& dataset,
                                                    const ProtocolConfig& config,
                                                    std::uint64_t stream) {
  config.validate();
  check_development(dataset, config);
  const auto dev = writers_in(dataset, config.development);

  std::vector<DissimilarityVector> within;
  std::vector<DissimilarityVector> between;
  const std::size_t m = config.m_genuine_for_within;
  within.reserve(dev.size() * m * (m - 1) / 2);
  between.reserve(dev.size() * config.refs_for_between * config.impostors_per_writer);

  for (const auto* w : dev) {
    Rng rng(derive_stream(stream, {static_cast<std::uint64_t>(w->number)}));
    const auto picks = rng.sample_indices(w->genuine.size(), m);
    const auto selected = gather(dataset, w->genuine, picks);
    auto pairs = within_pairs(selected);
    std::move(pairs.begin(), pairs.end(), std::back_inserter(within));

    const std::span<const SignatureSample> refs(selected.data(), config.refs_for_between);
    const auto impostors = draw_impostors(dataset, dev, w, config.impostors_per_writer, rng);
    auto cross = between_pairs(refs, impostors);
    std::move(cross.begin(), cross.end(), std::back_inserter(between));
  }

  std::move(between.begin(), between.end(), std::back_inserter(within));
  return within;
}

Enrollment build_reference_and_questioned(const Dataset& dataset, const ProtocolConfig& config,
                                          std::uint64_t stream) {
  config.validate();
  check_exploitation(dataset, config);
  const auto ex = writers_in(dataset, config.exploitation);

  Enrollment out;
  out.references.reserve(ex.size());
  for (const auto* w : ex) {
    Rng rng(derive_stream(stream, {static_cast<std::uint64_t>(w->number)}));
    const auto picks =
        rng.sample_indices(w->genuine.size(), config.reference_size + config.questioned_genuine);
    const std::span<const std::size_t> all(picks);
    auto refs = gather(dataset, w->genuine, all.first(config.reference_size));
    const auto q_genuine = gather(dataset, w->genuine, all.subspan(config.reference_size));

    std::set<std::string> ref_ids;
    for (const auto& r : refs) ref_ids.insert(r.sample_id);
    for (const auto& q : q_genuine) {
      if (ref_ids.contains(q.sample_id)) {
        throw ProtocolError("writer '" + w->id + "': sample '" + q.sample_id +
                            "' is in both the reference and questioned sets");
      }
    }

    auto push = [&](std::vector<SignatureSample> samples, QueryTruth truth) {
      for (auto& s : samples) out.questioned.push_back({w->id, std::move(s), truth});
    };
    push(q_genuine, QueryTruth::genuine);
    push(gather(dataset, w->simple, rng.sample_indices(w->simple.size(), config.questioned_simple)),
         QueryTruth::simple_forgery);
    push(gather(dataset, w->skilled,
                rng.sample_indices(w->skilled.size(), config.questioned_skilled)),
         QueryTruth::skilled_forgery);
    push(draw_impostors(dataset, ex, w, config.questioned_random, rng), QueryTruth::random_forgery);

    out.references.push_back({w->id, w->number, std::move(refs)});
  }
  return out;
}

std::vector<std::size_t> select_references(std::size_t n_available, std::size_t n_reference,
                                           Rng& rng) {
  if (n_reference < 1) throw InvalidInput("n_reference must be >= 1");
  if (n_reference > n_available) {
    throw InvalidInput("n_reference " + std::to_string(n_reference) + " exceeds the " +
                       std::to_string(n_available) + " available references");
  }
  if (n_reference == n_available) {
    std::vector<std::size_t> all(n_available);
    for (std::size_t i = 0; i < n_available; ++i) all[i] = i;
    return all;
  }
  return rng.sample_indices(n_available, n_reference);
}

double verify_query(const SvmModel& model, std::span<const SignatureSample> references,
                    const SignatureSample& query, FusionRule rule, std::size_t n_reference,
                    Rng& rng) {
  const auto picks = select_references(references.size(), n_reference, rng);
  std::vector<double> partial;
  partial.reserve(picks.size());
  for (std::size_t p : picks) {
    partial.push_back(
        model.decision_score(dichotomy_transform(query.features, references[p].features)));
  }
  return fuse(partial, rule);
}

std::uint64_t learning_set_stream(std::uint64_t seed, std::size_t replication) noexcept {
  return derive_stream(seed, {static_cast<std::uint64_t>(StreamPurpose::learning_set), replication});
}

std::uint64_t enrollment_stream(std::uint64_t seed, std::size_t replication) noexcept {
  return derive_stream(seed, {static_cast<std::uint64_t>(StreamPurpose::enrollment), replication});
}

std::uint64_t reference_subset_stream(std::uint64_t seed, std::size_t replication,
                                      std::size_t n_reference, long long writer_number) noexcept {
  return derive_stream(seed, {static_cast<std::uint64_t>(StreamPurpose::reference_subset),
                              replication, n_reference, static_cast<std::uint64_t>(writer_number)});
}

std::vector<PlanCell> ExperimentPlan::cells() const {
  std::vector<PlanCell> out;
  for (FusionRule rule : config.fusion_rules) {
    for (std::size_t n : config.n_reference_sweep) {
      for (std::size_t r = 0; r < config.replications; ++r) {
        out.push_back({rule, n, r, learning_set_stream(config.seed, r),
                       enrollment_stream(config.seed, r)});
      }
    }
  }
  return out;
}

bool ExperimentResult::all_ok() const noexcept {
  return std::all_of(cells.begin(), cells.end(), [](const CellReport& c) { return c.error.empty(); });
}

ExperimentResult run_experiment(const ExperimentPlan& plan, const Dataset& input) {
  const ProtocolConfig& config = plan.config;
  validate_dataset(input, config);
  std::optional<Dataset> normalized;
  if (config.normalize_features) normalized.emplace(input.l2_normalized());
  const Dataset& dataset = normalized ? *normalized : input;

  ExperimentResult result;
  for (FusionRule rule : config.fusion_rules) {
    for (std::size_t n : config.n_reference_sweep) {
      CellReport cell;
      cell.rule = rule;
      cell.n_reference = n;
      if (n < 1 || n > config.reference_size) {
        cell.error = cell_name(rule, n) + ": n_reference must be in [1, " +
                     std::to_string(config.reference_size) + "]";
      }
      result.cells.push_back(std::move(cell));
    }
  }

  for (std::size_t r = 0; r < config.replications; ++r) {
    const auto learning = build_learning_set(dataset, config, learning_set_stream(config.seed, r));
    std::optional<TrainResult> trained;
    try {
      trained.emplace(train(learning, config.svm));
    } catch (const TrainingFailure& e) {
      for (auto& cell : result.cells) {
        if (cell.error.empty()) {
          cell.error = cell_name(cell.rule, cell.n_reference) + ", replication " +
                       std::to_string(r) + ": " + e.what();
        }
      }
      break;
    }
    const SvmModel& model = trained->model;
    result.training.push_back({r, learning.size(), model.support_vector_count(),
                               trained->iterations, trained->training_accuracy});

    const auto enrollment =
        build_reference_and_questioned(dataset, config, enrollment_stream(config.seed, r));
    std::vector<std::size_t> owner(enrollment.questioned.size());
    for (std::size_t q = 0; q < owner.size(); ++q) {
      const auto& claimed = enrollment.questioned[q].claimed_writer;
      for (std::size_t k = 0; k < enrollment.references.size(); ++k) {
        if (enrollment.references[k].writer_id == claimed) owner[q] = k;
      }
    }

    // Partial scores against every reference; cells pick their subsets below.
    std::vector<std::vector<double>> partial(enrollment.questioned.size());
    parallel_for(partial.size(), [&](std::size_t q) {
      const auto& refs = enrollment.references[owner[q]].references;
      const auto& query = enrollment.questioned[q].sample.features;
      partial[q].reserve(refs.size());
      for (const auto& ref : refs) {
        partial[q].push_back(model.decision_score(dichotomy_transform(query, ref.features)));
      }
    });

    for (auto& cell : result.cells) {
      if (!cell.error.empty()) continue;
      try {
        std::vector<ScoredQuery> scored;
        scored.reserve(partial.size());
        std::vector<double> picked;
        for (std::size_t q = 0; q < partial.size(); ++q) {
          const auto& owner_refs = enrollment.references[owner[q]];
          Rng rng(reference_subset_stream(config.seed, r, cell.n_reference, owner_refs.writer_number));
          picked.clear();
          for (std::size_t p : select_references(partial[q].size(), cell.n_reference, rng)) {
            picked.push_back(partial[q][p]);
          }
          scored.push_back({enrollment.questioned[q].claimed_writer, fuse(picked, cell.rule),
                            enrollment.questioned[q].truth});
        }
        cell.replications.push_back(evaluate_queries(scored));
      } catch (const Error& e) {
        cell.error = cell_name(cell.rule, cell.n_reference) + ", replication " + std::to_string(r) +
                     ": " + e.what();
      }
    }
  }

  for (auto& cell : result.cells) {
    if (cell.error.empty()) cell.summary = aggregate(cell.replications);
  }
  return result;
}

}  // namespace wisig
