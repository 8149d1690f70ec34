#include "cli.hpp"

#include <CLI11.hpp>

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "wisig/dataset.hpp"
#include "wisig/error.hpp"
#include "wisig/io.hpp"
#include "wisig/plan.hpp"
#include "wisig/protocol.hpp"
#include "wisig/svm.hpp"
#include "wisig/synthetic.hpp"

namespace wisig::cli {

namespace {

const std::map<std::string, DatasetKind> kDatasetNames = {
    {"brazilian", DatasetKind::brazilian},
    {"gpds160", DatasetKind::gpds160},
    {"gpds300", DatasetKind::gpds300},
    {"synthetic", DatasetKind::synthetic},
};
const std::map<std::string, FusionRule> kFusionNames = {
    {"max", FusionRule::max},
    {"mean", FusionRule::mean},
    {"median", FusionRule::median},
    {"min", FusionRule::min},
};
const std::map<std::string, ReportFormat> kFormatNames = {
    {"table", ReportFormat::table},
    {"machine", ReportFormat::machine},
};

/// Protocol and SVM flags shared by the pipeline commands.
struct ProtocolFlags {
  DatasetKind dataset = DatasetKind::synthetic;
  std::uint64_t seed = 0;
  std::size_t replication = 0;
  std::size_t development_writers = 20;
  std::size_t exploitation_writers = 10;
  bool normalize = false;
  double gamma = 1.0 / 2048.0;
  double c = 1.0;
  double tolerance = 1e-3;

  void add_to(CLI::App& app, bool svm_flags) {
    app.add_option_function<std::string>(
           "--dataset", [this](const std::string& v) { dataset = kDatasetNames.at(v); },
           "Dataset protocol")
        ->check(CLI::IsMember(kDatasetNames));
    app.add_option("--seed", seed, "Root random seed");
    app.add_option("--replication", replication, "Replication index for the random draws");
    app.add_option("--development-writers", development_writers,
                   "Synthetic protocol: number of development writers");
    app.add_option("--exploitation-writers", exploitation_writers,
                   "Synthetic protocol: number of exploitation writers");
    app.add_flag("--normalize-features", normalize, "L2-normalise features before pairing");
    if (svm_flags) {
      app.add_option("--gamma", gamma, "RBF kernel width (default 2^-11)");
      app.add_option("--c", c, "Soft-margin penalty");
      app.add_option("--tolerance", tolerance, "KKT stopping tolerance");
    }
  }

  ProtocolConfig config() const {
    ProtocolConfig cfg = dataset == DatasetKind::synthetic
                             ? ProtocolConfig::synthetic(development_writers, exploitation_writers)
                             : ProtocolConfig::preset(dataset);
    cfg.seed = seed;
    cfg.normalize_features = normalize;
    cfg.svm.gamma = gamma;
    cfg.svm.c = c;
    cfg.svm.tolerance = tolerance;
    cfg.replications = replication + 1;
    return cfg;
  }
};

std::string hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%016" PRIx64, v);
  return buf;
}

void echo(std::ostream& err, const std::string& command, const std::string& body) {
  err << "# wisig " << command << '\n';
  std::istringstream lines(body);
  for (std::string line; std::getline(lines, line);) err << "# " << line << '\n';
}

std::string stream_echo(const ProtocolConfig& cfg, std::size_t first, std::size_t last) {
  std::string out;
  for (std::size_t r = first; r <= last; ++r) {
    out += "stream learning_set[" + std::to_string(r) + "] = " +
           hex(learning_set_stream(cfg.seed, r)) + '\n';
    out += "stream enrollment[" + std::to_string(r) + "] = " + hex(enrollment_stream(cfg.seed, r)) +
           '\n';
  }
  return out;
}

Dataset load_dataset(const std::string& path, const ProtocolConfig& cfg) {
  Dataset ds = load_features(path);
  return cfg.normalize_features ? ds.l2_normalized() : ds;
}

void emit(const std::vector<ReportRow>& rows, ReportFormat format, const std::string& out_path,
          std::ostream& out) {
  if (out_path.empty()) {
    out << (format == ReportFormat::table ? render_table(rows) : render_machine(rows));
  } else {
    write_report(rows, out_path, format);
  }
}

// --- commands -------------------------------------------------------------

struct GenSyntheticArgs {
  ProtocolFlags protocol;
  std::size_t dim = 32;
  double separation = 20.0;
  double noise = 1.0;
  double skilled_offset = 4.0;
  std::string out;
};

int cmd_gen_synthetic(const GenSyntheticArgs& a, std::ostream& out, std::ostream& err) {
  SyntheticSpec spec = SyntheticSpec::shaped_like(a.protocol.dataset);
  if (a.protocol.dataset == DatasetKind::synthetic) {
    spec.n_writers = a.protocol.development_writers + a.protocol.exploitation_writers;
  }
  spec.dim = a.dim;
  spec.separation = a.separation;
  spec.noise = a.noise;
  spec.skilled_offset = a.skilled_offset;
  spec.seed = a.protocol.seed;

  std::ostringstream cfg;
  cfg << "dataset = " << to_string(a.protocol.dataset) << "\nwriters = " << spec.n_writers
      << "\ngenuine_per_writer = " << spec.genuine_per_writer
      << "\nsimple_per_writer = " << spec.simple_per_writer
      << "\nskilled_per_writer = " << spec.skilled_per_writer << "\ndim = " << spec.dim
      << "\nseparation = " << spec.separation << "\nnoise = " << spec.noise
      << "\nskilled_offset = " << spec.skilled_offset << "\nseed = " << spec.seed << '\n';
  echo(err, "gen-synthetic", cfg.str());

  const Dataset ds = generate_synthetic(spec);
  save_features(ds, a.out);
  out << "wrote " << ds.samples().size() << " samples of " << ds.writers().size()
      << " writers (dim " << ds.dim() << ") to " << a.out << '\n';
  return kSuccess;
}

struct LearningSetArgs {
  ProtocolFlags protocol;
  std::string features;
  std::string out;
};

int cmd_build_learning_set(const LearningSetArgs& a, std::ostream& out, std::ostream& err) {
  const ProtocolConfig cfg = a.protocol.config();
  echo(err, "build-learning-set",
       describe_config(cfg) + stream_echo(cfg, a.protocol.replication, a.protocol.replication));
  const Dataset ds = load_dataset(a.features, cfg);
  const auto learning =
      build_learning_set(ds, cfg, learning_set_stream(cfg.seed, a.protocol.replication));
  std::size_t within = 0;
  for (const auto& v : learning) within += v.klass == PairClass::within ? 1 : 0;
  if (!a.out.empty()) {
    std::ofstream f(a.out, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + a.out + "' for writing");
    write_learning_set(learning, f);
    if (!f) throw IoError("failed writing '" + a.out + "'");
  }
  out << "within = " << within << "\nbetween = " << learning.size() - within
      << "\ntotal = " << learning.size() << '\n';
  return kSuccess;
}

struct TrainArgs {
  ProtocolFlags protocol;
  std::string features;
  std::string learning_set;
  std::string out;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  const ProtocolConfig cfg = a.protocol.config();
  echo(err, "train",
       describe_config(cfg) + stream_echo(cfg, a.protocol.replication, a.protocol.replication));
  if (a.features.empty() == a.learning_set.empty()) {
    throw InvalidInput("train: give exactly one of --features and --learning-set");
  }

  std::vector<DissimilarityVector> learning;
  if (!a.learning_set.empty()) {
    learning = load_learning_set(a.learning_set);
  } else {
    const Dataset ds = load_dataset(a.features, cfg);
    learning = build_learning_set(ds, cfg, learning_set_stream(cfg.seed, a.protocol.replication));
  }

  std::optional<TrainResult> result;
  try {
    result.emplace(train(learning, cfg.svm));
  } catch (const InvalidInput& e) {
    // A learning set the solver cannot use (e.g. one class) is a training failure.
    err << "error: " << e.what() << '\n';
    return kTrainingFailure;
  }
  save_model(result->model, a.out);
  char acc[32];
  std::snprintf(acc, sizeof acc, "%.4f", result->training_accuracy);
  out << "learning_set = " << learning.size() << "\nsupport_vectors = "
      << result->model.support_vector_count() << "\niterations = " << result->iterations
      << "\ntraining_accuracy = " << acc << "\nmodel = " << a.out << '\n';
  return kSuccess;
}

struct EvaluateArgs {
  ProtocolFlags protocol;
  std::string features;
  std::string model;
  FusionRule fusion = FusionRule::max;
  std::optional<std::size_t> n_reference;
  ReportFormat format = ReportFormat::machine;
  std::string out;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  ProtocolConfig cfg = a.protocol.config();
  cfg.fusion_rules = {a.fusion};
  const std::size_t n_reference = a.n_reference.value_or(cfg.reference_size);
  cfg.n_reference_sweep = {n_reference};
  const std::size_t rep = a.protocol.replication;
  echo(err, "evaluate", describe_config(cfg) + stream_echo(cfg, rep, rep));

  if (n_reference < 1 || n_reference > cfg.reference_size) {
    throw InvalidInput("--n-reference " + std::to_string(n_reference) + " must be in [1, " +
                       std::to_string(cfg.reference_size) + "]");
  }
  const SvmModel model = load_model(a.model);
  const Dataset ds = load_dataset(a.features, cfg);
  if (model.dim() != ds.dim()) {
    throw InvalidInput("model dim " + std::to_string(model.dim()) + " does not match feature dim " +
                       std::to_string(ds.dim()));
  }

  const auto enrollment = build_reference_and_questioned(ds, cfg, enrollment_stream(cfg.seed, rep));
  std::vector<ScoredQuery> scored;
  scored.reserve(enrollment.questioned.size());
  for (const auto& q : enrollment.questioned) {
    const WriterReferences* refs = nullptr;
    for (const auto& r : enrollment.references) {
      if (r.writer_id == q.claimed_writer) refs = &r;
    }
    Rng rng(reference_subset_stream(cfg.seed, rep, n_reference, refs->writer_number));
    scored.push_back({q.claimed_writer,
                      verify_query(model, refs->references, q.sample, a.fusion, n_reference, rng),
                      q.truth});
  }
  const MetricsReport metrics = evaluate_queries(scored);
  const std::vector<ReportRow> rows = {
      {std::string(to_string(cfg.dataset_kind)), a.fusion, n_reference,
       aggregate(std::span<const MetricsReport>(&metrics, 1))}};

  out << render_table(rows);
  if (a.out.empty()) {
    out << render_machine(rows);
  } else {
    write_report(rows, a.out, a.format);
  }
  return kSuccess;
}

struct SweepArgs {
  std::string plan;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replications;
  std::vector<std::string> fusion;
  std::vector<std::size_t> n_reference;
  std::optional<double> gamma;
  std::optional<double> c;
  ReportFormat format = ReportFormat::table;
  std::string out;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  SweepPlan plan = load_plan(a.plan);
  auto& cfg = plan.config;
  if (a.seed) cfg.seed = *a.seed;
  if (a.replications) cfg.replications = *a.replications;
  if (a.gamma) cfg.svm.gamma = *a.gamma;
  if (a.c) cfg.svm.c = *a.c;
  if (!a.fusion.empty()) {
    cfg.fusion_rules.clear();
    for (const auto& name : a.fusion) {
      const auto rule = parse_fusion_rule(name);
      if (!rule) throw InvalidInput("unknown fusion rule '" + name + "'");
      cfg.fusion_rules.push_back(*rule);
    }
  }
  if (!a.n_reference.empty()) cfg.n_reference_sweep = a.n_reference;
  cfg.validate();

  std::string body = describe_config(cfg);
  if (plan.features) {
    body += "features = " + plan.features->string() + '\n';
  } else {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "synthetic = writers %zu, dim %zu, separation %.17g, noise %.17g, "
                  "skilled_offset %.17g, seed %" PRIu64 "\n",
                  plan.synthetic.n_writers, plan.synthetic.dim, plan.synthetic.separation,
                  plan.synthetic.noise, plan.synthetic.skilled_offset, plan.synthetic.seed);
    body += buf;
  }
  echo(err, "sweep", body + stream_echo(cfg, 0, cfg.replications - 1));

  const Dataset ds = plan.features ? load_features(*plan.features) : generate_synthetic(plan.synthetic);
  const ExperimentResult result = run_experiment(ExperimentPlan{cfg}, ds);

  std::vector<ReportRow> rows;
  for (const auto& cell : result.cells) {
    if (cell.summary) {
      rows.push_back({std::string(to_string(cfg.dataset_kind)), cell.rule, cell.n_reference,
                      *cell.summary});
    } else {
      err << "error: " << cell.error << '\n';
    }
  }
  for (const auto& t : result.training) {
    char acc[32];
    std::snprintf(acc, sizeof acc, "%.4f", t.training_accuracy);
    err << "# replication " << t.index << ": learning_set = " << t.learning_set_size
        << ", support_vectors = " << t.support_vectors << ", iterations = " << t.iterations
        << ", training_accuracy = " << acc << '\n';
  }
  if (!rows.empty()) emit(rows, a.format, a.out, out);
  return result.all_ok() ? kSuccess : kPartialFailure;
}

struct ReportArgs {
  std::string in;
  ReportFormat format = ReportFormat::table;
  std::string out;
};

int cmd_report(const ReportArgs& a, std::ostream& out, std::ostream& err) {
  echo(err, "report", "in = " + a.in + '\n');
  std::ifstream f(a.in, std::ios::binary);
  if (!f) throw IoError("cannot open '" + a.in + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  const auto rows = parse_machine_report(buf.str());
  if (rows.empty()) throw InvalidInput("report: '" + a.in + "' holds no report rows");
  emit(rows, a.format, a.out, out);
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Writer-independent offline signature verification toolkit", "wisig"};
  app.require_subcommand(1);

  GenSyntheticArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-synthetic", "Generate a synthetic feature file");
  gen.protocol.add_to(*gen_cmd, false);
  gen_cmd->add_option("--dim", gen.dim, "Feature dimension");
  gen_cmd->add_option("--separation", gen.separation, "Side of the centroid hypercube");
  gen_cmd->add_option("--noise", gen.noise, "Per-coordinate noise std of genuine samples");
  gen_cmd->add_option("--skilled-offset", gen.skilled_offset,
                      "Extra per-coordinate displacement std of skilled forgeries");
  gen_cmd->add_option("--out", gen.out, "Output feature CSV")->required();

  LearningSetArgs ls;
  auto* ls_cmd = app.add_subcommand("build-learning-set", "Build and count the learning set");
  ls.protocol.add_to(*ls_cmd, false);
  ls_cmd->add_option("--features", ls.features, "Feature CSV")->required();
  ls_cmd->add_option("--out", ls.out, "Write the dissimilarity vectors as CSV");

  TrainArgs tr;
  auto* tr_cmd = app.add_subcommand("train", "Train the writer-independent SVM");
  tr.protocol.add_to(*tr_cmd, true);
  tr_cmd->add_option("--features", tr.features, "Feature CSV");
  tr_cmd->add_option("--learning-set", tr.learning_set, "Learning set CSV from build-learning-set");
  tr_cmd->add_option("--out", tr.out, "Model file")->required();

  EvaluateArgs ev;
  auto* ev_cmd = app.add_subcommand("evaluate", "Verify the questioned set and report metrics");
  ev.protocol.add_to(*ev_cmd, false);
  ev_cmd->add_option("--features", ev.features, "Feature CSV")->required();
  ev_cmd->add_option("--model", ev.model, "Model file")->required();
  ev_cmd->add_option_function<std::string>(
           "--fusion", [&ev](const std::string& v) { ev.fusion = kFusionNames.at(v); },
           "Partial decision fusion rule")
      ->check(CLI::IsMember(kFusionNames));
  ev_cmd->add_option("--n-reference", ev.n_reference, "References per questioned signature");
  ev_cmd->add_option_function<std::string>(
           "--format", [&ev](const std::string& v) { ev.format = kFormatNames.at(v); },
           "Format of the --out report")
      ->check(CLI::IsMember(kFormatNames));
  ev_cmd->add_option("--out", ev.out, "Report file");

  SweepArgs sw;
  auto* sw_cmd = app.add_subcommand("sweep", "Run a replicated fusion-rule / reference-size sweep");
  sw_cmd->add_option("plan", sw.plan, "Plan file")->required();
  sw_cmd->add_option("--seed", sw.seed, "Override the plan seed");
  sw_cmd->add_option("--replications", sw.replications, "Override the replication count");
  sw_cmd->add_option("--fusion", sw.fusion, "Override the fusion rules")->delimiter(',');
  sw_cmd->add_option("--n-reference", sw.n_reference, "Override the reference sizes")->delimiter(',');
  sw_cmd->add_option("--gamma", sw.gamma, "Override the RBF width");
  sw_cmd->add_option("--c", sw.c, "Override the soft-margin penalty");
  sw_cmd->add_option_function<std::string>(
           "--format", [&sw](const std::string& v) { sw.format = kFormatNames.at(v); },
           "Report format")
      ->check(CLI::IsMember(kFormatNames));
  sw_cmd->add_option("--out", sw.out, "Report file (stdout when absent)");

  ReportArgs rp;
  auto* rp_cmd = app.add_subcommand("report", "Render a machine report");
  rp_cmd->add_option("--in", rp.in, "Machine report (JSON lines)")->required();
  rp_cmd->add_option_function<std::string>(
           "--format", [&rp](const std::string& v) { rp.format = kFormatNames.at(v); },
           "Output format")
      ->check(CLI::IsMember(kFormatNames));
  rp_cmd->add_option("--out", rp.out, "Output file (stdout when absent)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }

  try {
    if (*gen_cmd) return cmd_gen_synthetic(gen, out, err);
    if (*ls_cmd) return cmd_build_learning_set(ls, out, err);
    if (*tr_cmd) return cmd_train(tr, out, err);
    if (*ev_cmd) return cmd_evaluate(ev, out, err);
    if (*sw_cmd) return cmd_sweep(sw, out, err);
    if (*rp_cmd) return cmd_report(rp, out, err);
  } catch (const TrainingFailure& e) {
    err << "error: " << e.what() << '\n';
    return kTrainingFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
  return kInvalidInput;
}

}  // namespace wisig::cli
