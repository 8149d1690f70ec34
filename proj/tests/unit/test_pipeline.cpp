#include <gtest/gtest.h>

#include "../oracles/centroid_oracle.hpp"
#include "wisig/dichotomy.hpp"
#include "wisig/error.hpp"
#include "wisig/io.hpp"
#include "wisig/protocol.hpp"
#include "wisig/synthetic.hpp"

using namespace wisig;

namespace {

ProtocolConfig quick_config() {
  auto cfg = ProtocolConfig::synthetic();
  cfg.replications = 2;
  cfg.seed = 17;
  return cfg;
}

}  // namespace

TEST(Synthetic, ShapeAndIds) {
  SyntheticSpec spec;
  const auto ds = generate_synthetic(spec);
  EXPECT_EQ(ds.writers().size(), 30u);
  EXPECT_EQ(ds.dim(), 32u);
  EXPECT_EQ(ds.samples().size(), 30u * 44u);
  const auto* w = ds.find_writer("1");
  ASSERT_NE(w, nullptr);
  EXPECT_EQ(w->genuine.size(), 24u);
  EXPECT_EQ(w->simple.size(), 10u);
  EXPECT_EQ(w->skilled.size(), 10u);
  EXPECT_EQ(ds.sample(w->genuine[0]).sample_id, "g01");
  EXPECT_EQ(ds.find_writer_number(30)->id, "30");

  const auto brazil = SyntheticSpec::shaped_like(DatasetKind::brazilian);
  EXPECT_EQ(brazil.n_writers, 168u);
  EXPECT_EQ(brazil.genuine_per_writer, 40u);
  const auto gpds = SyntheticSpec::shaped_like(DatasetKind::gpds300);
  EXPECT_EQ(gpds.n_writers, 881u);
  EXPECT_EQ(gpds.skilled_per_writer, 30u);
  EXPECT_EQ(gpds.simple_per_writer, 0u);
}

TEST(Synthetic, FixedSeedSameBytes) {
  SyntheticSpec spec;
  spec.seed = 12;
  std::ostringstream a, b, c;
  write_features(generate_synthetic(spec), a);
  write_features(generate_synthetic(spec), b);
  spec.seed = 13;
  write_features(generate_synthetic(spec), c);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NE(a.str(), c.str());
}

TEST(Synthetic, Rejections) {
  SyntheticSpec s;
  s.noise = 0;
  EXPECT_THROW(generate_synthetic(s), InvalidInput);
  s = {};
  s.skilled_offset = -1;
  EXPECT_THROW(generate_synthetic(s), InvalidInput);
  s = {};
  s.dim = 0;
  EXPECT_THROW(generate_synthetic(s), InvalidInput);
}

TEST(Synthetic, NearestCentroidSeparatesWriters) {
  SyntheticSpec spec;
  spec.separation = 50.0;
  spec.noise = 0.5;
  const auto ds = generate_synthetic(spec);
  const oracle::NearestCentroid nc(ds);
  std::size_t correct = 0, total = 0;
  for (const auto& s : ds.samples()) {
    if (s.label != SampleLabel::genuine) continue;
    ++total;
    correct += nc.classify(s.features) == s.writer_id ? 1 : 0;
  }
  EXPECT_EQ(correct, total);
}

TEST(VerifyQuery, SingleReferenceEqualsDecision) {
  const auto ds = generate_synthetic(SyntheticSpec{});
  const auto cfg = ProtocolConfig::synthetic();
  const auto model = train(build_learning_set(ds, cfg, learning_set_stream(0, 0)), cfg.svm).model;
  const auto* w = ds.find_writer("1");
  std::vector<SignatureSample> refs;
  for (std::size_t k = 0; k < 4; ++k) refs.push_back(ds.sample(w->genuine[k]));
  const auto& query = ds.sample(w->skilled[0]);
  for (auto rule : kAllFusionRules) {
    Rng rng(5);
    const double fused = verify_query(model, std::span(refs).first(1), query, rule, 1, rng);
    EXPECT_EQ(fused, model.decision_score(dichotomy_transform(refs[0].features, query.features)));
  }
  // Full reference set: no randomness involved.
  Rng r1(1), r2(2);
  EXPECT_EQ(verify_query(model, refs, query, FusionRule::mean, 4, r1),
            verify_query(model, refs, query, FusionRule::mean, 4, r2));
  // A query identical to a reference scores at least the origin under max.
  Rng r3(3);
  const double origin = model.decision_score(std::vector<double>(ds.dim(), 0.0));
  EXPECT_GE(verify_query(model, refs, refs[2], FusionRule::max, 4, r3), origin);
  EXPECT_THROW(verify_query(model, refs, query, FusionRule::max, 5, r3), InvalidInput);
}

TEST(Experiment, SeparableSyntheticRun) {
  auto cfg = quick_config();
  cfg.fusion_rules = {FusionRule::max, FusionRule::mean, FusionRule::median, FusionRule::min};
  cfg.n_reference_sweep = {1, 12};
  const auto ds = generate_synthetic(SyntheticSpec{});
  const auto result = run_experiment(ExperimentPlan{cfg}, ds);
  ASSERT_TRUE(result.all_ok());
  ASSERT_EQ(result.cells.size(), 8u);
  ASSERT_EQ(result.training.size(), 2u);
  for (const auto& cell : result.cells) {
    ASSERT_TRUE(cell.summary.has_value());
    EXPECT_EQ(cell.replications.size(), 2u);
    EXPECT_EQ(cell.summary->replications, 2u);
    EXPECT_LT(cell.summary->aer.mean, 5.0) << to_string(cell.rule) << " n=" << cell.n_reference;
    EXPECT_TRUE(cell.summary->far_simple.has_value());
  }
}

TEST(Experiment, Deterministic) {
  const auto cfg = quick_config();
  const auto ds = generate_synthetic(SyntheticSpec{});
  const auto a = run_experiment(ExperimentPlan{cfg}, ds);
  const auto b = run_experiment(ExperimentPlan{cfg}, ds);
  ASSERT_EQ(a.cells.size(), b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) EXPECT_EQ(a.cells[i].summary, b.cells[i].summary);
}

TEST(Experiment, IndistinguishableSkilledForgeriesNearChance) {
  SyntheticSpec spec;
  spec.skilled_offset = 0.0;
  auto cfg = quick_config();
  cfg.replications = 1;
  const auto result = run_experiment(ExperimentPlan{cfg}, generate_synthetic(spec));
  ASSERT_TRUE(result.all_ok());
  EXPECT_NEAR(result.cells[0].summary->eer_global.mean, 50.0, 10.0);
}

TEST(Experiment, DatasetMismatchIsProtocolError) {
  SyntheticSpec spec;
  spec.n_writers = 12;
  EXPECT_THROW(run_experiment(ExperimentPlan{quick_config()}, generate_synthetic(spec)), ProtocolError);
}

TEST(Experiment, TrainingFailureMarksCells) {
  auto cfg = quick_config();
  cfg.svm.max_iterations = 1;
  cfg.n_reference_sweep = {1, 12};
  const auto result = run_experiment(ExperimentPlan{cfg}, generate_synthetic(SyntheticSpec{}));
  EXPECT_FALSE(result.all_ok());
  ASSERT_EQ(result.cells.size(), 2u);
  for (const auto& c : result.cells) {
    EXPECT_FALSE(c.summary.has_value());
    EXPECT_FALSE(c.error.empty());
  }
}
