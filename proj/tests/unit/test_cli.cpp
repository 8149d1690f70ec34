#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "wisig/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = wisig::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("wisig_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    features_ = (dir_ / "features.csv").string();
    ASSERT_EQ(run({"gen-synthetic", "--out", features_, "--seed", "3"}).code, 0);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
  std::string features_;
};

}  // namespace

TEST_F(CliTest, TrainWritesModel) {
  const auto r = run({"train", "--features", features_, "--out", path("m.bin")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(path("m.bin")));
  EXPECT_NE(r.err.find("# gamma = 0.00048828125"), std::string::npos);
  EXPECT_NE(r.err.find("# stream learning_set[0] = 0x"), std::string::npos);
}

TEST_F(CliTest, TrainIsByteIdentical) {
  ASSERT_EQ(run({"train", "--features", features_, "--out", path("a.bin")}).code, 0);
  ASSERT_EQ(run({"train", "--features", features_, "--out", path("b.bin")}).code, 0);
  EXPECT_EQ(slurp(path("a.bin")), slurp(path("b.bin")));
}

TEST_F(CliTest, MissingFeatureFile) {
  EXPECT_EQ(run({"train", "--features", path("nope.csv"), "--out", path("m.bin")}).code, 2);
  EXPECT_EQ(run({"evaluate", "--features", path("nope.csv"), "--model", path("m.bin")}).code, 2);
}

TEST_F(CliTest, SingleClassLearningSetIsTrainingFailure) {
  ASSERT_EQ(run({"build-learning-set", "--features", features_, "--out", path("ls.csv")}).code, 0);
  std::ifstream in(path("ls.csv"));
  std::ofstream out(path("within.csv"));
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("between", 0) != 0) out << line << '\n';
  }
  out.close();
  const auto r = run({"train", "--learning-set", path("within.csv"), "--out", path("m.bin")});
  EXPECT_EQ(r.code, 3) << r.err;
  EXPECT_FALSE(fs::exists(path("m.bin")));
}

TEST_F(CliTest, BuildLearningSetCounts) {
  const auto r = run({"build-learning-set", "--features", features_});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("within = 1320\nbetween = 1320\n"), std::string::npos) << r.out;
}

TEST_F(CliTest, EvaluateSeparableData) {
  ASSERT_EQ(run({"train", "--features", features_, "--out", path("m.bin")}).code, 0);
  const auto r = run({"evaluate", "--features", features_, "--model", path("m.bin"), "--fusion",
                      "max", "--out", path("r.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = wisig::parse_machine_report(slurp(path("r.jsonl")));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].report.eer_global.mean, 0.0);
  EXPECT_NE(r.out.find("0.00 (0.00)"), std::string::npos);

  const auto again = run({"evaluate", "--features", features_, "--model", path("m.bin"), "--fusion",
                          "max", "--out", path("r2.jsonl")});
  EXPECT_EQ(slurp(path("r.jsonl")), slurp(path("r2.jsonl")));
}

TEST_F(CliTest, EvaluateRejectsOversizedReferenceCount) {
  ASSERT_EQ(run({"train", "--features", features_, "--out", path("m.bin")}).code, 0);
  const auto r = run({"evaluate", "--features", features_, "--model", path("m.bin"),
                      "--n-reference", "13"});
  EXPECT_EQ(r.code, 2);
}

TEST_F(CliTest, EvaluateRejectsDimMismatch) {
  ASSERT_EQ(run({"train", "--features", features_, "--out", path("m.bin")}).code, 0);
  ASSERT_EQ(run({"gen-synthetic", "--dim", "8", "--out", path("f8.csv")}).code, 0);
  const auto r = run({"evaluate", "--features", path("f8.csv"), "--model", path("m.bin")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("dim"), std::string::npos);
}

TEST_F(CliTest, EvaluateRejectsCorruptModel) {
  std::ofstream(path("bad.bin")) << "WISVM1";
  EXPECT_EQ(run({"evaluate", "--features", features_, "--model", path("bad.bin")}).code, 2);
}

TEST_F(CliTest, SweepRowsAndDeterminism) {
  std::ofstream(path("plan.txt")) << "fusion = max,mean,median,min\nn_reference = 1,12\n"
                                     "replications = 2\nseed = 5\n";
  const auto a = run({"sweep", path("plan.txt"), "--format", "machine"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(wisig::parse_machine_report(a.out).size(), 8u);
  const auto b = run({"sweep", path("plan.txt"), "--format", "machine"});
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.err, b.err);

  const auto table = run({"sweep", path("plan.txt"), "--fusion", "min", "--n-reference", "3",
                          "--replications", "1"});
  ASSERT_EQ(table.code, 0);
  EXPECT_EQ(std::count(table.out.begin(), table.out.end(), '\n'), 2);
}

TEST_F(CliTest, SweepEmptyListIsInputError) {
  std::ofstream(path("plan.txt")) << "n_reference =\n";
  EXPECT_EQ(run({"sweep", path("plan.txt")}).code, 2);
  std::ofstream(path("plan2.txt")) << "fusion =\n";
  EXPECT_EQ(run({"sweep", path("plan2.txt")}).code, 2);
}

TEST_F(CliTest, SweepTrainingFailureIsPartial) {
  std::ofstream(path("plan.txt")) << "replications = 1\nmax_iterations = 1\n";
  const auto r = run({"sweep", path("plan.txt")});
  EXPECT_EQ(r.code, 1) << r.err;
  EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST_F(CliTest, ReportRerenders) {
  std::ofstream(path("plan.txt")) << "replications = 1\n";
  ASSERT_EQ(run({"sweep", path("plan.txt"), "--format", "machine", "--out", path("r.jsonl")}).code, 0);
  const auto r = run({"report", "--in", path("r.jsonl")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("synthetic"), std::string::npos);
  EXPECT_EQ(run({"report", "--in", path("missing.jsonl")}).code, 2);
}

TEST(Cli, UnknownFlagsAndCommands) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"train", "--bogus"}).code, 2);
  EXPECT_EQ(run({"evaluate", "--fusion", "sum", "--features", "x", "--model", "y"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}
