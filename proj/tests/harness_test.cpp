#include "streamks/harness.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "streamks/errors.hpp"
#include "streamks/oracle.hpp"

namespace streamks {
namespace {

const std::string kData = STREAMKS_TEST_DATA_DIR;

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

nlohmann::json load_json(const std::string& path) { return nlohmann::json::parse(slurp(path)); }

TesterConfig cfg(double eps) {
  TesterConfig c;
  c.eps = eps;
  return c;
}

TEST(MemoryReport, Examples) {
  EXPECT_EQ(memory_report(cfg(0.1)), 3050u);
  EXPECT_EQ(memory_report(cfg(0.01)), 16163u);
}

TEST(MemoryReport, HalvingEpsAtMostDoubles) {
  double eps = 0.1;
  for (int k = 0; k < 12; ++k, eps /= 2) {
    const double ratio = static_cast<double>(memory_report(cfg(eps / 2))) / static_cast<double>(memory_report(cfg(eps)));
    EXPECT_GT(ratio, 1.0);
    EXPECT_LE(ratio, 2.0) << "eps=" << eps;
  }
}

TEST(MemoryReport, InstrumentedPeakIsExact) {
  for (double eps : {0.1, 0.05, 0.01}) {
    const TrialReport r = run_trial(cfg(eps), Model::uniform_unit(), Model::uniform_unit(), 3);
    EXPECT_EQ(r.peak_live_words, memory_report(cfg(eps)));
  }
}

TEST(Experiment, GoldenCsv) {
  const ExperimentPlan plan = ExperimentPlan::from_json(load_json(kData + "/golden_plan.json"));
  ASSERT_EQ(plan.alt_models.size(), 2u);
  EXPECT_NEAR(plan.alt_models[0].distance, 0.1, 1e-12);
  EXPECT_NEAR(plan.alt_models[1].distance, 0.02, 1e-12);
  const std::string csv = experiment_csv(run_experiment(plan));
  EXPECT_EQ(csv, slurp(kData + "/golden_experiment.csv"));
}

TEST(Experiment, ReproducibleAndThreadIndependent) {
  auto j = load_json(kData + "/golden_plan.json");
  j["trials"] = 12;
  j["c"] = 4;
  const ExperimentPlan serial = ExperimentPlan::from_json(j);
  j["threads"] = 4;
  const ExperimentPlan parallel = ExperimentPlan::from_json(j);
  const std::string a = experiment_csv(run_experiment(serial));
  EXPECT_EQ(a, experiment_csv(run_experiment(serial)));
  EXPECT_EQ(a, experiment_csv(run_experiment(parallel)));
}

TEST(Experiment, RowsAndSummary) {
  auto j = load_json(kData + "/golden_plan.json");
  j["trials"] = 7;
  j["c"] = 4;
  const ExperimentPlan plan = ExperimentPlan::from_json(j);
  const ExperimentResult r = run_experiment(plan);
  ASSERT_EQ(r.rows.size(), 21u);
  ASSERT_EQ(r.summary.size(), 3u);
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    EXPECT_EQ(r.rows[k].trial_index, k / 3);
    EXPECT_EQ(r.rows[k].hypothesis, k % 3 == 0 ? Hypothesis::kNull : Hypothesis::kAlt);
    EXPECT_EQ(r.rows[k].peak_live_words, r.rows[0].peak_live_words);
    EXPECT_EQ(r.rows[k].samples_consumed, required_samples(plan.config).total);
  }
  const std::string csv = experiment_csv(r, /*with_timing=*/true);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "trial,hypothesis,distance,decision,samples,peak_words,ms");
  EXPECT_EQ(plan.trial_seed(3), 20240604u);
}

TEST(Experiment, PlanErrors) {
  EXPECT_THROW(ExperimentPlan::from_json(nlohmann::json::object()), DomainError);
  EXPECT_THROW(ExperimentPlan::from_json({{"eps", 0.1}, {"mode", "fast"}}), DomainError);
  EXPECT_THROW(ExperimentPlan::from_json({{"eps", 0.1}, {"trials", 0}}), DomainError);
  EXPECT_THROW(ExperimentPlan::from_json({{"eps", 0.7}}), DomainError);
}

TEST(Experiment, UnwritableOutputIsIoError) {
  EXPECT_THROW(write_text_file("/nonexistent-dir/out.csv", "x"), IoError);
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_experiment_command({kData + "/golden_plan.json", "/nonexistent-dir/out.csv", false}, out, err);
  EXPECT_EQ(code, 2);
  EXPECT_NE(err.str().find("cannot open"), std::string::npos);
}

TEST(RunTest, AcceptsNullWithAmpleC) {
  TestCommand cmd;
  cmd.config.eps = 0.25;
  cmd.config.c = 2e4;
  cmd.stream_spec = "gen:7";
  std::istringstream in;
  std::ostringstream out;
  std::ostringstream err;
  EXPECT_EQ(run_test_command(cmd, in, out, err), 0) << out.str() << err.str();
  EXPECT_NE(out.str().find("verdict: ACCEPT"), std::string::npos);
  EXPECT_NE(out.str().find("samples: 320000"), std::string::npos);
}

TEST(RunTest, RejectsWedgeWithWitness) {
  TestCommand cmd;
  cmd.config.eps = 0.1;
  cmd.stream_spec = "gen:7:wedge:0.2:0.5";
  std::istringstream in;
  std::ostringstream out;
  std::ostringstream err;
  EXPECT_EQ(run_test_command(cmd, in, out, err), 1);
  EXPECT_NE(out.str().find("verdict: REJECT"), std::string::npos);
  EXPECT_NE(out.str().find("witness: bucket"), std::string::npos);
  EXPECT_EQ(out.str().find("\x1b["), std::string::npos);
}

TEST(RunTest, ShortFileIsInsufficient) {
  TestCommand cmd;
  cmd.config.eps = 0.1;
  cmd.config.c = 4;
  cmd.stream_spec = kData + "/short_stream.txt";
  std::istringstream in;
  std::ostringstream out;
  std::ostringstream err;
  EXPECT_EQ(run_test_command(cmd, in, out, err), 2);
  EXPECT_NE(err.str().find("InsufficientSamples: needed 400, got 50"), std::string::npos) << err.str();
}

TEST(RunTest, MalformedLineReportsLineNumber) {
  TestCommand cmd;
  cmd.stream_spec = kData + "/malformed_stream.txt";
  std::istringstream in;
  std::ostringstream out;
  std::ostringstream err;
  EXPECT_EQ(run_test_command(cmd, in, out, err), 2);
  // Line 1 is a comment; "abc" sits on line 4 of this file.
  EXPECT_NE(err.str().find("ParseError at line 4"), std::string::npos) << err.str();

  std::istringstream stdin_stream("0.5\n0.25\nabc\n");
  std::ostringstream err2;
  cmd.stream_spec = "-";
  EXPECT_EQ(run_test_command(cmd, stdin_stream, out, err2), 2);
  EXPECT_NE(err2.str().find("ParseError at line 3"), std::string::npos) << err2.str();
}

TEST(RunTest, StdinStreamAndLiftedModel) {
  TestCommand cmd;
  cmd.config.eps = 0.5;
  cmd.config.c = 2;
  cmd.model_spec = R"({"kind":"discrete-pmf-lifted","params":{"atoms":[[0,0.5],[1,0.5]]}})";
  std::ostringstream text;
  for (int k = 0; k < 8; ++k) text << (k % 2) << '\n';
  std::istringstream in(text.str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_test_command(cmd, in, out, err);
  EXPECT_TRUE(code == 0 || code == 1) << err.str();
  EXPECT_NE(out.str().find("samples: 8"), std::string::npos);
}

TEST(RunTest, BadModelIsError) {
  TestCommand cmd;
  cmd.model_spec = "no-such-kind";
  std::istringstream in;
  std::ostringstream out;
  std::ostringstream err;
  EXPECT_EQ(run_test_command(cmd, in, out, err), 2);
}

TEST(KsBaseline, GeneratedStreams) {
  KsBaselineCommand cmd;
  cmd.stream_spec = "gen:1:wedge:0.2:0.5";
  cmd.n = 1000;
  std::istringstream in;
  std::ostringstream out;
  std::ostringstream err;
  EXPECT_EQ(run_ks_baseline_command(cmd, in, out, err), 1);
  EXPECT_NE(out.str().find("n: 1000"), std::string::npos);

  std::istringstream file_in("0.1\n0.5\n");
  cmd.stream_spec = "-";
  std::ostringstream out2;
  EXPECT_EQ(run_ks_baseline_command(cmd, file_in, out2, err), 0);
  EXPECT_NE(out2.str().find("statistic: 0.5"), std::string::npos) << out2.str();
}

TEST(LemmaCheck, PairsFile) {
  LemmaCheckCommand cmd;
  cmd.eps = 0.1;
  cmd.pairs_path = kData + "/lemma_pairs.json";
  std::ostringstream out;
  std::ostringstream err;
  EXPECT_EQ(run_lemma_check_command(cmd, out, err), 0) << err.str();
  EXPECT_NE(out.str().find("certified 4 of 4"), std::string::npos) << out.str();
  EXPECT_NE(out.str().find("skipped"), std::string::npos);
}

TEST(LemmaCheck, BuiltinCatalog) {
  for (double eps : {0.1, 0.05, 0.02}) {
    const auto pairs = builtin_pair_catalog(eps);
    std::size_t eligible = 0;
    for (const ModelPair& p : pairs) {
      if (exact_kdistance(p.unknown, p.reference) >= eps - 1e-12) ++eligible;
    }
    EXPECT_GE(eligible, 20u) << eps;
    std::ostringstream out;
    std::ostringstream err;
    EXPECT_EQ(run_lemma_check_command({eps, std::nullopt}, out, err), 0) << out.str();
  }
}

}  // namespace
}  // namespace streamks
