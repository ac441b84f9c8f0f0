#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "streamks/reference.hpp"
#include "streamks/sketch.hpp"

namespace streamks {

/// Predicted peak live words of one tester execution: each level holds
/// batch_size counters and batch_size + 1 quantile boundaries, plus the
/// fixed bookkeeping words. Quantile access itself is charged nothing.
std::uint64_t memory_report(const TesterConfig& config);

enum class Hypothesis { kNull, kAlt };

struct TrialReport {
  std::uint64_t trial_index = 0;
  Hypothesis hypothesis = Hypothesis::kNull;
  double distance = 0.0;  ///< exact Kolmogorov distance of the sampled model to the reference
  Verdict verdict;
  std::uint64_t samples_consumed = 0;
  std::uint64_t peak_live_words = 0;
  double wall_time_ms = 0.0;
};

/// One amplified run on samples drawn from `sampled` with the given seed.
TrialReport run_trial(const TesterConfig& config, const Model& reference, const Model& sampled,
                      std::uint64_t seed, std::uint64_t stream_index = 0);

struct AltModel {
  Model model;
  double distance = 0.0;
};

struct ExperimentPlan {
  TesterConfig config;
  Model null_model = Model::uniform_unit();
  std::vector<AltModel> alt_models;
  std::uint64_t trials = 1;
  std::uint64_t base_seed = 0;
  unsigned threads = 1;

  /// Trial i draws every hypothesis from seed base_seed + i; hypothesis h
  /// (0 = null) uses stream h of that seed.
  std::uint64_t trial_seed(std::uint64_t trial_index) const { return base_seed + trial_index; }

  /// Reads {"eps", "delta", "c", "mode", "early_exit", "null_model",
  /// "alt_models", "trials", "base_seed", "threads"}; alt distances are
  /// computed exactly against the null model.
  static ExperimentPlan from_json(const nlohmann::json& j);
};

struct HypothesisSummary {
  Hypothesis hypothesis = Hypothesis::kNull;
  double distance = 0.0;
  double error_rate = 0.0;  ///< reject rate under the null, accept rate under an alternative
  double mean_samples = 0.0;
  std::uint64_t max_peak_words = 0;
};

struct ExperimentResult {
  std::vector<TrialReport> rows;  ///< ordered by trial, then hypothesis
  std::vector<HypothesisSummary> summary;
};

ExperimentResult run_experiment(const ExperimentPlan& plan);

/// Header plus one row per trial and hypothesis, then one summary row per
/// hypothesis. The ms column is "-" unless `with_timing`, which keeps the
/// default output byte-reproducible.
std::string experiment_csv(const ExperimentResult& result, bool with_timing = false);

/// Throws IoError if the file cannot be written.
void write_text_file(const std::string& path, const std::string& text);

/// Named (unknown, reference) pair for Lemma-style bucket certification.
struct ModelPair {
  std::string name;
  Model unknown;
  Model reference;
};

/// Analytic pairs whose exact Kolmogorov distance is at least eps: wedges
/// at several centers, shifted and stretched uniforms, mixtures with narrow
/// bumps, non-uniform references and lifted discrete pairs.
std::vector<ModelPair> builtin_pair_catalog(double eps);

/// [{"name", "unknown", "reference"}, ...] with model specs as values.
std::vector<ModelPair> pairs_from_json(const nlohmann::json& j);

// CLI-level entry points; each returns the process exit code.

struct TestCommand {
  TesterConfig config;
  std::string model_spec = "uniform-unit";
  std::string stream_spec = "-";
  std::uint64_t seed = 0;  ///< residuals for lifted file samples
};

/// 0 = accept, 1 = reject, 2 = error (message on `err`).
int run_test_command(const TestCommand& cmd, std::istream& in, std::ostream& out, std::ostream& err,
                     bool color = false);

struct KsBaselineCommand {
  std::string model_spec = "uniform-unit";
  std::string stream_spec = "-";
  double delta = 0.1;
  std::uint64_t n = 1000;  ///< sample count for generator streams
  std::uint64_t seed = 0;
};

int run_ks_baseline_command(const KsBaselineCommand& cmd, std::istream& in, std::ostream& out,
                            std::ostream& err, bool color = false);

struct LemmaCheckCommand {
  double eps = 0.1;
  std::optional<std::string> pairs_path;  ///< builtin catalog when unset
};

/// 0 if every pair meeting the distance precondition is certified, else 1.
int run_lemma_check_command(const LemmaCheckCommand& cmd, std::ostream& out, std::ostream& err);

struct ExperimentCommand {
  std::string plan_path;
  std::string out_path;
  bool timing = false;
};

int run_experiment_command(const ExperimentCommand& cmd, std::ostream& out, std::ostream& err);

/// Loads a model from a JSON file if `spec` names one, else parses it inline.
Model load_model(const std::string& spec);

}  // namespace streamks
