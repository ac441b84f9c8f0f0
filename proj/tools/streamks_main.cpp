// Command-line front end: test, experiment, lemma-check, ks-baseline.

#include <cstdlib>
#include <iostream>
#include <string>

#include <unistd.h>

#include "CLI11.hpp"
#include "streamks/harness.hpp"

namespace {

bool use_color() { return std::getenv("NO_COLOR") == nullptr && ::isatty(STDOUT_FILENO) != 0; }

streamks::Mode to_mode(const std::string& s) {
  return s == "theory" ? streamks::Mode::kTheory : streamks::Mode::kPractical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming identity tester for the Kolmogorov distance"};
  app.require_subcommand(1);

  streamks::TestCommand test;
  std::string mode = "practical";
  double c = 0.0;
  auto* test_cmd = app.add_subcommand("test", "Run the amplified streaming tester on one stream");
  test_cmd->add_option("--eps", test.config.eps, "Distance parameter in (0, 1/2]")->required();
  test_cmd->add_option("--delta", test.config.delta, "Failure probability in (0, 1)")->default_val(0.1);
  auto* c_opt = test_cmd->add_option("--c", c, "Chernoff constant (default depends on --mode)");
  test_cmd->add_option("--mode", mode, "theory or practical")
      ->check(CLI::IsMember({"theory", "practical"}))
      ->default_val("practical");
  test_cmd->add_flag("--early-exit", test.config.early_exit, "Stop a level at its first rejecting batch");
  test_cmd->add_option("--model", test.model_spec, "Reference model: JSON file, inline JSON or kind name")
      ->default_val("uniform-unit");
  test_cmd->add_option("--stream", test.stream_spec, "Sample file, - for stdin, or gen:SEED[:MODEL]")
      ->default_val("-");
  test_cmd->add_option("--seed", test.seed, "Seed for residuals when lifting atomic samples")->default_val(0);

  streamks::ExperimentCommand experiment;
  auto* exp_cmd = app.add_subcommand("experiment", "Monte-Carlo type-I / type-II experiment");
  exp_cmd->add_option("--plan", experiment.plan_path, "Plan JSON")->required();
  exp_cmd->add_option("--out", experiment.out_path, "CSV output path")->required();
  exp_cmd->add_flag("--timing", experiment.timing, "Fill the ms column (output no longer reproducible)");

  streamks::LemmaCheckCommand lemma;
  std::string pairs_path;
  auto* lemma_cmd = app.add_subcommand("lemma-check", "Certify bucket witnesses on analytic pairs");
  lemma_cmd->add_option("--eps", lemma.eps, "Distance parameter in (0, 1/2]")->required();
  auto* pairs_opt = lemma_cmd->add_option("--pairs", pairs_path, "Pairs JSON (builtin catalog if omitted)");

  streamks::KsBaselineCommand ks;
  auto* ks_cmd = app.add_subcommand("ks-baseline", "Classical KS test with the DKW threshold");
  ks_cmd->add_option("--model", ks.model_spec, "Reference model")->default_val("uniform-unit");
  ks_cmd->add_option("--stream", ks.stream_spec, "Sample file, - for stdin, or gen:SEED[:MODEL]")
      ->default_val("-");
  ks_cmd->add_option("--delta", ks.delta, "Failure probability")->default_val(0.1);
  ks_cmd->add_option("--n", ks.n, "Sample count for generator streams")->default_val(1000);
  ks_cmd->add_option("--seed", ks.seed, "Seed for residuals when lifting atomic samples")->default_val(0);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*test_cmd) {
    test.config.mode = to_mode(mode);
    if (*c_opt) test.config.c = c;
    return streamks::run_test_command(test, std::cin, std::cout, std::cerr, use_color());
  }
  if (*exp_cmd) return streamks::run_experiment_command(experiment, std::cout, std::cerr);
  if (*lemma_cmd) {
    if (*pairs_opt) lemma.pairs_path = pairs_path;
    return streamks::run_lemma_check_command(lemma, std::cout, std::cerr);
  }
  return streamks::run_ks_baseline_command(ks, std::cin, std::cout, std::cerr, use_color());
}
