#include "streamks/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "streamks/errors.hpp"
#include "streamks/model_json.hpp"
#include "streamks/oracle.hpp"
#include "streamks/stream.hpp"

namespace streamks {

using nlohmann::json;

std::uint64_t memory_report(const TesterConfig& config) {
  config.validate();
  const auto levels = static_cast<std::uint64_t>(level_count(config.eps));
  return levels * (2 * batch_size(config.eps) + 1) + kBookkeepingWords;
}

TrialReport run_trial(const TesterConfig& config, const Model& reference, const Model& sampled,
                      std::uint64_t seed, std::uint64_t stream_index) {
  const auto start = std::chrono::steady_clock::now();
  ModelSampler source(sampled, make_rng(seed, stream_index));
  AmplifiedResult r = amplified_test(config, reference, source);
  TrialReport report;
  report.verdict = r.verdict;
  report.samples_consumed = r.samples_consumed;
  report.peak_live_words = r.peak_live_words;
  report.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

namespace {

Mode parse_mode(const std::string& s) {
  if (s == "theory") return Mode::kTheory;
  if (s == "practical") return Mode::kPractical;
  throw DomainError("mode must be theory or practical, got \"" + s + "\"");
}

Model model_from_value(const json& v) {
  if (v.is_string()) return load_model(v.get<std::string>());
  return model_from_json(v);
}

std::string fmt_fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

const char* hypothesis_name(Hypothesis h) { return h == Hypothesis::kNull ? "null" : "alt"; }

}  // namespace

ExperimentPlan ExperimentPlan::from_json(const json& j) {
  ExperimentPlan plan;
  try {
    plan.config.eps = j.at("eps").get<double>();
    plan.config.delta = j.value("delta", 0.1);
    plan.config.mode = parse_mode(j.value("mode", std::string("practical")));
    if (j.contains("c")) plan.config.c = j.at("c").get<double>();
    plan.config.early_exit = j.value("early_exit", false);
    if (j.contains("null_model")) plan.null_model = model_from_value(j.at("null_model"));
    for (const auto& alt : j.value("alt_models", json::array())) {
      Model m = model_from_value(alt);
      const double d = exact_kdistance(m, plan.null_model);
      plan.alt_models.push_back({std::move(m), d});
    }
    plan.trials = j.value("trials", std::uint64_t{1});
    plan.base_seed = j.value("base_seed", std::uint64_t{0});
    plan.threads = j.value("threads", 1U);
  } catch (const json::exception& e) {
    throw DomainError(std::string("malformed experiment plan: ") + e.what());
  }
  plan.config.validate();
  if (plan.trials == 0) throw DomainError("trials must be positive");
  if (plan.threads == 0) plan.threads = 1;
  return plan;
}

ExperimentResult run_experiment(const ExperimentPlan& plan) {
  const std::size_t per_trial = 1 + plan.alt_models.size();
  ExperimentResult result;
  result.rows.resize(plan.trials * per_trial);

  auto run_one = [&](std::size_t slot) {
    const std::uint64_t trial = slot / per_trial;
    const std::size_t h = slot % per_trial;
    const Model& sampled = h == 0 ? plan.null_model : plan.alt_models[h - 1].model;
    TrialReport r = run_trial(plan.config, plan.null_model, sampled, plan.trial_seed(trial), h);
    r.trial_index = trial;
    r.hypothesis = h == 0 ? Hypothesis::kNull : Hypothesis::kAlt;
    r.distance = h == 0 ? 0.0 : plan.alt_models[h - 1].distance;
    result.rows[slot] = std::move(r);
  };

  const unsigned workers = std::min<std::size_t>(plan.threads, result.rows.size());
  if (workers <= 1) {
    for (std::size_t s = 0; s < result.rows.size(); ++s) run_one(s);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t s = next++; s < result.rows.size(); s = next++) run_one(s);
        } catch (...) {
          errors[w] = std::current_exception();
          next = result.rows.size();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  for (std::size_t h = 0; h < per_trial; ++h) {
    HypothesisSummary s;
    s.hypothesis = h == 0 ? Hypothesis::kNull : Hypothesis::kAlt;
    s.distance = h == 0 ? 0.0 : plan.alt_models[h - 1].distance;
    std::uint64_t errors = 0;
    double samples = 0.0;
    for (std::uint64_t t = 0; t < plan.trials; ++t) {
      const TrialReport& r = result.rows[t * per_trial + h];
      const bool wrong = (h == 0) == r.verdict.rejected();
      errors += wrong ? 1 : 0;
      samples += static_cast<double>(r.samples_consumed);
      s.max_peak_words = std::max(s.max_peak_words, r.peak_live_words);
    }
    s.error_rate = static_cast<double>(errors) / static_cast<double>(plan.trials);
    s.mean_samples = samples / static_cast<double>(plan.trials);
    result.summary.push_back(s);
  }
  return result;
}

std::string experiment_csv(const ExperimentResult& result, bool with_timing) {
  std::ostringstream out;
  out << "trial,hypothesis,distance,decision,samples,peak_words,ms\n";
  for (const TrialReport& r : result.rows) {
    out << r.trial_index << ',' << hypothesis_name(r.hypothesis) << ',' << fmt_fixed(r.distance) << ','
        << (r.verdict.rejected() ? "reject" : "accept") << ',' << r.samples_consumed << ','
        << r.peak_live_words << ',' << (with_timing ? fmt_fixed(r.wall_time_ms) : "-") << '\n';
  }
  for (const HypothesisSummary& s : result.summary) {
    out << "summary," << hypothesis_name(s.hypothesis) << ',' << fmt_fixed(s.distance) << ','
        << fmt_fixed(s.error_rate) << ',' << fmt_fixed(s.mean_samples) << ',' << s.max_peak_words << ",-\n";
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open \"" + path + "\" for writing");
  f << text;
  f.flush();
  if (!f) throw IoError("failed writing \"" + path + "\"");
}

std::vector<ModelPair> builtin_pair_catalog(double eps) {
  const Model u = Model::uniform_unit();
  std::vector<ModelPair> pairs;
  auto add = [&](std::string name, Model unknown, Model reference) {
    pairs.push_back({std::move(name), std::move(unknown), std::move(reference)});
  };

  for (double center : {0.2, 0.37, 0.5, 0.75}) {
    for (double scale : {1.0, 1.5}) {
      const double amount = scale * eps;
      if (amount >= std::min(center, 1.0 - center)) continue;
      add("wedge c=" + fmt_fixed(center) + " x" + fmt_fixed(scale), wedge_perturb(u, amount, center), u);
    }
  }

  const Model ramp = Model::piecewise_linear({{0.0, 0.0}, {0.5, 0.25}, {1.0, 1.0}});
  for (double center : {0.3, 0.6}) {
    add("wedge on ramp c=" + fmt_fixed(center), wedge_perturb(ramp, eps, center), ramp);
  }
  add("ramp vs uniform", ramp, u);

  add("shifted uniform", Model::piecewise_linear({{eps, 0.0}, {1.0 + eps, 1.0}}), u);
  {
    // F = x / (1 + s) differs from x by s / (1 + s) at x = 1.
    const double gap = 1.2 * eps;
    const double s = gap / (1.0 - gap);
    add("stretched uniform", Model::piecewise_linear({{0.0, 0.0}, {1.0 + s, 1.0}}), u);
  }

  const Model bump = Model::piecewise_linear({{0.4, 0.0}, {0.45, 1.0}});
  {
    // The bump's mass w moves the CDF by w * 0.55 at x = 0.45.
    const double w = std::min(0.9, 1.2 * eps / 0.55);
    add("uniform with bump", mixture({{1.0 - w, u}, {w, bump}}), u);
  }
  {
    const Model left = Model::piecewise_linear({{0.1, 0.0}, {0.12, 1.0}});
    const Model right = Model::piecewise_linear({{0.8, 0.0}, {0.85, 1.0}});
    const double w = std::min(0.45, 1.5 * eps);
    add("uniform with two bumps", mixture({{1.0 - 2 * w, u}, {w, left}, {w, right}}), u);
  }
  {
    const Model spike = Model::piecewise_linear({{0.9, 0.0}, {0.901, 1.0}});
    const double w = std::min(0.9, 2.0 * eps);
    add("uniform with spike", mixture({{1.0 - w, u}, {w, spike}}), u);
  }
  {
    const Model skewed = Model::piecewise_linear({{-1.0, 0.0}, {0.0, 0.3}, {2.0, 1.0}});
    const Model narrow = Model::piecewise_linear({{0.5, 0.0}, {0.6, 1.0}});
    const double w = std::min(0.9, 3.0 * eps);
    add("skewed reference with bump", mixture({{1.0 - w, skewed}, {w, narrow}}), skewed);
  }

  {
    std::vector<Atom> ref;
    std::vector<Atom> moved;
    for (int k = 0; k < 10; ++k) {
      ref.push_back({static_cast<double>(k), 0.1});
      moved.push_back({static_cast<double>(k), 0.1});
    }
    const double shift = std::min(0.1, eps);
    moved.front().weight -= shift;
    moved.back().weight += shift;
    if (moved.front().weight <= 0.0) moved.erase(moved.begin());
    add("lifted ten atoms, mass moved", Model::discrete_lifted(moved), Model::discrete_lifted(ref));
  }
  add("lifted coin, biased",
      Model::discrete_lifted({{0.0, 0.5 - std::min(0.4, eps)}, {1.0, 0.5 + std::min(0.4, eps)}}),
      Model::discrete_lifted({{0.0, 0.5}, {1.0, 0.5}}));
  add("lifted interleaved supports",
      Model::discrete_lifted({{0.5, 0.25}, {1.5, 0.25}, {2.5, 0.25}, {3.5, 0.25}}),
      Model::discrete_lifted({{0.0, 0.25}, {1.0, 0.25}, {2.0, 0.25}, {3.0, 0.25}}));
  add("lifted skewed four atoms",
      Model::discrete_lifted({{1.0, 0.1}, {2.0, 0.2}, {3.0, 0.3}, {4.0, 0.4}}),
      Model::discrete_lifted({{1.0, 0.4}, {2.0, 0.3}, {3.0, 0.2}, {4.0, 0.1}}));
  add("lifted grid vs uniform",
      Model::discrete_lifted({{0.125, 0.25}, {0.375, 0.25}, {0.625, 0.25}, {0.875, 0.25}}), u);
  return pairs;
}

std::vector<ModelPair> pairs_from_json(const json& j) {
  if (!j.is_array()) throw DomainError("pairs file must hold a JSON array");
  std::vector<ModelPair> pairs;
  try {
    for (const auto& p : j) {
      pairs.push_back({p.value("name", std::string("pair ") + std::to_string(pairs.size() + 1)),
                       model_from_value(p.at("unknown")), model_from_value(p.at("reference"))});
    }
  } catch (const json::exception& e) {
    throw DomainError(std::string("malformed pairs file: ") + e.what());
  }
  return pairs;
}

Model load_model(const std::string& spec) {
  std::error_code ec;
  if (spec.find('{') == std::string::npos && std::filesystem::is_regular_file(spec, ec)) {
    std::ifstream f(spec);
    if (!f) throw IoError("cannot read model file \"" + spec + "\"");
    json j;
    try {
      j = json::parse(f);
    } catch (const json::parse_error& e) {
      throw DomainError("model file \"" + spec + "\" is not valid JSON: " + e.what());
    }
    return model_from_json(j);
  }
  return parse_model_spec(spec);
}

namespace {

/// LineSource over stdin or an owned file.
class TextStreamSource final : public SampleSource {
 public:
  TextStreamSource(std::istream& in, const Model& model, Rng rng) : source_(in, model, std::move(rng)) {}
  TextStreamSource(const std::string& path, const Model& model, Rng rng)
      : file_(std::make_unique<std::ifstream>(path)), source_(*file_, model, std::move(rng)) {
    if (!*file_) throw IoError("cannot open stream file \"" + path + "\"");
  }
  std::optional<Value> next() override { return source_.next(); }

 private:
  std::unique_ptr<std::ifstream> file_;
  LineSource source_;
};

std::unique_ptr<SampleSource> open_stream(const std::string& spec, const Model& reference,
                                          std::uint64_t seed, std::istream& in) {
  if (spec == "-") return std::make_unique<TextStreamSource>(in, reference, make_rng(seed));
  if (spec.rfind("gen:", 0) == 0) {
    const std::string rest = spec.substr(4);
    const auto colon = rest.find(':');
    std::uint64_t gen_seed = 0;
    try {
      std::size_t used = 0;
      gen_seed = std::stoull(rest.substr(0, colon), &used);
      if (used != rest.substr(0, colon).size()) throw std::invalid_argument("seed");
    } catch (const std::exception&) {
      throw DomainError("generator stream spec is gen:SEED[:MODEL]");
    }
    Model sampled = colon == std::string::npos ? reference : load_model(rest.substr(colon + 1));
    return std::make_unique<ModelSampler>(std::move(sampled), make_rng(gen_seed));
  }
  return std::make_unique<TextStreamSource>(spec, reference, make_rng(seed));
}

const char* paint(bool reject, bool color) {
  if (!color) return "";
  return reject ? "\x1b[31m" : "\x1b[32m";
}

const char* reset(bool color) { return color ? "\x1b[0m" : ""; }

}  // namespace

int run_test_command(const TestCommand& cmd, std::istream& in, std::ostream& out, std::ostream& err,
                     bool color) {
  try {
    cmd.config.validate();
    const Model model = load_model(cmd.model_spec);
    auto source = open_stream(cmd.stream_spec, model, cmd.seed, in);
    const auto start = std::chrono::steady_clock::now();
    AmplifiedResult r = amplified_test(cmd.config, model, *source);
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    const bool reject = r.verdict.rejected();
    out << "verdict: " << paint(reject, color) << (reject ? "REJECT" : "ACCEPT") << reset(color) << '\n';
    if (r.verdict.witness) {
      const Witness& w = *r.verdict.witness;
      out << "witness: bucket i=" << w.i << " j=" << w.j << " frequency=" << w.observed_frequency
          << " expected=" << std::ldexp(1.0, -w.j) << " threshold=" << w.threshold << '\n';
    }
    out << "rounds: " << r.rounds << " (reject votes " << r.reject_votes << ")\n";
    out << "samples: " << r.samples_consumed << '\n';
    out << "peak_words: " << r.peak_live_words << '\n';
    out << "ms: " << fmt_fixed(ms) << '\n';
    return reject ? 1 : 0;
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return 2;
  }
}

int run_ks_baseline_command(const KsBaselineCommand& cmd, std::istream& in, std::ostream& out,
                            std::ostream& err, bool color) {
  try {
    const Model model = load_model(cmd.model_spec);
    auto source = open_stream(cmd.stream_spec, model, cmd.seed, in);
    const bool generated = cmd.stream_spec.rfind("gen:", 0) == 0;
    std::vector<Value> sample;
    while (!generated || sample.size() < cmd.n) {
      auto v = source->next();
      if (!v) break;
      sample.push_back(*v);
    }
    const std::size_t n = sample.size();
    const KsTestResult r = ks_test(std::move(sample), model, cmd.delta);
    out << "n: " << n << '\n';
    out << "statistic: " << r.statistic << '\n';
    out << "threshold: " << r.threshold << '\n';
    out << "verdict: " << paint(r.reject, color) << (r.reject ? "REJECT" : "ACCEPT") << reset(color) << '\n';
    return r.reject ? 1 : 0;
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return 2;
  }
}

int run_lemma_check_command(const LemmaCheckCommand& cmd, std::ostream& out, std::ostream& err) {
  try {
    std::vector<ModelPair> pairs;
    if (cmd.pairs_path) {
      std::ifstream f(*cmd.pairs_path);
      if (!f) throw IoError("cannot read pairs file \"" + *cmd.pairs_path + "\"");
      json j;
      try {
        j = json::parse(f);
      } catch (const json::parse_error& e) {
        throw DomainError(std::string("pairs file is not valid JSON: ") + e.what());
      }
      pairs = pairs_from_json(j);
    } else {
      pairs = builtin_pair_catalog(cmd.eps);
    }
    level_count(cmd.eps);

    std::size_t checked = 0;
    std::size_t failed = 0;
    out << "name,distance,i,j,gap,threshold,status\n";
    for (const ModelPair& p : pairs) {
      const double d = exact_kdistance(p.unknown, p.reference);
      const WitnessReport w = lemma1_witness(p.unknown, p.reference, cmd.eps);
      // Distances equal to eps up to rounding still meet the precondition.
      const bool applies = d >= cmd.eps - 1e-12;
      const char* status = !applies ? "skipped" : (w.satisfied ? "certified" : "FAILED");
      checked += applies ? 1 : 0;
      failed += (applies && !w.satisfied) ? 1 : 0;
      out << '"' << p.name << "\"," << fmt_fixed(d) << ',' << w.best_bucket.i << ',' << w.best_bucket.j << ','
          << fmt_fixed(w.gap) << ',' << fmt_fixed(w.threshold) << ',' << status << '\n';
    }
    out << "# certified " << (checked - failed) << " of " << checked << " pairs at eps=" << cmd.eps << '\n';
    return failed == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return 2;
  }
}

int run_experiment_command(const ExperimentCommand& cmd, std::ostream& out, std::ostream& err) {
  try {
    std::ifstream f(cmd.plan_path);
    if (!f) throw IoError("cannot read plan file \"" + cmd.plan_path + "\"");
    json j;
    try {
      j = json::parse(f);
    } catch (const json::parse_error& e) {
      throw DomainError(std::string("plan file is not valid JSON: ") + e.what());
    }
    const ExperimentPlan plan = ExperimentPlan::from_json(j);
    const ExperimentResult result = run_experiment(plan);
    write_text_file(cmd.out_path, experiment_csv(result, cmd.timing));
    for (const HypothesisSummary& s : result.summary) {
      out << (s.hypothesis == Hypothesis::kNull ? "null: reject rate " : "alt: accept rate ")
          << fmt_fixed(s.error_rate);
      if (s.hypothesis == Hypothesis::kAlt) out << " at distance " << fmt_fixed(s.distance);
      out << ", mean samples " << fmt_fixed(s.mean_samples) << ", peak words " << s.max_peak_words << '\n';
    }
    return 0;
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return 2;
  }
}

}  // namespace streamks
