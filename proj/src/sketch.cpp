#include "streamks/sketch.hpp"

#include <algorithm>
#include <cmath>

#include "streamks/errors.hpp"

namespace streamks {

namespace {

// Ceiling that ignores floating-point excess below one part in 1e12, so that
// e.g. c / 0.1^2 = 100.00000000000001 rounds to 100.
std::uint64_t guarded_ceil(double v) {
  return static_cast<std::uint64_t>(std::ceil(v - 1e-12 * std::max(1.0, std::abs(v))));
}

}  // namespace

void TesterConfig::validate() const {
  if (!(eps > 0.0 && eps <= 0.5)) throw DomainError("eps must lie in (0, 1/2]");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  if (!(chernoff_c() > 0.0) || !std::isfinite(chernoff_c())) throw DomainError("c must be positive");
}

int level_count(double eps) {
  if (!(eps > 0.0 && eps <= 0.5)) throw DomainError("eps must lie in (0, 1/2]");
  return static_cast<int>(guarded_ceil(std::log2(1.0 / eps))) + 2;
}

double log_factor(double eps) { return std::log2(1.0 / eps) + 3.0; }

std::uint64_t batch_size(double eps) {
  const double l = log_factor(eps);
  return guarded_ceil(l * l * l);
}

std::uint64_t amplification_rounds(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  if (delta >= 0.1) return 1;
  // Hoeffding on the majority of r rounds with error 1/10 each:
  // exp(-2 r 0.4^2) <= delta once r >= ln(1/delta) / 0.32.
  return 2 * guarded_ceil(1.6 * std::log(1.0 / delta)) + 1;
}

double LevelParams::bucket_probability() const { return std::ldexp(1.0, -j); }

LevelParams level_params(const TesterConfig& config, int j) {
  config.validate();
  const double eps = config.eps;
  const int levels = level_count(eps);
  if (j < 1 || j > levels) throw DomainError("level j must lie in [1, " + std::to_string(levels) + "]");

  const double l = log_factor(eps);
  const double l3 = l * l * l;
  const double inv_eps2 = 1.0 / (eps * eps);

  LevelParams p;
  p.j = j;
  p.delta_j = std::max(eps / (static_cast<double>(j) * j), eps / l) / 20.0;
  p.t_j = std::max<std::uint64_t>(1, guarded_ceil(config.chernoff_c() *
                                                   std::min(inv_eps2, l3 / std::ldexp(eps * eps, j))));
  p.batch_size = batch_size(eps);
  p.bucket_count = std::uint64_t{1} << j;
  return p;
}

SampleRequirement required_samples(const TesterConfig& config) {
  SampleRequirement req;
  const int levels = level_count(config.eps);
  for (int j = 1; j <= levels; ++j) {
    req.per_level.push_back(level_params(config, j).samples());
    req.per_round = std::max(req.per_round, req.per_level.back());
  }
  req.rounds = amplification_rounds(config.delta);
  req.total = req.rounds * req.per_round;
  return req;
}

std::uint64_t bucket_of(const Model& model, int j, const Value& x) {
  if (j < 1 || j > 62) throw DomainError("level j out of range");
  std::uint64_t lo = 1;
  std::uint64_t hi = std::uint64_t{1} << j;
  // Smallest i with x <= q_{i/2^j}; q_1 = +inf guarantees one exists.
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (x <= model.quantile(std::ldexp(static_cast<double>(mid), -j))) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

LevelSubroutine::LevelSubroutine(const LevelParams& params, const Model& model, bool early_exit)
    : params_(params),
      early_exit_(early_exit),
      counters_(params.batch_size, 0),
      boundaries_(params.batch_size + 1, Value::pos_inf()) {
  load_batch(model);
}

void LevelSubroutine::load_batch(const Model& model) {
  active_ = std::min(params_.batch_size, params_.bucket_count - batch_start_ + 1);
  for (std::uint64_t k = 0; k <= active_; ++k) {
    boundaries_[k] = model.quantile(std::ldexp(static_cast<double>(batch_start_ - 1 + k), -params_.j));
  }
  std::fill(boundaries_.begin() + static_cast<std::ptrdiff_t>(active_) + 1, boundaries_.end(),
            Value::pos_inf());
  std::fill(counters_.begin(), counters_.end(), 0);
  seen_ = 0;
}

void LevelSubroutine::step(const Model& model, const Value& x) {
  if (finished_) throw StateError("level subroutine already finished");
  const auto first = boundaries_.begin();
  const auto last = first + static_cast<std::ptrdiff_t>(active_);
  if (*first < x && x <= *last) {
    const auto upper = std::lower_bound(first + 1, last + 1, x);
    ++counters_[static_cast<std::size_t>(upper - first - 1)];
  }
  if (++seen_ == params_.t_j) close_batch(model);
}

void LevelSubroutine::close_batch(const Model& model) {
  const double expected = params_.bucket_probability();
  const double t = static_cast<double>(params_.t_j);
  if (observer_) observer_(batch_start_, std::span<const std::uint64_t>(counters_.data(), active_));
  for (std::uint64_t k = 0; k < active_ && !witness_; ++k) {
    const double freq = static_cast<double>(counters_[k]) / t;
    if (std::abs(freq - expected) > params_.delta_j) {
      witness_ = Witness{batch_start_ + k, params_.j, freq, params_.delta_j};
    }
  }
  ++batches_done_;
  const bool last_batch = batch_start_ + params_.batch_size > params_.bucket_count;
  if (last_batch || (witness_ && early_exit_)) {
    release();
    return;
  }
  batch_start_ += params_.batch_size;
  load_batch(model);
}

void LevelSubroutine::release() {
  finished_ = true;
  active_ = 0;
  counters_.clear();
  counters_.shrink_to_fit();
  boundaries_.clear();
  boundaries_.shrink_to_fit();
}

StreamingTester::StreamingTester(const TesterConfig& config, const Model& model) : model_(model) {
  config.validate();
  const int levels = level_count(config.eps);
  levels_.reserve(static_cast<std::size_t>(levels));
  for (int j = 1; j <= levels; ++j) {
    levels_.emplace_back(level_params(config, j), model_, config.early_exit);
    needed_ = std::max(needed_, levels_.back().params().samples());
  }
  unfinished_ = levels_.size();
  peak_words_ = live_words();
}

std::uint64_t StreamingTester::live_words() const {
  std::uint64_t words = kBookkeepingWords;
  for (const auto& level : levels_) words += level.live_words();
  return words;
}

void StreamingTester::ingest(const Value& x) {
  if (finalized_) throw StateError("tester already finalized");
  ++seen_;
  for (auto& level : levels_) {
    if (level.finished()) continue;
    level.step(model_, x);
    if (level.finished()) --unfinished_;
  }
  peak_words_ = std::max(peak_words_, live_words());
}

Verdict StreamingTester::finalize() {
  if (finalized_) throw StateError("tester already finalized");
  if (!all_finished()) throw InsufficientSamples(needed_, seen_);
  finalized_ = true;
  // Levels record their witness at batch close; the earliest close wins,
  // with ties going to the coarser level.
  const Witness* first = nullptr;
  std::uint64_t first_time = 0;
  for (const auto& level : levels_) {
    if (!level.witness()) continue;
    const Witness& w = *level.witness();
    const std::uint64_t batch = (w.i - 1) / level.params().batch_size + 1;
    const std::uint64_t when = batch * level.params().t_j;
    if (first == nullptr || when < first_time) {
      first = &w;
      first_time = when;
    }
  }
  if (first == nullptr) return Verdict{};
  return Verdict{Decision::kReject, *first};
}

AmplifiedResult amplified_test(const TesterConfig& config, const Model& model, SampleSource& source) {
  config.validate();
  AmplifiedResult result;
  result.rounds = amplification_rounds(config.delta);
  std::optional<Witness> witness;
  for (std::uint64_t round = 0; round < result.rounds; ++round) {
    StreamingTester tester(config, model);
    while (!tester.all_finished()) {
      auto x = source.next();
      if (!x) throw InsufficientSamples(result.rounds * tester.samples_needed(), result.samples_consumed);
      tester.ingest(*x);
      ++result.samples_consumed;
    }
    Verdict v = tester.finalize();
    result.peak_live_words = std::max(result.peak_live_words, tester.peak_live_words());
    if (v.rejected()) {
      ++result.reject_votes;
      if (!witness) witness = v.witness;
    }
  }
  if (2 * result.reject_votes > result.rounds) {
    result.verdict = Verdict{Decision::kReject, witness};
  }
  return result;
}

}  // namespace streamks
