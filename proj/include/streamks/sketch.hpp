#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "streamks/reference.hpp"
#include "streamks/stream.hpp"
#include "streamks/value.hpp"

namespace streamks {

enum class Mode { kTheory, kPractical };

/// Constant c that satisfies every inequality in the correctness proofs.
inline constexpr double kTheoryC = 2.4e5;
/// Constant c used for desk-scale Monte-Carlo experiments.
inline constexpr double kPracticalC = 4.0;

struct TesterConfig {
  double eps = 0.1;
  double delta = 0.1;
  /// Chernoff constant; unset means the default for `mode`.
  std::optional<double> c;
  Mode mode = Mode::kPractical;
  /// Stop a level at its first rejecting batch. Off by default so that the
  /// number of samples drawn per round is input independent.
  bool early_exit = false;

  double chernoff_c() const { return c.value_or(mode == Mode::kTheory ? kTheoryC : kPracticalC); }

  /// Throws DomainError unless eps in (0, 1/2], delta in (0, 1), c > 0.
  void validate() const;
};

/// Number of levels, ceil(lg 1/eps) + 2.
int level_count(double eps);
/// lg(1/eps) + 3, the recurring logarithmic factor.
double log_factor(double eps);
/// ceil(log_factor(eps)^3): buckets whose counters are live at once.
std::uint64_t batch_size(double eps);
/// Majority-vote rounds reaching failure probability delta from a 1/10 base.
std::uint64_t amplification_rounds(double delta);

struct LevelParams {
  int j = 1;
  double delta_j = 0.0;  ///< rejection half-width around 2^-j
  std::uint64_t t_j = 1;  ///< samples per batch
  std::uint64_t batch_size = 1;
  std::uint64_t bucket_count = 2;

  std::uint64_t batch_count() const { return (bucket_count + batch_size - 1) / batch_size; }
  std::uint64_t samples() const { return batch_count() * t_j; }
  double bucket_probability() const;
};

/// Throws DomainError if j is outside [1, level_count(eps)].
LevelParams level_params(const TesterConfig& config, int j);

struct SampleRequirement {
  std::vector<std::uint64_t> per_level;  ///< n_j, index 0 is level 1
  std::uint64_t per_round = 0;           ///< max_j n_j
  std::uint64_t rounds = 1;
  std::uint64_t total = 0;               ///< rounds * per_round
};

SampleRequirement required_samples(const TesterConfig& config);

/// Bucket i in [1, 2^j] with x in (q_{(i-1)/2^j}, q_{i/2^j}].
std::uint64_t bucket_of(const Model& model, int j, const Value& x);

struct Witness {
  std::uint64_t i = 0;
  int j = 0;
  double observed_frequency = 0.0;
  double threshold = 0.0;

  friend bool operator==(const Witness&, const Witness&) = default;
};

enum class Decision { kAccept, kReject };

struct Verdict {
  Decision decision = Decision::kAccept;
  std::optional<Witness> witness;  ///< present iff decision == kReject

  bool rejected() const { return decision == Decision::kReject; }
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

/// Streaming state of the subroutine for a single level.
///
/// Only one batch of buckets is live at a time: batch_size counters and the
/// batch_size + 1 quantile boundaries delimiting them. The buffers have fixed
/// size for the lifetime of the subroutine and are released when it
/// finishes; the final batch may cover fewer buckets.
class LevelSubroutine {
 public:
  LevelSubroutine(const LevelParams& params, const Model& model, bool early_exit = false);

  /// Consumes one sample. Throws StateError once finished.
  void step(const Model& model, const Value& x);

  const LevelParams& params() const { return params_; }
  bool finished() const { return finished_; }
  const std::optional<Witness>& witness() const { return witness_; }

  std::uint64_t batch_start() const { return batch_start_; }
  /// Buckets covered by the current batch.
  std::uint64_t active_buckets() const { return active_; }
  std::uint64_t seen_in_batch() const { return seen_; }
  std::uint64_t batches_done() const { return batches_done_; }
  const std::vector<std::uint64_t>& counters() const { return counters_; }
  const std::vector<Value>& boundaries() const { return boundaries_; }

  /// Called at every batch close with the first bucket index of the batch
  /// and its counters (one per covered bucket), before they are reset.
  using BatchObserver = std::function<void(std::uint64_t batch_start, std::span<const std::uint64_t> counts)>;
  void set_batch_observer(BatchObserver observer) { observer_ = std::move(observer); }

  /// Counters plus cached boundaries currently held.
  std::uint64_t live_words() const { return counters_.size() + boundaries_.size(); }

 private:
  void load_batch(const Model& model);
  void close_batch(const Model& model);
  void release();

  LevelParams params_;
  bool early_exit_;
  std::uint64_t batch_start_ = 1;
  std::uint64_t active_ = 0;
  std::uint64_t seen_ = 0;
  std::uint64_t batches_done_ = 0;
  bool finished_ = false;
  std::optional<Witness> witness_;
  std::vector<std::uint64_t> counters_;
  std::vector<Value> boundaries_;
  BatchObserver observer_;
};

/// Fixed tester-wide bookkeeping words: sample count, round index, reject
/// votes, finished-level count, and the witness (i, j, frequency, threshold).
inline constexpr std::uint64_t kBookkeepingWords = 8;

/// One execution of the tester: every level subroutine fed from one stream.
class StreamingTester {
 public:
  StreamingTester(const TesterConfig& config, const Model& model);

  /// Routes x to every unfinished level. Throws StateError once finalized.
  void ingest(const Value& x);
  bool all_finished() const { return unfinished_ == 0; }

  /// Throws InsufficientSamples if some level has not seen its quota.
  Verdict finalize();

  std::uint64_t samples_seen() const { return seen_; }
  std::uint64_t samples_needed() const { return needed_; }
  std::uint64_t live_words() const;
  std::uint64_t peak_live_words() const { return peak_words_; }
  const std::vector<LevelSubroutine>& levels() const { return levels_; }

 private:
  Model model_;
  std::vector<LevelSubroutine> levels_;
  std::uint64_t seen_ = 0;
  std::uint64_t needed_ = 0;
  std::size_t unfinished_ = 0;
  std::uint64_t peak_words_ = 0;
  bool finalized_ = false;
};

struct AmplifiedResult {
  Verdict verdict;
  std::uint64_t rounds = 1;
  std::uint64_t reject_votes = 0;
  std::uint64_t samples_consumed = 0;
  std::uint64_t peak_live_words = 0;
};

/// Runs amplification_rounds(delta) sequential executions on fresh samples
/// and returns the majority decision. Throws InsufficientSamples if the
/// source dries up.
AmplifiedResult amplified_test(const TesterConfig& config, const Model& model, SampleSource& source);

}  // namespace streamks
