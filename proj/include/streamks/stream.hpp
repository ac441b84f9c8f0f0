#pragma once

#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "streamks/reference.hpp"
#include "streamks/rng.hpp"
#include "streamks/value.hpp"

namespace streamks {

/// Pull-based one-pass sample stream. There is no rewind: every sample is
/// handed out once and then forgotten.
class SampleSource {
 public:
  virtual ~SampleSource() = default;
  /// Next sample, or nullopt when the stream is exhausted.
  virtual std::optional<Value> next() = 0;
};

/// Endless inverse-transform draws from a model.
class ModelSampler final : public SampleSource {
 public:
  ModelSampler(Model model, Rng rng) : model_(std::move(model)), rng_(std::move(rng)) {}
  std::optional<Value> next() override { return model_.sample(rng_); }

 private:
  Model model_;
  Rng rng_;
};

class SpanSource final : public SampleSource {
 public:
  explicit SpanSource(std::span<const Value> values) : values_(values) {}
  std::optional<Value> next() override {
    if (pos_ == values_.size()) return std::nullopt;
    return values_[pos_++];
  }

 private:
  std::span<const Value> values_;
  std::size_t pos_ = 0;
};

/// Parses a text stream with one decimal literal per line. Blank lines and
/// `#` comments are skipped. Values are lifted against `model` when it is
/// atomic, with residuals drawn from `rng`.
class LineSource final : public SampleSource {
 public:
  LineSource(std::istream& in, Model model, Rng rng);
  /// Throws ParseError with the 1-based line number on malformed input.
  std::optional<Value> next() override;

  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  Model model_;
  Rng rng_;
  std::size_t line_ = 0;
};

/// Parses one decimal literal (surrounding whitespace allowed). Returns
/// nullopt for a blank or comment-only line, throws ParseError otherwise.
std::optional<double> parse_sample_line(const std::string& text, std::size_t line);

/// Wraps a source and records every fetch, for auditing the one-pass contract.
class CountingSource final : public SampleSource {
 public:
  explicit CountingSource(SampleSource& inner) : inner_(inner) {}
  std::optional<Value> next() override {
    auto v = inner_.next();
    if (v) ++fetched_;
    ++calls_;
    return v;
  }
  std::uint64_t fetched() const { return fetched_; }
  std::uint64_t calls() const { return calls_; }

 private:
  SampleSource& inner_;
  std::uint64_t fetched_ = 0;
  std::uint64_t calls_ = 0;
};

}  // namespace streamks
