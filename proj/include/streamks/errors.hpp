#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace streamks {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operation called on an object in the wrong lifecycle state.
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Model lacks the finite breakpoint description an exact computation needs.
class UnsupportedModel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("ParseError at line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The stream ended before every level subroutine saw its quota.
class InsufficientSamples : public std::runtime_error {
 public:
  InsufficientSamples(std::uint64_t needed, std::uint64_t got)
      : std::runtime_error("InsufficientSamples: needed " + std::to_string(needed) +
                           ", got " + std::to_string(got)),
        needed_(needed),
        got_(got) {}

  std::uint64_t needed() const noexcept { return needed_; }
  std::uint64_t got() const noexcept { return got_; }

 private:
  std::uint64_t needed_;
  std::uint64_t got_;
};

}  // namespace streamks
