#pragma once

#include <compare>
#include <limits>
#include <ostream>

namespace streamks {

/// A point on the (possibly lifted) sample line.
///
/// Continuous models use `residual == 0` throughout. Samples from atomic
/// distributions are paired with a residual in [0, 1) and compared
/// lexicographically, which removes atoms without changing any Kolmogorov
/// distance. The infinite bases act as the -inf / +inf quantile sentinels and
/// order below / above every finite sample.
struct Value {
  double base = 0.0;
  double residual = 0.0;

  constexpr Value() = default;
  constexpr Value(double b) : base(b) {}  // NOLINT(google-explicit-constructor)
  constexpr Value(double b, double r) : base(b), residual(r) {}

  static constexpr Value neg_inf() { return Value(-std::numeric_limits<double>::infinity()); }
  static constexpr Value pos_inf() { return Value(std::numeric_limits<double>::infinity()); }

  constexpr bool is_neg_inf() const { return base == -std::numeric_limits<double>::infinity(); }
  constexpr bool is_pos_inf() const { return base == std::numeric_limits<double>::infinity(); }

  friend constexpr bool operator==(const Value&, const Value&) = default;
  friend constexpr std::partial_ordering operator<=>(const Value& a, const Value& b) {
    if (auto c = a.base <=> b.base; c != 0) return c;
    if (a.is_neg_inf() || a.is_pos_inf()) return std::partial_ordering::equivalent;
    return a.residual <=> b.residual;
  }
};

inline std::ostream& operator<<(std::ostream& os, const Value& v) {
  os << v.base;
  if (v.residual != 0.0) os << '+' << v.residual;
  return os;
}

}  // namespace streamks
