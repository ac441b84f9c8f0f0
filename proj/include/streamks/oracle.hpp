#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "streamks/reference.hpp"
#include "streamks/value.hpp"

namespace streamks {

/// Classical one-sample KS statistic
///   max_i max(i/n - F(X_i), F(X_i) - (i-1)/n)
/// for an ascending sample. Throws DomainError on an empty sample.
double ks_statistic(std::span<const Value> sorted_sample, const Model& model);

/// DKW rejection threshold sqrt(ln(2/delta) / (2n)).
double dkw_threshold(std::uint64_t n, double delta);

struct KsTestResult {
  double statistic = 0.0;
  double threshold = 0.0;
  bool reject = false;
};

/// Sorts a copy of the sample and rejects iff statistic > DKW threshold.
KsTestResult ks_test(std::vector<Value> sample, const Model& model, double delta);

/// Bucket id (i, j): the i-th of 2^j equal-probability buckets at level j.
struct BucketId {
  std::uint64_t i = 0;
  int j = 0;
  friend bool operator==(const BucketId&, const BucketId&) = default;
};

/// The dyadic prefix x~ = floor(x 2^J) / 2^J written as a disjoint union of
/// buckets, at most one per level.
struct DyadicDecomposition {
  std::uint64_t numerator = 0;  ///< x~ = numerator / 2^levels
  int levels = 0;
  std::vector<BucketId> parts;

  double x_tilde() const;
};

/// Scans the J leading bits of x; bit k set contributes bucket
/// (2 * prefix_{k-1} + 1, k). x = 1 is truncated to 1 - 2^-J, matching its
/// binary expansion 0.111...
DyadicDecomposition dyadic_decompose(double x, int levels);

struct WitnessReport {
  BucketId best_bucket;
  double gap = 0.0;        ///< |D(B) - D*(B)|
  double threshold = 0.0;  ///< 2 Delta_j for the bucket's level
  bool satisfied = false;  ///< gap >= threshold
};

/// Exhaustive scan over every bucket of every level j in [1, J(eps)].
/// Reports the widest gap among buckets that clear their level threshold, or
/// the widest gap overall if none does.
WitnessReport lemma1_witness(const Model& d_unknown, const Model& d_ref, double eps);

enum class TailKind {
  kAbove,        ///< P[X > threshold]
  kBelow,        ///< P[X < threshold]
  kAbsDeviation  ///< P[|X - np| > threshold]
};

/// Exact Binomial(n, p) tail by summation of the pmf in log space.
/// Throws DomainError for n > 1e5 or p outside [0, 1].
double binomial_tail_exact(std::uint64_t n, double p, TailKind kind, double threshold);

struct ChernoffBounds {
  double upper = 1.0;      ///< bound on P[X/n > p + d]
  double lower = 1.0;      ///< bound on P[X/n < p - d]
  double two_sided = 1.0;  ///< bound on P[|X - np| > n d]
};

double chernoff_upper(std::uint64_t n, double p, double d);
double chernoff_lower(std::uint64_t n, double p, double d);
double chernoff_two_sided(std::uint64_t n, double p, double d);

/// All three binomial tail bounds for frequency deviation d. Requires
/// 0 < p < 1, d > 0 and d < p (the lower-tail precondition).
ChernoffBounds chernoff_bounds(std::uint64_t n, double p, double d);

}  // namespace streamks
