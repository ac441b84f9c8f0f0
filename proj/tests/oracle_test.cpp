#include "streamks/oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "streamks/errors.hpp"
#include "streamks/rng.hpp"
#include "streamks/sketch.hpp"
#include "test_oracles.hpp"

namespace streamks {
namespace {

const Model kUniform = Model::uniform_unit();

std::vector<Value> values(std::initializer_list<double> xs) { return {xs.begin(), xs.end()}; }

TEST(KsStatistic, Examples) {
  EXPECT_DOUBLE_EQ(ks_statistic(values({0.1, 0.5}), kUniform), 0.5);
  // The i = 1 term F(X_1) - 0/n = 0.25 dominates 1/3 - 1/4.
  EXPECT_DOUBLE_EQ(ks_statistic(values({0.25, 0.5, 0.75}), kUniform), 0.25);
  EXPECT_DOUBLE_EQ(ks_statistic(values({0.5}), kUniform), 0.5);
  EXPECT_THROW(ks_statistic({}, kUniform), DomainError);
}

TEST(KsStatistic, QuantileMidpointsShrink) {
  for (int n : {10, 100, 1000}) {
    std::vector<Value> xs;
    for (int i = 1; i <= n; ++i) xs.push_back(kUniform.quantile((i - 0.5) / n));
    EXPECT_NEAR(ks_statistic(xs, kUniform), 0.5 / n, 1e-12);
  }
}

TEST(KsStatistic, AgreesWithDefinition) {
  const Model wedge = wedge_perturb(kUniform, 0.1, 0.37);
  Rng rng = make_rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const Model& sampled = trial % 2 ? wedge : kUniform;
    const std::size_t n = 1 + rng() % 300;
    std::vector<double> raw;
    for (std::size_t k = 0; k < n; ++k) {
      // Round some draws so ties occur.
      double x = sampled.sample(rng).base;
      if (k % 3 == 0) x = std::round(x * 20.0) / 20.0;
      raw.push_back(x);
    }
    std::vector<Value> sorted(raw.begin(), raw.end());
    std::sort(sorted.begin(), sorted.end());
    const double oracle = testing::ks_by_definition(raw, [](double x) { return std::clamp(x, 0.0, 1.0); });
    ASSERT_NEAR(ks_statistic(sorted, kUniform), oracle, 1e-12);
  }
}

TEST(Dkw, Threshold) {
  EXPECT_NEAR(dkw_threshold(1000, 0.1), 0.038702275602049495, 1e-15);
  EXPECT_NEAR(dkw_threshold(2000, 0.1), 0.038702275602049495 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(dkw_threshold(1, 2.0 / std::exp(2.0)), 1.0, 1e-15);
  EXPECT_THROW(dkw_threshold(0, 0.1), DomainError);
  EXPECT_THROW(dkw_threshold(10, 0.0), DomainError);
  EXPECT_THROW(dkw_threshold(10, 1.0), DomainError);
}

TEST(Dkw, TestDecision) {
  const KsTestResult r = ks_test(values({0.5, 0.1}), kUniform, 0.1);
  EXPECT_DOUBLE_EQ(r.statistic, 0.5);
  EXPECT_FALSE(r.reject);  // threshold for n = 2 is ~1.22
  std::vector<Value> clumped(1000, Value(0.01));
  EXPECT_TRUE(ks_test(clumped, kUniform, 0.1).reject);
}

TEST(Dyadic, Examples) {
  const DyadicDecomposition d = dyadic_decompose(0.8125, 4);
  EXPECT_EQ(d.parts, (std::vector<BucketId>{{1, 1}, {3, 2}, {13, 4}}));
  EXPECT_EQ(d.x_tilde(), 0.8125);
  for (int levels : {1, 3, 10}) EXPECT_EQ(dyadic_decompose(0.5, levels).parts, (std::vector<BucketId>{{1, 1}}));
  EXPECT_TRUE(dyadic_decompose(0.0, 6).parts.empty());
  EXPECT_EQ(dyadic_decompose(1.0, 3).numerator, 7u);
  EXPECT_THROW(dyadic_decompose(1.5, 3), DomainError);
}

TEST(Dyadic, Invariants) {
  Rng rng = make_rng(41);
  for (int trial = 0; trial < 10000; ++trial) {
    const int levels = 4 + static_cast<int>(rng() % 13);
    const double x = trial % 97 == 0 ? static_cast<double>(rng() % 2) : uniform_open01(rng);
    const DyadicDecomposition d = dyadic_decompose(x, levels);
    ASSERT_LE(d.parts.size(), static_cast<std::size_t>(levels));
    std::uint64_t covered = 0;  // in units of 2^-levels
    int last_level = 0;
    for (const BucketId& b : d.parts) {
      ASSERT_GT(b.j, last_level);  // one part per level, coarse to fine
      last_level = b.j;
      const std::uint64_t unit = std::uint64_t{1} << (levels - b.j);
      ASSERT_EQ((b.i - 1) * unit, covered);  // contiguous with the previous part
      covered = b.i * unit;
    }
    ASSERT_EQ(covered, d.numerator);
    ASSERT_LE(x - d.x_tilde(), std::ldexp(1.0, -levels));
    ASSERT_GE(x - d.x_tilde(), 0.0);
  }
  for (double eps : {0.1, 0.05, 0.02, 0.001}) {
    EXPECT_LE(std::ldexp(1.0, -level_count(eps)), eps / 4.0);
  }
}

TEST(Lemma1Witness, Examples) {
  const WitnessReport same = lemma1_witness(kUniform, kUniform, 0.1);
  EXPECT_EQ(same.gap, 0.0);
  EXPECT_FALSE(same.satisfied);

  const WitnessReport wedge = lemma1_witness(wedge_perturb(kUniform, 0.1, 0.5), kUniform, 0.1);
  EXPECT_EQ(wedge.best_bucket, (BucketId{1, 1}));
  EXPECT_NEAR(wedge.gap, 0.1, 1e-12);
  EXPECT_DOUBLE_EQ(wedge.threshold, 0.01);
  EXPECT_TRUE(wedge.satisfied);

  const WitnessReport off = lemma1_witness(wedge_perturb(kUniform, 0.05, 0.37), kUniform, 0.05);
  EXPECT_TRUE(off.satisfied);
  EXPECT_GE(off.gap, off.threshold);
}

TEST(Lemma1Witness, GapMatchesDirectBucketMass) {
  const Model d = wedge_perturb(kUniform, 0.05, 0.37);
  const WitnessReport w = lemma1_witness(d, kUniform, 0.05);
  const double width = std::ldexp(1.0, -w.best_bucket.j);
  const double lo = static_cast<double>(w.best_bucket.i - 1) * width;
  const double mass = d.cdf(lo + width) - d.cdf(lo);
  EXPECT_NEAR(w.gap, std::abs(mass - width), 1e-15);
  // No bucket of any level has a larger gap among those that qualify.
  TesterConfig cfg;
  cfg.eps = 0.05;
  for (int j = 1; j <= level_count(0.05); ++j) {
    const double th = 2.0 * level_params(cfg, j).delta_j;
    for (std::uint64_t i = 1; i <= (std::uint64_t{1} << j); ++i) {
      const double a = std::ldexp(static_cast<double>(i - 1), -j);
      const double gap = std::abs(d.cdf(a + std::ldexp(1.0, -j)) - d.cdf(a) - std::ldexp(1.0, -j));
      if (gap >= th) ASSERT_LE(gap, w.gap + 1e-15);
    }
  }
}

TEST(BinomialTail, Examples) {
  EXPECT_NEAR(binomial_tail_exact(2, 0.5, TailKind::kBelow, 1), 0.25, 1e-15);
  EXPECT_NEAR(binomial_tail_exact(10, 0.5, TailKind::kAbove, 7), 0.0546875, 1e-15);
  const double far = binomial_tail_exact(100, 0.1, TailKind::kAbsDeviation, 30);
  EXPECT_LT(far, 1e-8);
  EXPECT_NEAR(far, 4.753173592422117e-16, 1e-25);
  EXPECT_EQ(binomial_tail_exact(10, 0.0, TailKind::kAbove, 0), 0.0);
  EXPECT_EQ(binomial_tail_exact(10, 1.0, TailKind::kAbove, 9), 1.0);
  EXPECT_THROW(binomial_tail_exact(200000, 0.5, TailKind::kAbove, 1), DomainError);
  EXPECT_THROW(binomial_tail_exact(10, 1.5, TailKind::kAbove, 1), DomainError);
}

TEST(BinomialTail, AgreesWithRecurrence) {
  Rng rng = make_rng(51);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint64_t n = 1 + rng() % 500;
    const double p = 0.01 + 0.98 * uniform_open01(rng);
    const auto pmf = testing::binomial_pmf(n, p);
    const double k = static_cast<double>(rng() % (n + 1)) + 0.5;
    double above = 0.0;
    for (std::uint64_t m = 0; m <= n; ++m) {
      if (static_cast<double>(m) > k) above += pmf[m];
    }
    ASSERT_NEAR(binomial_tail_exact(n, p, TailKind::kAbove, k), above, 1e-12 + 1e-9 * above);
  }
}

TEST(Chernoff, Examples) {
  const ChernoffBounds b = chernoff_bounds(100, 0.5, 0.1);
  EXPECT_NEAR(b.upper, 0.402890321529133, 1e-14);
  EXPECT_NEAR(b.lower, std::exp(-1.0), 1e-15);
  EXPECT_NEAR(b.two_sided, 2.0 * std::exp(-100.0 / 150.0), 1e-15);
  const ChernoffBounds tiny = chernoff_bounds(100, 0.5, 1e-9);
  EXPECT_NEAR(tiny.upper, 1.0, 1e-12);
  EXPECT_NEAR(tiny.lower, 1.0, 1e-12);
  EXPECT_NEAR(tiny.two_sided, 2.0, 1e-12);
  EXPECT_THROW(chernoff_bounds(100, 0.1, 0.2), DomainError);
  EXPECT_THROW(chernoff_bounds(100, 0.0, 0.1), DomainError);
  EXPECT_THROW(chernoff_bounds(0, 0.5, 0.1), DomainError);
}

TEST(Chernoff, DominatesExactTailsOnGrid) {
  int points = 0;
  for (std::uint64_t n : {10u, 57u, 200u, 999u, 2000u}) {
    for (double p : {0.03, 0.1, 0.25, 0.5, 0.77, 0.9}) {
      for (double frac : {0.05, 0.2, 0.45, 0.8, 0.97}) {
        const double d = frac * p;
        const ChernoffBounds b = chernoff_bounds(n, p, d);
        const double nd = static_cast<double>(n);
        EXPECT_GE(b.upper, binomial_tail_exact(n, p, TailKind::kAbove, nd * (p + d)));
        EXPECT_GE(b.lower, binomial_tail_exact(n, p, TailKind::kBelow, nd * (p - d)));
        EXPECT_GE(b.two_sided, binomial_tail_exact(n, p, TailKind::kAbsDeviation, nd * d));
        ++points;
      }
    }
  }
  EXPECT_EQ(points, 150);
}

}  // namespace
}  // namespace streamks
