#include "streamks/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "streamks/errors.hpp"
#include "streamks/sketch.hpp"

namespace streamks {

double ks_statistic(std::span<const Value> sorted_sample, const Model& model) {
  if (sorted_sample.empty()) throw DomainError("KS statistic of an empty sample");
  const double n = static_cast<double>(sorted_sample.size());
  double d = 0.0;
  for (std::size_t k = 0; k < sorted_sample.size(); ++k) {
    const double f = model.cdf(sorted_sample[k]);
    const double i = static_cast<double>(k + 1);
    d = std::max({d, i / n - f, f - (i - 1.0) / n});
  }
  return std::clamp(d, 0.0, 1.0);
}

double dkw_threshold(std::uint64_t n, double delta) {
  if (n == 0) throw DomainError("DKW threshold needs n >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

KsTestResult ks_test(std::vector<Value> sample, const Model& model, double delta) {
  std::sort(sample.begin(), sample.end());
  KsTestResult r;
  r.statistic = ks_statistic(sample, model);
  r.threshold = dkw_threshold(sample.size(), delta);
  r.reject = r.statistic > r.threshold;
  return r;
}

double DyadicDecomposition::x_tilde() const { return std::ldexp(static_cast<double>(numerator), -levels); }

DyadicDecomposition dyadic_decompose(double x, int levels) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("x must lie in [0, 1]");
  if (levels < 1 || levels > 62) throw DomainError("level count must lie in [1, 62]");
  const std::uint64_t full = std::uint64_t{1} << levels;
  DyadicDecomposition d;
  d.levels = levels;
  d.numerator = std::min(static_cast<std::uint64_t>(std::floor(std::ldexp(x, levels))), full - 1);
  for (int k = 1; k <= levels; ++k) {
    if ((d.numerator >> (levels - k)) & 1U) {
      const std::uint64_t prefix = d.numerator >> (levels - k + 1);
      d.parts.push_back({2 * prefix + 1, k});
    }
  }
  return d;
}

WitnessReport lemma1_witness(const Model& d_unknown, const Model& d_ref, double eps) {
  for (const Model* m : {&d_unknown, &d_ref}) {
    if (!m->is_continuous() && !m->is_discrete())
      throw UnsupportedModel("lemma1_witness needs exact CDF evaluation");
  }
  TesterConfig config;
  config.eps = eps;
  const int levels = level_count(eps);

  WitnessReport best_any;
  WitnessReport best_ok;
  bool have_any = false;
  for (int j = 1; j <= levels; ++j) {
    const double threshold = 2.0 * level_params(config, j).delta_j;
    const std::uint64_t buckets = std::uint64_t{1} << j;
    Value lo = d_ref.quantile(0.0);
    double cdf_lo = d_unknown.cdf(lo);
    for (std::uint64_t i = 1; i <= buckets; ++i) {
      const Value hi = d_ref.quantile(std::ldexp(static_cast<double>(i), -j));
      const double cdf_hi = d_unknown.cdf(hi);
      const double gap = std::abs((cdf_hi - cdf_lo) - std::ldexp(1.0, -j));
      WitnessReport r{{i, j}, gap, threshold, gap >= threshold};
      if (!have_any || gap > best_any.gap) best_any = r;
      if (r.satisfied && (!best_ok.satisfied || gap > best_ok.gap)) best_ok = r;
      have_any = true;
      lo = hi;
      cdf_lo = cdf_hi;
    }
  }
  return best_ok.satisfied ? best_ok : best_any;
}

namespace {

double log_binomial_pmf(std::uint64_t n, std::uint64_t k, double log_p, double log_q) {
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  double r = std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0);
  if (k > 0) r += kd * log_p;
  if (k < n) r += (nd - kd) * log_q;
  return r;
}

}  // namespace

double binomial_tail_exact(std::uint64_t n, double p, TailKind kind, double threshold) {
  if (n > 100000) throw DomainError("exact binomial tail limited to n <= 1e5");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0, 1]");
  if (std::isnan(threshold)) throw DomainError("threshold is NaN");

  const double mean = static_cast<double>(n) * p;
  auto included = [&](std::uint64_t k) {
    const double kd = static_cast<double>(k);
    switch (kind) {
      case TailKind::kAbove:
        return kd > threshold;
      case TailKind::kBelow:
        return kd < threshold;
      case TailKind::kAbsDeviation:
        return std::abs(kd - mean) > threshold;
    }
    return false;
  };

  if (p == 0.0 || p == 1.0) return included(p == 0.0 ? 0 : n) ? 1.0 : 0.0;

  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  std::vector<double> terms;
  for (std::uint64_t k = 0; k <= n; ++k) {
    if (included(k)) terms.push_back(log_binomial_pmf(n, k, log_p, log_q));
  }
  if (terms.empty()) return 0.0;
  const double peak = *std::max_element(terms.begin(), terms.end());
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - peak);
  return std::min(1.0, std::exp(peak + std::log(sum)));
}

double chernoff_upper(std::uint64_t n, double p, double d) {
  return std::exp(-d * d * static_cast<double>(n) / (2.0 * p + d));
}

double chernoff_lower(std::uint64_t n, double p, double d) {
  return std::exp(-d * d * static_cast<double>(n) / (2.0 * p));
}

double chernoff_two_sided(std::uint64_t n, double p, double d) {
  const double nd = static_cast<double>(n);
  const double dev = nd * d;
  return 2.0 * std::exp(-dev * dev / (3.0 * nd * p));
}

ChernoffBounds chernoff_bounds(std::uint64_t n, double p, double d) {
  if (n == 0) throw DomainError("n must be positive");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0, 1)");
  if (!(d > 0.0)) throw DomainError("deviation must be positive");
  if (!(d < p)) throw DomainError("lower-tail bound requires deviation < p");
  return {chernoff_upper(n, p, d), chernoff_lower(n, p, d), chernoff_two_sided(n, p, d)};
}

}  // namespace streamks
