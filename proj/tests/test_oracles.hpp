#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

namespace streamks::testing {

/// sup_x |F_n(x) - F(x)| for a continuous CDF, evaluated at every sample point
/// and at its left limit.
template <typename Cdf>
double ks_by_definition(std::vector<double> xs, Cdf cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double best = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double below = static_cast<double>(std::lower_bound(xs.begin(), xs.end(), xs[k]) - xs.begin());
    const double at = static_cast<double>(std::upper_bound(xs.begin(), xs.end(), xs[k]) - xs.begin());
    const double f = cdf(xs[k]);
    best = std::max({best, std::abs(below / n - f), std::abs(at / n - f)});
  }
  return best;
}

/// Kolmogorov distance of two unlifted step CDFs given as pmfs.
inline double step_cdf_distance(const std::map<double, double>& a, const std::map<double, double>& b) {
  std::map<double, std::pair<double, double>> joint;
  for (auto [x, w] : a) joint[x].first += w;
  for (auto [x, w] : b) joint[x].second += w;
  double fa = 0.0;
  double fb = 0.0;
  double best = 0.0;
  for (auto [x, w] : joint) {
    fa += w.first;
    fb += w.second;
    best = std::max(best, std::abs(fa - fb));
  }
  return best;
}

/// Binomial(n, p) pmf by the multiplicative recurrence from k = 0.
inline std::vector<double> binomial_pmf(std::uint64_t n, double p) {
  std::vector<double> pmf(n + 1);
  // Work in logs to survive large n.
  double log_term = static_cast<double>(n) * std::log1p(-p);
  const double ratio = std::log(p) - std::log1p(-p);
  for (std::uint64_t k = 0; k <= n; ++k) {
    pmf[k] = std::exp(log_term);
    log_term += std::log(static_cast<double>(n - k)) - std::log(static_cast<double>(k + 1)) + ratio;
  }
  return pmf;
}

}  // namespace streamks::testing
