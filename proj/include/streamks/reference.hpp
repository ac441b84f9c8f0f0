#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "streamks/rng.hpp"
#include "streamks/value.hpp"

namespace streamks {

enum class ModelKind {
  kUniformUnit,
  kPiecewiseLinearCdf,
  kDiscretePmfLifted,
  kWedgePerturbed,
};

std::string_view to_string(ModelKind kind);

/// One corner of a piecewise-linear CDF.
struct Knot {
  double x;
  double cdf;
};

/// One atom of a discrete distribution.
struct Atom {
  double value;
  double weight;
};

/// A known (or synthetic unknown) distribution over the ordered sample line.
///
/// Two representations back every kind: continuous models are a
/// piecewise-linear CDF over finitely many knots, atomic models a finite pmf
/// evaluated through the continuity lift. Models are immutable and cheap to
/// share across threads.
class Model {
 public:
  static Model uniform_unit();
  /// Knots must have strictly increasing x, nondecreasing cdf, start at 0 and
  /// end at 1. Throws DomainError otherwise.
  static Model piecewise_linear(std::vector<Knot> knots);
  /// Atoms with positive weights summing to 1 (renormalized if within 1e-9).
  static Model discrete_lifted(std::vector<Atom> atoms);

  ModelKind kind() const { return kind_; }
  bool is_continuous() const { return !knots_.empty(); }
  bool is_discrete() const { return !atoms_.empty(); }

  /// P[D <= v]. Sentinels map to 0 and 1.
  double cdf(const Value& v) const;
  /// P[base(D) < b], the left limit at an unlifted base point.
  double cdf_left(double b) const;
  /// P[base(D) <= b].
  double cdf_right(double b) const;

  /// q_x = sup{y | P[D <= y] <= x}; -inf at 0 and +inf at 1.
  Value quantile(double x) const;

  /// Inverse-transform draw: quantile of one uniform (0,1) variate.
  Value sample(Rng& rng) const;

  /// Pairs an observed base value with a residual drawn from `rng`.
  /// Continuous models return the value unchanged.
  Value lift(double base, Rng& rng) const;

  const std::vector<Knot>& knots() const { return knots_; }
  /// Atoms sorted by value, each with its own probability mass.
  const std::vector<Atom>& atoms() const { return atoms_; }

  /// Wedge parameters; meaningful only for kWedgePerturbed.
  const Model* wedge_base() const { return wedge_base_.get(); }
  double wedge_eps() const { return wedge_eps_; }
  double wedge_center() const { return wedge_center_; }

  friend Model wedge_perturb(const Model& base, double eps, double center);

 private:
  Model() = default;

  ModelKind kind_ = ModelKind::kUniformUnit;
  std::vector<Knot> knots_;
  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;  // cumulative_[k] = sum of weights of atoms 0..k

  std::shared_ptr<const Model> wedge_base_;
  double wedge_eps_ = 0.0;
  double wedge_center_ = 0.0;
};

/// Perturbs a continuous model so its CDF becomes H(F(x)), where H is the
/// two-piece linear map through (0,0), (center, center-eps), (1,1). The
/// Kolmogorov distance to `base` is exactly eps, attained where F = center.
/// Requires 0 < eps < min(center, 1 - center).
Model wedge_perturb(const Model& base, double eps, double center);

/// Weighted mixture of continuous models, as a piecewise-linear model.
Model mixture(const std::vector<std::pair<double, Model>>& components);

/// sup |CDF_a - CDF_b| evaluated at every breakpoint of either model, with
/// left limits at atoms and both residual endpoints of the lift.
double exact_kdistance(const Model& a, const Model& b);

}  // namespace streamks
