#include "streamks/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "streamks/errors.hpp"

namespace streamks {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kUniformUnit:
      return "uniform-unit";
    case ModelKind::kPiecewiseLinearCdf:
      return "piecewise-linear-cdf";
    case ModelKind::kDiscretePmfLifted:
      return "discrete-pmf-lifted";
    case ModelKind::kWedgePerturbed:
      return "wedge-perturbed";
  }
  return "unknown";
}

Model Model::uniform_unit() {
  Model m = piecewise_linear({{0.0, 0.0}, {1.0, 1.0}});
  m.kind_ = ModelKind::kUniformUnit;
  return m;
}

Model Model::piecewise_linear(std::vector<Knot> knots) {
  if (knots.size() < 2) throw DomainError("piecewise-linear CDF needs at least two knots");
  for (std::size_t k = 0; k < knots.size(); ++k) {
    const Knot& kn = knots[k];
    if (!std::isfinite(kn.x) || !(kn.cdf >= 0.0 && kn.cdf <= 1.0))
      throw DomainError("piecewise-linear CDF knot out of range");
    if (k > 0 && !(knots[k - 1].x < kn.x)) throw DomainError("knot x values must increase strictly");
    if (k > 0 && knots[k - 1].cdf > kn.cdf) throw DomainError("CDF values must be nondecreasing");
  }
  if (knots.front().cdf != 0.0 || knots.back().cdf != 1.0)
    throw DomainError("piecewise-linear CDF must run from 0 to 1");
  Model m;
  m.kind_ = ModelKind::kPiecewiseLinearCdf;
  m.knots_ = std::move(knots);
  return m;
}

Model Model::discrete_lifted(std::vector<Atom> atoms) {
  if (atoms.empty()) throw DomainError("discrete model needs at least one atom");
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
  double total = 0.0;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    if (!std::isfinite(atoms[k].value)) throw DomainError("atom value must be finite");
    if (!(atoms[k].weight > 0.0)) throw DomainError("atom weight must be positive");
    if (k > 0 && atoms[k - 1].value == atoms[k].value) throw DomainError("duplicate atom value");
    total += atoms[k].weight;
  }
  if (std::abs(total - 1.0) > 1e-9) throw DomainError("atom weights must sum to 1");
  Model m;
  m.kind_ = ModelKind::kDiscretePmfLifted;
  m.cumulative_.reserve(atoms.size());
  double running = 0.0;
  for (Atom& a : atoms) {
    a.weight /= total;
    running += a.weight;
    m.cumulative_.push_back(running);
  }
  m.cumulative_.back() = 1.0;
  m.atoms_ = std::move(atoms);
  return m;
}

namespace {

double pl_cdf(const std::vector<Knot>& knots, double x) {
  if (x <= knots.front().x) return 0.0;
  if (x >= knots.back().x) return 1.0;
  auto hi = std::upper_bound(knots.begin(), knots.end(), x,
                             [](double v, const Knot& k) { return v < k.x; });
  auto lo = hi - 1;
  if (x == lo->x) return lo->cdf;
  double frac = (x - lo->x) / (hi->x - lo->x);
  return lo->cdf + frac * (hi->cdf - lo->cdf);
}

double pl_quantile(const std::vector<Knot>& knots, double p) {
  // First knot whose CDF exceeds p; the sup lies on the segment ending there.
  auto hi = std::upper_bound(knots.begin(), knots.end(), p,
                             [](double v, const Knot& k) { return v < k.cdf; });
  if (hi == knots.begin()) return knots.front().x;
  if (hi == knots.end()) return knots.back().x;
  auto lo = hi - 1;
  double frac = (p - lo->cdf) / (hi->cdf - lo->cdf);
  double y = lo->x + frac * (hi->x - lo->x);
  return std::min(std::max(y, lo->x), hi->x);
}

}  // namespace

double Model::cdf(const Value& v) const {
  if (v.is_neg_inf()) return 0.0;
  if (v.is_pos_inf()) return 1.0;
  if (is_continuous()) return pl_cdf(knots_, v.base);
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), v.base,
                             [](const Atom& a, double b) { return a.value < b; });
  std::size_t k = static_cast<std::size_t>(it - atoms_.begin());
  double before = k == 0 ? 0.0 : cumulative_[k - 1];
  if (it != atoms_.end() && it->value == v.base) {
    return std::min(before + it->weight * v.residual, cumulative_[k]);
  }
  return before;
}

double Model::cdf_left(double b) const {
  if (is_continuous()) return pl_cdf(knots_, b);
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), b,
                             [](const Atom& a, double x) { return a.value < x; });
  std::size_t k = static_cast<std::size_t>(it - atoms_.begin());
  return k == 0 ? 0.0 : cumulative_[k - 1];
}

double Model::cdf_right(double b) const {
  if (is_continuous()) return pl_cdf(knots_, b);
  auto it = std::upper_bound(atoms_.begin(), atoms_.end(), b,
                             [](double x, const Atom& a) { return x < a.value; });
  std::size_t k = static_cast<std::size_t>(it - atoms_.begin());
  return k == 0 ? 0.0 : cumulative_[k - 1];
}

Value Model::quantile(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
  if (x == 0.0) return Value::neg_inf();
  if (x == 1.0) return Value::pos_inf();
  if (is_continuous()) return Value(pl_quantile(knots_, x));
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
  if (it == cumulative_.end()) --it;
  std::size_t k = static_cast<std::size_t>(it - cumulative_.begin());
  double before = k == 0 ? 0.0 : cumulative_[k - 1];
  double residual = (x - before) / atoms_[k].weight;
  residual = std::clamp(residual, 0.0, std::nextafter(1.0, 0.0));
  return Value(atoms_[k].value, residual);
}

Value Model::sample(Rng& rng) const { return quantile(uniform_open01(rng)); }

Value Model::lift(double base, Rng& rng) const {
  if (is_continuous()) return Value(base);
  return Value(base, uniform_open01(rng));
}

Model wedge_perturb(const Model& base, double eps, double center) {
  if (!base.is_continuous()) throw DomainError("wedge perturbation needs a continuous base");
  if (!(center > 0.0 && center < 1.0)) throw DomainError("wedge center must lie in (0, 1)");
  if (!(eps > 0.0 && eps < std::min(center, 1.0 - center)))
    throw DomainError("wedge eps must satisfy 0 < eps < min(center, 1 - center)");

  const double below = 1.0 - eps / center;
  const double above = 1.0 + eps / (1.0 - center);
  auto warp = [&](double f) {
    return f <= center ? f * below : (center - eps) + (f - center) * above;
  };

  const auto& src = base.knots();
  const double kink_x = pl_quantile(src, center);
  std::vector<Knot> knots;
  knots.reserve(src.size() + 1);
  bool inserted = false;
  for (const Knot& k : src) {
    if (!inserted && kink_x <= k.x) {
      if (kink_x < k.x) knots.push_back({kink_x, center - eps});
      inserted = true;
    }
    knots.push_back({k.x, k.x == kink_x ? center - eps : warp(k.cdf)});
  }
  knots.front().cdf = 0.0;
  knots.back().cdf = 1.0;
  for (std::size_t k = 1; k < knots.size(); ++k) knots[k].cdf = std::max(knots[k].cdf, knots[k - 1].cdf);

  Model m = Model::piecewise_linear(std::move(knots));
  m.kind_ = ModelKind::kWedgePerturbed;
  m.wedge_base_ = std::make_shared<const Model>(base);
  m.wedge_eps_ = eps;
  m.wedge_center_ = center;
  return m;
}

Model mixture(const std::vector<std::pair<double, Model>>& components) {
  if (components.empty()) throw DomainError("mixture needs at least one component");
  double total = 0.0;
  std::vector<double> xs;
  for (const auto& [w, m] : components) {
    if (!(w > 0.0)) throw DomainError("mixture weights must be positive");
    if (!m.is_continuous()) throw DomainError("mixture components must be continuous");
    total += w;
    for (const Knot& k : m.knots()) xs.push_back(k.x);
  }
  if (std::abs(total - 1.0) > 1e-9) throw DomainError("mixture weights must sum to 1");
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<Knot> knots;
  knots.reserve(xs.size());
  for (double x : xs) {
    double f = 0.0;
    for (const auto& [w, m] : components) f += w / total * m.cdf(Value(x));
    knots.push_back({x, f});
  }
  knots.front().cdf = 0.0;
  knots.back().cdf = 1.0;
  for (std::size_t k = 1; k < knots.size(); ++k) knots[k].cdf = std::max(knots[k].cdf, knots[k - 1].cdf);
  return Model::piecewise_linear(std::move(knots));
}

double exact_kdistance(const Model& a, const Model& b) {
  for (const Model* m : {&a, &b}) {
    if (!m->is_continuous() && !m->is_discrete())
      throw UnsupportedModel("model has no finite breakpoint description");
  }
  std::vector<double> points;
  for (const Model* m : {&a, &b}) {
    for (const Knot& k : m->knots()) points.push_back(k.x);
    for (const Atom& at : m->atoms()) points.push_back(at.value);
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  // Between consecutive points both CDFs are affine in the base (and in the
  // residual inside an atom), so the sup is attained at a point or a limit.
  double best = 0.0;
  for (double p : points) {
    best = std::max(best, std::abs(a.cdf_left(p) - b.cdf_left(p)));
    best = std::max(best, std::abs(a.cdf_right(p) - b.cdf_right(p)));
  }
  return best;
}

}  // namespace streamks
