#include "plancluster/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "plancluster/errors.hpp"
#include "plancluster/polynomial.hpp"

namespace plancluster {

namespace {

// Interval of constant sign of either the trajectory or its slope.
struct SignPiece {
  double start;
  int sign;
};

std::vector<SignPiece> sign_pieces(const PiecewisePolynomial& pp, bool of_slope) {
  std::vector<SignPiece> pieces;
  for (std::size_t s = 0; s < pp.segment_count(); ++s) {
    std::vector<double> c(pp.coeffs(s).begin(), pp.coeffs(s).end());
    if (of_slope) c = poly::derivative(c);
    const double len = pp.segment_length(s);
    const double t0 = pp.breakpoints()[s];
    std::vector<double> cuts{0.0};
    for (double r : poly::sign_change_roots(c, 0.0, len)) cuts.push_back(r);
    cuts.push_back(len);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const int sg = poly::sign(poly::evaluate(c, 0.5 * (cuts[k] + cuts[k + 1])));
      if (!pieces.empty() && pieces.back().sign == sg) continue;
      pieces.push_back({t0 + cuts[k], sg});
    }
  }
  return pieces;
}

double normalize_salience(double raw, const std::optional<DimensionBounds>& bounds) {
  if (bounds) return std::clamp(raw / bounds->range(), 0.0, 1.0);
  return 2.0 / std::numbers::pi * std::atan(raw);
}

// Walks one segment portion [a, b] (local time) away from the peak, lowering
// `base`. Returns true once strictly higher ground than `v` is reached.
bool walk_segment(std::span<const double> c, double a, double b, bool forward,
                  double v, double tol, double& base) {
  std::vector<double> pts{a, b};
  for (double x : poly::critical_points(c, a, b)) pts.push_back(x);
  std::vector<double> shifted(c.begin(), c.end());
  shifted[0] -= v;
  for (double x : poly::sign_change_roots(shifted, a, b)) pts.push_back(x);
  std::sort(pts.begin(), pts.end());
  if (!forward) std::reverse(pts.begin(), pts.end());
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double mid = 0.5 * (pts[k] + pts[k + 1]);
    if (poly::evaluate(c, mid) > v + tol) return true;
    base = std::min(base, poly::evaluate(c, pts[k + 1]));
  }
  return false;
}

double side_base(const PiecewisePolynomial& pp, double edge, bool forward, double v) {
  const double tol = 1e-12 * std::max(1.0, std::abs(v));
  const auto& bp = pp.breakpoints();
  double base = pp.evaluate(edge);
  if (forward) {
    for (std::size_t s = pp.segment_at(edge); s < pp.segment_count(); ++s) {
      const double a = std::max(edge, bp[s]) - bp[s];
      const double b = pp.segment_length(s);
      if (a >= b) continue;
      if (walk_segment(pp.coeffs(s), a, b, true, v, tol, base)) break;
    }
  } else {
    auto it = std::lower_bound(bp.begin(), bp.end(), edge);
    std::size_t s = it == bp.begin() ? 0 : static_cast<std::size_t>(it - bp.begin()) - 1;
    s = std::min(s, pp.segment_count() - 1);
    for (;; --s) {
      const double b = std::min(edge, bp[s + 1]) - bp[s];
      if (b > 0.0 && walk_segment(pp.coeffs(s), 0.0, b, false, v, tol, base)) break;
      if (s == 0) break;
    }
  }
  return base;
}

// Higher of the two side bases of a peak spanning [left_edge, right_edge];
// empty when both sides have zero extent.
std::optional<double> key_col(const PiecewisePolynomial& pp, double left_edge,
                              double right_edge, double value) {
  const bool has_left = left_edge > pp.start();
  const bool has_right = right_edge < pp.end();
  if (!has_left && !has_right) return std::nullopt;
  double key = -std::numeric_limits<double>::infinity();
  if (has_left) key = std::max(key, side_base(pp, left_edge, false, value));
  if (has_right) key = std::max(key, side_base(pp, right_edge, true, value));
  return key;
}

}  // namespace

std::string_view to_string(FeatureClass c) {
  switch (c) {
    case FeatureClass::Max: return "max";
    case FeatureClass::Min: return "min";
    case FeatureClass::Root: return "root";
    case FeatureClass::UpperBound: return "ub";
    case FeatureClass::LowerBound: return "lb";
  }
  return "?";
}

FeatureClass feature_class_from_string(std::string_view name) {
  for (auto c : {FeatureClass::Max, FeatureClass::Min, FeatureClass::Root,
                 FeatureClass::UpperBound, FeatureClass::LowerBound})
    if (to_string(c) == name) return c;
  throw FormatError("unknown feature class '" + std::string(name) +
                    "' (expected max|min|root|ub|lb)");
}

FeatureClassSet ExtractionConfig::classes_for(const std::string& dimension_id) const {
  auto it = per_dimension.find(dimension_id);
  return it == per_dimension.end() ? classes : it->second;
}

void ExtractionConfig::validate() const {
  if (!(prominence_threshold >= 0.0))
    throw ConfigError("prominence threshold must be >= 0");
  if (!(constraint_epsilon_rel > 0.0 && constraint_epsilon_rel < 0.5))
    throw ConfigError("constraint epsilon must lie in (0, 0.5)");
}

std::vector<Extremum> find_extrema(const PiecewisePolynomial& pp) {
  std::vector<Extremum> out;
  int last_sign = 0;
  std::optional<double> plateau_start;
  for (const auto& piece : sign_pieces(pp, true)) {
    if (piece.sign == 0) {
      if (last_sign != 0 && !plateau_start) plateau_start = piece.start;
      continue;
    }
    if (last_sign != 0 && piece.sign != last_sign) {
      const double t = plateau_start.value_or(piece.start);
      out.push_back({t, last_sign > 0 ? FeatureClass::Max : FeatureClass::Min,
                     pp.evaluate(t)});
    }
    last_sign = piece.sign;
    plateau_start.reset();
  }
  return out;
}

double peak_prominence(const PiecewisePolynomial& pp, double left_edge,
                       double right_edge, double value) {
  const auto key = key_col(pp, left_edge, right_edge, value);
  return key ? std::max(0.0, value - *key) : 0.0;
}

double prominence(const PiecewisePolynomial& pp, const Extremum& extremum,
                  const std::optional<DimensionBounds>& bounds) {
  const double raw =
      extremum.cls == FeatureClass::Min
          ? peak_prominence(pp.negated(), extremum.time, extremum.time, -extremum.value)
          : peak_prominence(pp, extremum.time, extremum.time, extremum.value);
  return normalize_salience(raw, bounds);
}

std::vector<ConstraintArc> find_constrained_arcs(const PiecewisePolynomial& pp,
                                                 const DimensionBounds& bounds,
                                                 double epsilon) {
  std::vector<double> checks = pp.breakpoints();
  if (pp.degree() == 3)
    for (const auto& e : find_extrema(pp)) checks.push_back(e.time);
  std::sort(checks.begin(), checks.end());
  checks.erase(std::unique(checks.begin(), checks.end()), checks.end());

  struct Check {
    double time;
    double value;
    int side;  // +1 upper, -1 lower, 0 free
  };
  std::vector<Check> pts;
  pts.reserve(checks.size());
  for (double t : checks) {
    const double v = pp.evaluate(t);
    const int side = bounds.upper - v < epsilon ? 1 : (v - bounds.lower < epsilon ? -1 : 0);
    pts.push_back({t, v, side});
  }

  std::vector<ConstraintArc> arcs;
  std::optional<PiecewisePolynomial> negated;
  for (std::size_t i = 0; i < pts.size();) {
    if (pts[i].side == 0) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < pts.size() && pts[j + 1].side == pts[i].side) ++j;
    const double t0 = pts[i].time, t1 = pts[j].time;
    const bool boundary_touch = i == j && (t0 <= pp.start() || t0 >= pp.end());
    if (!boundary_touch) {
      const bool upper = pts[i].side > 0;
      double raw;
      if (upper) {
        double v = -std::numeric_limits<double>::infinity();
        for (std::size_t k = i; k <= j; ++k) v = std::max(v, pts[k].value);
        const auto key = key_col(pp, t0, t1, v);
        raw = key ? std::max(0.0, std::min(v, bounds.upper) - *key) : 0.0;
      } else {
        double v = std::numeric_limits<double>::infinity();
        for (std::size_t k = i; k <= j; ++k) v = std::min(v, pts[k].value);
        if (!negated) negated = pp.negated();
        const auto key = key_col(*negated, t0, t1, -v);
        raw = key ? std::max(0.0, -std::max(v, bounds.lower) - *key) : 0.0;
      }
      arcs.push_back({0.5 * (t0 + t1),
                      upper ? FeatureClass::UpperBound : FeatureClass::LowerBound,
                      std::clamp(raw / bounds.range(), 0.0, 1.0), t0, t1});
    }
    i = j + 1;
  }
  return arcs;
}

std::vector<Root> find_roots(const PiecewisePolynomial& pp,
                             const std::optional<DimensionBounds>& bounds) {
  std::vector<Root> out;
  const double slope_scale = bounds ? 1.0 / bounds->range() : 1.0;
  int last_sign = 0;
  for (const auto& piece : sign_pieces(pp, false)) {
    if (piece.sign == 0) {
      last_sign = 0;
      continue;
    }
    if (last_sign != 0 && piece.sign != last_sign) {
      const double m = pp.derivative_at(piece.start) * slope_scale;
      out.push_back({piece.start, 2.0 / std::numbers::pi * std::abs(std::atan(m))});
    }
    last_sign = piece.sign;
  }
  return out;
}

FeatureSequence extract_dimension(const Dimension& dim, std::string dimension_id,
                                  FeatureClassSet classes,
                                  const ExtractionConfig& config) {
  const auto& pp = dim.trajectory;
  FeatureSequence seq{std::move(dimension_id), {}};

  std::vector<ConstraintArc> arcs;
  if (dim.bounds && (classes.contains(FeatureClass::UpperBound) ||
                     classes.contains(FeatureClass::LowerBound))) {
    const double eps = config.constraint_epsilon_rel * dim.bounds->range();
    for (const auto& a : find_constrained_arcs(pp, *dim.bounds, eps))
      if (classes.contains(a.cls)) arcs.push_back(a);
  }

  if (classes.contains(FeatureClass::Max) || classes.contains(FeatureClass::Min)) {
    for (const auto& e : find_extrema(pp)) {
      if (!classes.contains(e.cls)) continue;
      const bool inside_arc = std::any_of(arcs.begin(), arcs.end(), [&](const auto& a) {
        return e.time >= a.start_time && e.time <= a.end_time;
      });
      if (inside_arc) continue;
      const double sal = prominence(pp, e, dim.bounds);
      if (sal >= config.prominence_threshold) seq.elements.push_back({e.cls, e.time, sal});
    }
  }
  for (const auto& a : arcs)
    if (a.salience >= config.prominence_threshold)
      seq.elements.push_back({a.cls, a.center_time, a.salience});

  if (classes.contains(FeatureClass::Root))
    for (const auto& r : find_roots(pp, dim.bounds))
      seq.elements.push_back({FeatureClass::Root, r.time, r.salience});

  for (auto& e : seq.elements) e.time = std::clamp(e.time, 0.0, 1.0);
  std::stable_sort(seq.elements.begin(), seq.elements.end(),
                   [](const FeatureElement& a, const FeatureElement& b) {
                     if (a.time != b.time) return a.time < b.time;
                     return a.cls < b.cls;
                   });
  return seq;
}

std::vector<FeatureSequence> extract(const MotionPlan& plan,
                                     const ExtractionConfig& config) {
  config.validate();
  const auto norm = normalize_time(plan);
  std::vector<FeatureSequence> out;
  out.reserve(norm.dimension_count());
  for (std::size_t k = 0; k < norm.dimension_count(); ++k) {
    auto id = norm.dimension_id(k);
    const auto classes = config.classes_for(id);
    out.push_back(extract_dimension(norm.dimension(k), std::move(id), classes, config));
  }
  return out;
}

}  // namespace plancluster
