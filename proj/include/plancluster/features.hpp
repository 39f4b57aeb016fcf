#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plancluster/model.hpp"

namespace plancluster {

enum class FeatureClass : std::uint8_t { Max, Min, Root, UpperBound, LowerBound };

/// Serialized names: "max", "min", "root", "ub", "lb".
std::string_view to_string(FeatureClass c);
/// Throws FormatError on an unknown name.
FeatureClass feature_class_from_string(std::string_view name);

/// Bit set over FeatureClass.
class FeatureClassSet {
 public:
  constexpr FeatureClassSet() = default;
  constexpr FeatureClassSet(std::initializer_list<FeatureClass> classes) {
    for (auto c : classes) insert(c);
  }
  static constexpr FeatureClassSet all() {
    return {FeatureClass::Max, FeatureClass::Min, FeatureClass::Root,
            FeatureClass::UpperBound, FeatureClass::LowerBound};
  }
  constexpr void insert(FeatureClass c) { bits_ |= bit(c); }
  constexpr bool contains(FeatureClass c) const { return (bits_ & bit(c)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool operator==(const FeatureClassSet&) const = default;

 private:
  static constexpr std::uint8_t bit(FeatureClass c) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(c));
  }
  std::uint8_t bits_ = 0;
};

struct FeatureElement {
  FeatureClass cls;
  double time;      ///< normalized, in [0, 1]
  double salience;  ///< >= 0
  bool operator==(const FeatureElement&) const = default;
};

struct FeatureSequence {
  std::string dimension_id;
  std::vector<FeatureElement> elements;
  bool operator==(const FeatureSequence&) const = default;
};

struct ExtractionConfig {
  FeatureClassSet classes = FeatureClassSet::all();
  /// Per-dimension overrides keyed by dimension id ("s0", "c1", ...).
  std::map<std::string, FeatureClassSet> per_dimension;
  double prominence_threshold = 0.02;
  /// Constraint proximity as a fraction of (upper - lower).
  double constraint_epsilon_rel = 0.01;

  FeatureClassSet classes_for(const std::string& dimension_id) const;
  /// Throws ConfigError when a threshold is out of range.
  void validate() const;
};

struct Extremum {
  double time;
  FeatureClass cls;  ///< Max or Min
  double value;
};

/// Interior local extrema, in time order. Linear splines: knots where the
/// slope sign flips, zero-slope plateaus resolved to their first knot. Cubic
/// splines: simple roots of the derivative inside segments (and at knots
/// where the one-sided slopes change sign). Domain endpoints never qualify.
std::vector<Extremum> find_extrema(const PiecewisePolynomial& pp);

/// Unnormalized topographic prominence of a peak of height `value` whose
/// flat top spans [left_edge, right_edge]. For each side, the base is the
/// minimum between the edge and the nearest strictly higher ground (or the
/// domain end); prominence is value - max(bases). A side of zero extent is
/// ignored; if both are, the result is 0.
double peak_prominence(const PiecewisePolynomial& pp, double left_edge,
                       double right_edge, double value);

/// Normalized prominence in [0, 1] of a Max (or of a Min, via -f): divided
/// by the bound range, or mapped through (2/pi)atan when unbounded.
double prominence(const PiecewisePolynomial& pp, const Extremum& extremum,
                  const std::optional<DimensionBounds>& bounds);

struct ConstraintArc {
  double center_time;
  FeatureClass cls;  ///< UpperBound or LowerBound
  double salience;
  double start_time;  ///< first satisfying check point
  double end_time;    ///< last satisfying check point
};

/// Maximal runs of check points (knots, plus extremum times for cubic
/// splines) lying within `epsilon` of a bound, each merged to one arc. A
/// run consisting only of a domain endpoint is a boundary touch, not an arc.
std::vector<ConstraintArc> find_constrained_arcs(const PiecewisePolynomial& pp,
                                                 const DimensionBounds& bounds,
                                                 double epsilon);

struct Root {
  double time;
  double salience;
};

/// Sign-changing zero crossings. Salience is (2/pi)|atan(m)| with m the slope
/// divided by the bound range (raw slope when unbounded). Identically zero
/// segments and tangential touches contribute nothing.
std::vector<Root> find_roots(const PiecewisePolynomial& pp,
                             const std::optional<DimensionBounds>& bounds);

/// Feature sequence of one (time-normalized) dimension.
FeatureSequence extract_dimension(const Dimension& dim, std::string dimension_id,
                                  FeatureClassSet classes,
                                  const ExtractionConfig& config);

/// One sequence per dimension (state first, then control), after time
/// normalization of the plan.
std::vector<FeatureSequence> extract(const MotionPlan& plan,
                                     const ExtractionConfig& config);

}  // namespace plancluster
