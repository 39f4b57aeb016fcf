#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace plancluster {

/// One scalar trajectory dimension as a piecewise polynomial of degree 1 or
/// 3. Coefficients are segment-local: on segment i the value is
/// sum_k c_k * tau^k with tau = t - breakpoints[i].
///
/// Construction validates the layout and continuity at interior breakpoints
/// (1e-9 relative); smoothness beyond C0 is not required.
class PiecewisePolynomial {
 public:
  PiecewisePolynomial(std::vector<double> breakpoints,
                      std::vector<std::vector<double>> coeffs, int degree);

  int degree() const { return degree_; }
  std::size_t segment_count() const { return coeffs_.size(); }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  std::span<const double> coeffs(std::size_t segment) const {
    return coeffs_[segment];
  }
  const std::vector<std::vector<double>>& all_coeffs() const { return coeffs_; }

  double start() const { return breakpoints_.front(); }
  double end() const { return breakpoints_.back(); }
  double segment_length(std::size_t segment) const {
    return breakpoints_[segment + 1] - breakpoints_[segment];
  }

  /// Index of the segment containing t; at interior breakpoints the right
  /// segment. Throws DomainError outside [start, end].
  std::size_t segment_at(double t) const;

  double evaluate(double t) const;

  /// Analytic slope. At interior breakpoints of linear splines this is the
  /// subderivative (m+ + m-)/2; cubic splines use the right segment.
  double derivative_at(double t) const;

  /// Value and slope at the left/right end of a segment, in local time.
  double segment_value(std::size_t segment, double tau) const;

  /// Same dimension with every coefficient negated.
  PiecewisePolynomial negated() const;

  /// Rescale time by 1/t_scale, preserving values (c_k <- c_k * t_scale^k).
  PiecewisePolynomial time_scaled(double t_scale) const;

  bool operator==(const PiecewisePolynomial&) const = default;

 private:
  std::vector<double> breakpoints_;
  std::vector<std::vector<double>> coeffs_;
  int degree_;
};

/// Degree-1 interpolant through the given samples.
PiecewisePolynomial from_samples(std::span<const double> times,
                                 std::span<const double> values);

/// Box constraint on a dimension's codomain.
struct DimensionBounds {
  double lower;
  double upper;
  /// Set when the bounds were derived from data rather than supplied.
  bool inferred = false;

  DimensionBounds(double lower, double upper, bool inferred = false);
  double range() const { return upper - lower; }
  bool operator==(const DimensionBounds&) const = default;
};

struct Dimension {
  PiecewisePolynomial trajectory;
  std::optional<DimensionBounds> bounds;
  bool operator==(const Dimension&) const = default;
};

/// State and control trajectories on a common time domain [0, t_f].
class MotionPlan {
 public:
  MotionPlan(std::string name, double t_f, std::vector<Dimension> state,
             std::vector<Dimension> control);

  const std::string& name() const { return name_; }
  double t_f() const { return t_f_; }
  const std::vector<Dimension>& state() const { return state_; }
  const std::vector<Dimension>& control() const { return control_; }

  std::size_t dimension_count() const { return state_.size() + control_.size(); }
  /// State dimensions first, then control dimensions.
  const Dimension& dimension(std::size_t k) const;
  /// "s<i>" for state dimensions, "c<j>" for control dimensions.
  std::string dimension_id(std::size_t k) const;

  bool operator==(const MotionPlan&) const = default;

 private:
  std::string name_;
  double t_f_;
  std::vector<Dimension> state_;
  std::vector<Dimension> control_;
};

/// Same plan on [0, 1]. A plan that is already time-normalized is returned
/// unchanged.
MotionPlan normalize_time(const MotionPlan& plan);

}  // namespace plancluster
