#include "plancluster/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "plancluster/errors.hpp"
#include "plancluster/polynomial.hpp"

namespace plancluster {

namespace {

constexpr double kContinuityTol = 1e-9;
constexpr double kEndpointTol = 1e-9;

std::string str(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

PiecewisePolynomial::PiecewisePolynomial(std::vector<double> breakpoints,
                                         std::vector<std::vector<double>> coeffs,
                                         int degree)
    : breakpoints_(std::move(breakpoints)),
      coeffs_(std::move(coeffs)),
      degree_(degree) {
  if (degree_ != 1 && degree_ != 3)
    throw FormatError("degree must be 1 or 3, got " + std::to_string(degree_));
  if (coeffs_.empty())
    throw FormatError("piecewise polynomial needs at least one segment");
  if (breakpoints_.size() != coeffs_.size() + 1)
    throw FormatError("expected " + std::to_string(coeffs_.size() + 1) +
                      " breakpoints for " + std::to_string(coeffs_.size()) +
                      " segments, got " + std::to_string(breakpoints_.size()));
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    if (!std::isfinite(breakpoints_[i]))
      throw FormatError("breakpoint " + std::to_string(i) + " is not finite");
    if (i > 0 && !(breakpoints_[i] > breakpoints_[i - 1]))
      throw FormatError("breakpoints not strictly increasing at index " +
                        std::to_string(i));
  }
  for (std::size_t s = 0; s < coeffs_.size(); ++s) {
    if (coeffs_[s].size() != static_cast<std::size_t>(degree_ + 1))
      throw FormatError("segment " + std::to_string(s) + " has " +
                        std::to_string(coeffs_[s].size()) +
                        " coefficients, expected " + std::to_string(degree_ + 1));
    for (double c : coeffs_[s])
      if (!std::isfinite(c))
        throw FormatError("segment " + std::to_string(s) +
                          " has a non-finite coefficient");
  }
  for (std::size_t s = 0; s + 1 < coeffs_.size(); ++s) {
    const double left = poly::evaluate(coeffs_[s], segment_length(s));
    const double right = coeffs_[s + 1][0];
    if (!close_rel(left, right, kContinuityTol))
      throw DataError("discontinuity at breakpoint " + std::to_string(s + 1) +
                      " (t=" + str(breakpoints_[s + 1]) + "): " + str(left) +
                      " vs " + str(right));
  }
}

std::size_t PiecewisePolynomial::segment_at(double t) const {
  const double slack = 1e-12 * std::max(1.0, std::abs(end()));
  if (!(t >= start() - slack && t <= end() + slack))
    throw DomainError("t=" + str(t) + " outside [" + str(start()) + ", " +
                      str(end()) + "]");
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  if (it == breakpoints_.begin()) return 0;
  const auto idx = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
  return std::min(idx, coeffs_.size() - 1);
}

double PiecewisePolynomial::segment_value(std::size_t segment, double tau) const {
  return poly::evaluate(coeffs_[segment], tau);
}

double PiecewisePolynomial::evaluate(double t) const {
  const auto s = segment_at(t);
  return poly::evaluate(coeffs_[s], t - breakpoints_[s]);
}

double PiecewisePolynomial::derivative_at(double t) const {
  const auto s = segment_at(t);
  const auto right = poly::evaluate(poly::derivative(coeffs_[s]), t - breakpoints_[s]);
  if (degree_ == 1 && s > 0 && t == breakpoints_[s]) {
    const double left = coeffs_[s - 1][1];
    return 0.5 * (left + right);
  }
  return right;
}

PiecewisePolynomial PiecewisePolynomial::negated() const {
  auto c = coeffs_;
  for (auto& seg : c)
    for (double& v : seg) v = -v;
  return {breakpoints_, std::move(c), degree_};
}

PiecewisePolynomial PiecewisePolynomial::time_scaled(double t_scale) const {
  if (t_scale == 1.0) return *this;
  auto b = breakpoints_;
  for (double& t : b) t /= t_scale;
  auto c = coeffs_;
  for (auto& seg : c) {
    double f = 1.0;
    for (double& v : seg) {
      v *= f;
      f *= t_scale;
    }
  }
  return {std::move(b), std::move(c), degree_};
}

PiecewisePolynomial from_samples(std::span<const double> times,
                                 std::span<const double> values) {
  if (times.size() != values.size())
    throw FormatError("sample count mismatch: " + std::to_string(times.size()) +
                      " times, " + std::to_string(values.size()) + " values");
  if (times.size() < 2)
    throw FormatError("need at least 2 samples, got " +
                      std::to_string(times.size()));
  std::vector<double> b(times.begin(), times.end());
  std::vector<std::vector<double>> c;
  c.reserve(times.size() - 1);
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    if (!(times[i + 1] > times[i]))
      throw FormatError("sample times not strictly increasing at index " +
                        std::to_string(i + 1));
    const double slope = (values[i + 1] - values[i]) / (times[i + 1] - times[i]);
    c.push_back({values[i], slope});
  }
  // Constant terms are the samples themselves, so evaluation at every sample
  // time but the last is exact; the last is reached through the slope and
  // is exact up to rounding.
  return {std::move(b), std::move(c), 1};
}

DimensionBounds::DimensionBounds(double lower_, double upper_, bool inferred_)
    : lower(lower_), upper(upper_), inferred(inferred_) {
  if (!(std::isfinite(lower) && std::isfinite(upper) && lower < upper))
    throw FormatError("bounds must satisfy lower < upper, got [" + str(lower) +
                      ", " + str(upper) + "]");
}

MotionPlan::MotionPlan(std::string name, double t_f, std::vector<Dimension> state,
                       std::vector<Dimension> control)
    : name_(std::move(name)),
      t_f_(t_f),
      state_(std::move(state)),
      control_(std::move(control)) {
  if (!(std::isfinite(t_f_) && t_f_ > 0.0))
    throw FormatError("plan '" + name_ + "': t_f must be > 0, got " + str(t_f_));
  if (state_.empty())
    throw FormatError("plan '" + name_ + "': needs at least one state dimension");
  const double tol = kEndpointTol * std::max(1.0, t_f_);
  for (std::size_t k = 0; k < dimension_count(); ++k) {
    const auto& pp = dimension(k).trajectory;
    if (std::abs(pp.start()) > tol || std::abs(pp.end() - t_f_) > tol)
      throw FormatError("plan '" + name_ + "', dimension " + dimension_id(k) +
                        ": breakpoints span [" + str(pp.start()) + ", " +
                        str(pp.end()) + "], expected [0, " + str(t_f_) + "]");
  }
}

const Dimension& MotionPlan::dimension(std::size_t k) const {
  return k < state_.size() ? state_.at(k) : control_.at(k - state_.size());
}

std::string MotionPlan::dimension_id(std::size_t k) const {
  return k < state_.size() ? "s" + std::to_string(k)
                           : "c" + std::to_string(k - state_.size());
}

MotionPlan normalize_time(const MotionPlan& plan) {
  if (plan.t_f() == 1.0) return plan;
  auto rescale = [&](const std::vector<Dimension>& dims) {
    std::vector<Dimension> out;
    out.reserve(dims.size());
    for (const auto& d : dims) {
      auto pp = d.trajectory.time_scaled(plan.t_f());
      // Snap the domain ends so downstream feature times stay inside [0, 1].
      auto b = pp.breakpoints();
      b.front() = 0.0;
      b.back() = 1.0;
      out.push_back({PiecewisePolynomial(std::move(b), pp.all_coeffs(), pp.degree()),
                     d.bounds});
    }
    return out;
  };
  return MotionPlan(plan.name(), 1.0, rescale(plan.state()), rescale(plan.control()));
}

}  // namespace plancluster
