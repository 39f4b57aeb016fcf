#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "plancluster/data.hpp"
#include "plancluster/errors.hpp"

namespace plancluster {

namespace {

constexpr double kPi = std::numbers::pi;

// Uniform on [-1, 1) from raw engine output, identical on every platform.
class Jitter {
 public:
  explicit Jitter(std::uint64_t seed) : engine_(seed) {}
  double symmetric() {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return 2.0 * u - 1.0;
  }

 private:
  std::mt19937_64 engine_;
};

struct Draw {
  double amplitude;
  double phase;
  double warp;
  double t_f;
  std::vector<double> knots;  // normalized, 0 and 1 exact
};

Draw draw(const SyntheticFamilySpec& spec, Jitter& rng) {
  Draw d;
  d.amplitude = 1.0 + spec.amplitude_jitter * rng.symmetric();
  d.phase = spec.phase_jitter * (kPi / 2.0) * rng.symmetric();
  d.warp = spec.time_warp_jitter * rng.symmetric();
  d.t_f = 2.0 * (1.0 + spec.time_warp_jitter * rng.symmetric());
  const std::size_t n = spec.knots;
  const double h = 1.0 / static_cast<double>(n - 1);
  d.knots.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double jitter = rng.symmetric();
    d.knots[i] = static_cast<double>(i) * h;
    if (i != 0 && i + 1 != n) d.knots[i] += spec.time_warp_jitter * 0.5 * h * jitter;
  }
  d.knots.back() = 1.0;
  return d;
}

// Monotone warp of [0, 1] onto itself.
double warp(double u, double alpha) { return u + alpha * std::sin(kPi * u) / kPi; }
double warp_slope(double u, double alpha) { return 1.0 + alpha * std::cos(kPi * u); }

// Cubic Hermite through (u_i, y_i) with du-slopes m_i, on plan time t = u t_f.
PiecewisePolynomial hermite(const std::vector<double>& u, const std::vector<double>& y,
                            const std::vector<double>& m, double t_f) {
  std::vector<double> bp(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) bp[i] = u[i] * t_f;
  bp.back() = t_f;
  std::vector<std::vector<double>> coeffs;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    const double h = bp[i + 1] - bp[i];
    const double m0 = m[i] / t_f;
    const double m1 = m[i + 1] / t_f;
    const double s = (y[i + 1] - y[i]) / h;
    coeffs.push_back({y[i], m0, (3.0 * s - 2.0 * m0 - m1) / h, (m0 + m1 - 2.0 * s) / (h * h)});
  }
  return PiecewisePolynomial(std::move(bp), std::move(coeffs), 3);
}

PiecewisePolynomial linear(const std::vector<double>& u, const std::vector<double>& y,
                           double t_f) {
  std::vector<double> t(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) t[i] = u[i] * t_f;
  t.back() = t_f;
  return from_samples(t, y);
}

std::vector<double> uniform_grid(std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  g.back() = 1.0;
  return g;
}

// Damped swing with exactly j sign changes: A e^{-u/2} cos(pi j w(u) + pi/4
// + phi), |phi| < pi/4. The offset keeps the zeros of the swing and of its
// velocity away from the domain ends. The control pushes against the swing
// and saturates.
MotionPlan half_swing_plan(std::string name, int j, int j_max, const Draw& d,
                           std::size_t knots) {
  const double A = d.amplitude;
  auto theta = [&](double u) { return kPi * j * warp(u, d.warp) + kPi / 4.0 + d.phase; };
  auto x = [&](double u) { return A * std::exp(-0.5 * u) * std::cos(theta(u)); };
  auto dx = [&](double u) {
    const double th = theta(u);
    return A * std::exp(-0.5 * u) *
           (-0.5 * std::cos(th) - kPi * j * warp_slope(u, d.warp) * std::sin(th));
  };

  const auto& u = d.knots;
  std::vector<double> pos(u.size()), vel(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    pos[i] = x(u[i]);
    vel[i] = dx(u[i]);
  }
  // Velocity slopes by finite differences of the sampled velocity.
  std::vector<double> acc(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const std::size_t a = i == 0 ? 0 : i - 1;
    const std::size_t b = i + 1 == u.size() ? i : i + 1;
    acc[i] = (vel[b] - vel[a]) / (u[b] - u[a]);
  }
  std::vector<double> vel_t(vel.size());
  for (std::size_t i = 0; i < vel.size(); ++i) vel_t[i] = vel[i] / d.t_f;
  std::vector<double> acc_t(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) acc_t[i] = acc[i] / d.t_f;

  const double vmax = 2.0 * kPi * j_max + 2.0;
  std::vector<Dimension> state;
  state.push_back({hermite(u, pos, vel, d.t_f), DimensionBounds(-1.6, 1.6)});
  state.push_back({hermite(u, vel_t, acc_t, d.t_f),
                   DimensionBounds(-vmax / d.t_f, vmax / d.t_f)});

  const auto grid = uniform_grid(2 * knots - 1);
  std::vector<double> ctrl(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    ctrl[i] = std::clamp(-1.15 * std::sin(theta(grid[i])), -1.0, 1.0);
  std::vector<Dimension> control;
  control.push_back({linear(grid, ctrl, d.t_f), DimensionBounds(-1.0, 1.0)});
  return MotionPlan(std::move(name), d.t_f, std::move(state), std::move(control));
}

// Control with exactly c saturation arcs at the upper bound; the state
// integrates it into c smooth rises. Both stay positive, so neither has
// roots. Phase jitter offsets the state.
MotionPlan saturation_plan(std::string name, int c, const Draw& d, std::size_t knots) {
  const double A = d.amplitude;
  const auto grid = uniform_grid(2 * knots - 1);
  std::vector<double> ctrl(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    ctrl[i] = std::clamp(0.1 + 1.6 * A * std::abs(std::sin(kPi * c * warp(grid[i], d.warp))), -1.0,
                         1.0);

  const auto& u = d.knots;
  const double offset = 0.3 + 0.1 * d.phase;
  std::vector<double> pos(u.size()), vel(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double arg = 2.0 * kPi * c * warp(u[i], d.warp);
    pos[i] = offset + A * (1.0 - std::cos(arg)) / 2.0;
    vel[i] = A * kPi * c * warp_slope(u[i], d.warp) * std::sin(arg);
  }
  std::vector<Dimension> state;
  state.push_back({hermite(u, pos, vel, d.t_f), DimensionBounds(-1.0, 2.0)});
  std::vector<Dimension> control;
  control.push_back({linear(grid, ctrl, d.t_f), DimensionBounds(-1.0, 1.0)});
  return MotionPlan(std::move(name), d.t_f, std::move(state), std::move(control));
}

}  // namespace

void SyntheticFamilySpec::validate() const {
  auto jitter_ok = [](double v) { return v >= 0.0 && v < 0.5; };
  if (!jitter_ok(amplitude_jitter) || !jitter_ok(phase_jitter) || !jitter_ok(time_warp_jitter))
    throw ConfigError("synthetic jitters must lie in [0, 0.5)");
  if (parameters.empty()) throw ConfigError("synthetic family needs at least one parameter");
  for (int p : parameters)
    if (p < 1) throw ConfigError("synthetic family parameters must be >= 1");
  if (plans_per_cluster < 1) throw ConfigError("plans_per_cluster must be >= 1");
  if (knots < 5) throw ConfigError("synthetic plans need at least 5 knots");
}

std::vector<LabelledPlan> generate_synthetic(const SyntheticFamilySpec& spec) {
  spec.validate();
  Jitter rng(spec.seed);
  const int p_max = *std::max_element(spec.parameters.begin(), spec.parameters.end());
  const bool swings = spec.family == SyntheticFamily::HalfSwings;
  const char* prefix = swings ? "hs" : "sa";
  const char* tag = swings ? "j" : "c";

  std::vector<LabelledPlan> out;
  for (int p : spec.parameters) {
    const std::string label = tag + std::to_string(p);
    for (std::size_t i = 0; i < spec.plans_per_cluster; ++i) {
      char index[16];
      std::snprintf(index, sizeof index, "%03zu", i);
      std::string name = std::string(prefix) + "_" + label + "_" + index;
      const Draw d = draw(spec, rng);
      out.push_back({swings ? half_swing_plan(std::move(name), p, p_max, d, spec.knots)
                            : saturation_plan(std::move(name), p, d, spec.knots),
                     label});
    }
  }
  return out;
}

}  // namespace plancluster
