#include "plancluster/dtw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "plancluster/errors.hpp"

namespace plancluster {

SampledSeries sample(const MotionPlan& plan, std::size_t samples) {
  if (samples < 2) throw ConfigError("need at least 2 samples, got " + std::to_string(samples));
  const auto norm = normalize_time(plan);
  SampledSeries out;
  out.steps = samples;
  out.dims = norm.dimension_count();
  out.values.resize(out.steps * out.dims);
  for (std::size_t d = 0; d < out.dims; ++d) out.dimension_ids.push_back(norm.dimension_id(d));
  for (std::size_t k = 0; k < samples; ++k) {
    const double t =
        k + 1 == samples ? 1.0 : static_cast<double>(k) / static_cast<double>(samples - 1);
    for (std::size_t d = 0; d < out.dims; ++d)
      out.values[k * out.dims + d] = norm.dimension(d).trajectory.evaluate(t);
  }
  return out;
}

double dtw_distance(const SampledSeries& a, const SampledSeries& b) {
  if (a.dims != b.dims)
    throw ConfigError("DTW dimension mismatch: " + std::to_string(a.dims) + " vs " +
                      std::to_string(b.dims));
  if (a.steps == 0 || b.steps == 0) throw ConfigError("DTW needs non-empty series");
  const std::size_t n = a.steps, m = b.steps, dims = a.dims;
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(m + 1, inf), cur(m + 1, inf);
  prev[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cur[0] = inf;
    const double* ai = &a.values[i * dims];
    for (std::size_t j = 0; j < m; ++j) {
      const double* bj = &b.values[j * dims];
      double sq = 0.0;
      for (std::size_t d = 0; d < dims; ++d) {
        const double diff = ai[d] - bj[d];
        sq += diff * diff;
      }
      cur[j + 1] = std::sqrt(sq) + std::min({prev[j], prev[j + 1], cur[j]});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

}  // namespace plancluster
