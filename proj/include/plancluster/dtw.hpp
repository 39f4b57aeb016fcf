#pragma once

#include <string>
#include <vector>

#include "plancluster/model.hpp"

namespace plancluster {

/// K x D samples of a plan, row-major.
struct SampledSeries {
  std::size_t steps = 0;
  std::size_t dims = 0;
  std::vector<double> values;
  std::vector<std::string> dimension_ids;

  double at(std::size_t step, std::size_t dim) const { return values[step * dims + dim]; }
};

/// Time-normalized plan evaluated at K uniform times in [0, 1]; state and
/// control dimensions concatenated. K must be >= 2.
SampledSeries sample(const MotionPlan& plan, std::size_t samples);

/// Dependent DTW: Euclidean local cost over all dimensions jointly, steps
/// (1,0), (0,1), (1,1), no window. Returns the accumulated cost of the
/// optimal warping path.
double dtw_distance(const SampledSeries& a, const SampledSeries& b);

}  // namespace plancluster
