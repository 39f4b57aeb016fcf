#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "plancluster/features.hpp"
#include "plancluster/model.hpp"
#include "plancluster/seqkernel.hpp"

namespace plancluster {

struct BenchConfig {
  std::vector<std::size_t> sample_counts{100, 1000, 10000};
  std::size_t repetitions = 20;
  /// Fast operations are repeated until a batch takes at least this long.
  double min_batch_seconds = 1e-3;
  /// Only the first `max_pairs` pairs (i < j, row-major) are timed.
  std::size_t max_pairs = 1;
  ExtractionConfig extraction;
  KernelConfig kernel;

  void validate() const;
};

/// metric is "extract" (both plans, precomputation), "kernel" or "dtw".
struct BenchRow {
  std::string pair;
  std::size_t samples = 0;
  std::string metric;
  double median_seconds = 0.0;
  std::size_t features_a = 0;
  std::size_t features_b = 0;
};

/// Same plan as a linear spline through `samples` uniform time samples of
/// every dimension, bounds kept.
MotionPlan resample(const MotionPlan& plan, std::size_t samples);

/// Median wall time of one call of `fn`, over `repetitions` batches.
double median_seconds(const std::function<void()>& fn, std::size_t repetitions,
                      double min_batch_seconds);

std::vector<BenchRow> run_bench(const std::vector<MotionPlan>& plans, const BenchConfig& cfg);

std::string bench_to_csv(const std::vector<BenchRow>& rows);
std::string format_bench_table(const std::vector<BenchRow>& rows);

}  // namespace plancluster
