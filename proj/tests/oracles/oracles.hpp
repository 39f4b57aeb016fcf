#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "plancluster/features.hpp"
#include "plancluster/model.hpp"
#include "plancluster/seqkernel.hpp"

namespace plancluster::oracle {

/// Exhaustive enumeration of all pairs of equal-length index chains.
/// Refuses (ConfigError) sequences longer than 8.
double kernel_bruteforce(const LabeledSequence& x, const LabeledSequence& y,
                         const KernelConfig& cfg);

/// Occurrence count of every label string among the subsequences of `s`.
std::map<std::vector<std::string>, double> subsequence_profile(const LabeledSequence& s);

/// Inner product of two subsequence profiles under identity similarity.
double profile_kernel(const LabeledSequence& x, const LabeledSequence& y);

/// Unnormalized prominence of the extremum at `t` measured on a uniform grid
/// of `samples` points joined with all breakpoints and `t` itself: walk out
/// on each side to the first strictly higher sample, the base is the lowest
/// sample passed; prominence is the value minus the higher base.
double prominence_dense(const PiecewisePolynomial& pp, double t, FeatureClass cls,
                        std::size_t samples = 10000);

/// Hand-rolled generators for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  std::size_t index(std::size_t lo, std::size_t hi) {  // inclusive
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  bool coin() { return index(0, 1) == 1; }

  /// Random breakpoints on [0, t_f] with `segments` segments.
  std::vector<double> breakpoints(std::size_t segments, double t_f = 1.0);
  /// Linear spline through random values in [lo, hi].
  PiecewisePolynomial linear(std::size_t segments, double lo = -1.0, double hi = 1.0,
                             double t_f = 1.0);
  /// C1 cubic Hermite spline with random values in [lo, hi] and random slopes.
  PiecewisePolynomial cubic(std::size_t segments, double lo = -1.0, double hi = 1.0,
                            double t_f = 1.0);
  PiecewisePolynomial spline(std::size_t segments, double lo = -1.0, double hi = 1.0,
                             double t_f = 1.0) {
    return coin() ? cubic(segments, lo, hi, t_f) : linear(segments, lo, hi, t_f);
  }

  /// Labels drawn from `alphabet`, sorted times in [0, 1], weights in (0, 1].
  LabeledSequence labeled(std::size_t length, const std::vector<std::string>& alphabet);
  FeatureSequence features(std::size_t length, std::string dimension_id = "s0");

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace plancluster::oracle
