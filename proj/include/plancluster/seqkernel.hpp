#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "plancluster/features.hpp"

namespace plancluster {

/// Soft-matching similarity over an alphabet of labels. Symmetric, unit
/// diagonal, entries in [0, 1], positive definite (checked by Cholesky at
/// construction).
class SimilarityMatrix {
 public:
  /// Row-major `entries` of size labels.size()^2. Throws ConfigError when an
  /// invariant fails.
  SimilarityMatrix(std::vector<std::string> labels, std::vector<double> entries);

  /// Identity similarity over `labels`.
  static SimilarityMatrix identity(std::vector<std::string> labels);

  /// Feature-class alphabet with sim(max, ub) = sim(min, lb) = sigma, all
  /// other off-diagonal entries 0.
  static SimilarityMatrix feature_default(double sigma = 0.5);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }

  /// Throws ConfigError for unknown labels.
  std::size_t index_of(std::string_view label) const;
  double operator()(std::size_t i, std::size_t j) const {
    return entries_[i * labels_.size() + j];
  }
  double at(std::string_view a, std::string_view b) const {
    return (*this)(index_of(a), index_of(b));
  }

 private:
  std::vector<std::string> labels_;
  std::vector<double> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct KernelConfig {
  SimilarityMatrix similarity = SimilarityMatrix::feature_default();
  bool use_gap_weighting = true;
  bool use_salience_weighting = true;
  /// Chains longer than this are ignored; empty means unlimited.
  std::optional<std::size_t> max_subseq_len;

  void validate() const;
};

/// Element of a sequence over an arbitrary labelled alphabet.
struct LabeledElement {
  std::string label;
  double time = 0.0;
  double weight = 1.0;
};
using LabeledSequence = std::vector<LabeledElement>;

/// Converts a feature sequence to labels "max", "min", ... .
LabeledSequence as_labeled(const FeatureSequence& seq);

/// Gap weight 1 - |(t_x - t_x_prev) - (t_y - t_y_prev)|.
double gap_weight(double t_x_prev, double t_x, double t_y_prev, double t_y);

/// Weighted common-subsequence kernel: the sum over all pairs of equal-length
/// index chains of the products of similarity, salience weights (optional)
/// and gap weights of consecutive chain entries (optional). Symmetric in its
/// arguments bit for bit.
double kernel(const LabeledSequence& x, const LabeledSequence& y,
              const KernelConfig& cfg);
double kernel(const FeatureSequence& x, const FeatureSequence& y,
              const KernelConfig& cfg);

/// sqrt(max(0, k(x,x) + k(y,y) - 2 k(x,y))).
double dimension_distance(const LabeledSequence& x, const LabeledSequence& y,
                          const KernelConfig& cfg);
double dimension_distance(const FeatureSequence& x, const FeatureSequence& y,
                          const KernelConfig& cfg);

/// Root of the sum of squared per-dimension distances. Dimension counts and
/// ids must match (ConfigError otherwise).
double plan_distance(std::span<const FeatureSequence> a,
                     std::span<const FeatureSequence> b, const KernelConfig& cfg);

}  // namespace plancluster
