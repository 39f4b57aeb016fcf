#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace plancluster {

/// Symmetric, zero-diagonal, finite, non-negative matrix of pairwise
/// distances between named items.
class DistanceMatrix {
 public:
  /// Row-major entries; throws DataError if an invariant fails.
  DistanceMatrix(std::vector<std::string> ids, std::vector<double> entries);

  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * ids_.size() + j]; }
  const std::vector<double>& entries() const { return entries_; }

  bool operator==(const DistanceMatrix&) const = default;

 private:
  std::vector<std::string> ids_;
  std::vector<double> entries_;
};

using PairMetric = std::function<double(std::size_t, std::size_t)>;

/// Evaluates `metric(i, j)` for all i < j, on `threads` workers (0 means
/// hardware concurrency). The result does not depend on the schedule. A
/// failing pair is rethrown with both item ids in the message.
DistanceMatrix pairwise_matrix(std::vector<std::string> ids, const PairMetric& metric,
                               unsigned threads = 0);

struct Merge {
  std::size_t a;  ///< cluster id; leaves are 0..n-1, merge k creates n+k
  std::size_t b;
  double height;
  bool operator==(const Merge&) const = default;
};

struct Dendrogram {
  std::vector<std::string> leaf_ids;
  std::vector<Merge> merges;  ///< leaf_ids.size() - 1 entries, heights non-decreasing

  bool operator==(const Dendrogram&) const = default;
};

/// Agglomerative single linkage. Ties go to the pair of clusters with the
/// lowest (smallest member index) pair; within a merge the cluster holding
/// the smaller item index is listed first.
Dendrogram single_linkage(const DistanceMatrix& d);

struct ClusterLabels {
  std::vector<std::string> item_ids;
  std::vector<std::size_t> assignment;  ///< contiguous from 0
  std::vector<std::string> cluster_names;  ///< one per cluster index

  std::size_t cluster_count() const { return cluster_names.size(); }
};

/// Builds labels from per-item names; indices follow first appearance.
ClusterLabels labels_from_names(std::vector<std::string> item_ids,
                                const std::vector<std::string>& names);

struct CutCriterion {
  std::optional<std::size_t> num_clusters;
  std::optional<double> height;

  static CutCriterion clusters(std::size_t k) { return {k, std::nullopt}; }
  static CutCriterion at_height(double h) { return {std::nullopt, h}; }
};

/// k-cut undoes the last k-1 merges; height cut undoes merges above h.
/// Clusters are numbered by their smallest item index.
ClusterLabels cut(const Dendrogram& dend, const CutCriterion& criterion);

struct ConfusionReport {
  std::vector<std::string> truth_names;
  std::vector<std::string> predicted_names;
  /// counts[t][p]: items with truth cluster t and predicted cluster p.
  std::vector<std::vector<std::size_t>> counts;
  /// Predicted cluster matched to each truth cluster, if any.
  std::vector<std::optional<std::size_t>> matching;
  std::size_t correct = 0;
  double accuracy = 0.0;
};

/// Confusion matrix (rows truth, columns predicted) and the accuracy of the
/// optimal one-to-one assignment of predicted to truth clusters.
ConfusionReport confusion(const ClusterLabels& predicted, const ClusterLabels& truth);

/// Text table: truth rows, matched predicted clusters in truth order, any
/// remaining predicted clusters summarized in a "..." column.
std::string format_confusion(const ConfusionReport& report);

}  // namespace plancluster
