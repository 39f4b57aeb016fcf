#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "plancluster/cluster.hpp"
#include "plancluster/features.hpp"
#include "plancluster/model.hpp"
#include "plancluster/seqkernel.hpp"

namespace plancluster {

// Plan JSON:
//   { "name": str, "t_f": num,
//     "state":   [ { "bounds": [l, u] | null, "degree": 1|3,
//                    "breakpoints": [...], "coeffs": [[c0..cd], ...] } ],
//     "control": [ ... ] }
MotionPlan parse_plan_json(const std::string& text, const std::string& source = "<string>");
std::string plan_to_json(const MotionPlan& plan);
MotionPlan load_plan_json(const std::filesystem::path& path);
void save_plan_json(const MotionPlan& plan, const std::filesystem::path& path);

/// Samples CSV with header `t,<dim names...>`; each column becomes a linear
/// state dimension of a control-free plan named after the file stem. Missing
/// bounds are inferred as the column range widened by 1% on each side.
/// When `t_f` is given the sample times are mapped onto [0, t_f]; otherwise
/// they are shifted to start at 0.
MotionPlan parse_samples_csv(const std::string& text, const std::string& name,
                             const std::vector<std::optional<DimensionBounds>>& bounds = {},
                             std::optional<double> t_f = std::nullopt,
                             const std::string& source = "<string>");
MotionPlan load_samples_csv(const std::filesystem::path& path,
                            const std::vector<std::optional<DimensionBounds>>& bounds = {},
                            std::optional<double> t_f = std::nullopt);

/// Feature-sequence JSON: { "name": str, "dimensions": [ { "id": str,
/// "features": [ { "class", "time", "salience" } ] } ] }.
struct PlanFeatures {
  std::string name;
  std::vector<FeatureSequence> dimensions;
  bool operator==(const PlanFeatures&) const = default;
};
std::string features_to_json(const PlanFeatures& features);
PlanFeatures parse_features_json(const std::string& text, const std::string& source = "<string>");
void save_feature_sequences(const PlanFeatures& features, const std::filesystem::path& path);
PlanFeatures load_feature_sequences(const std::filesystem::path& path);

/// CSV whose first row and column hold item names.
std::string distance_matrix_to_csv(const DistanceMatrix& d);
DistanceMatrix parse_distance_matrix_csv(const std::string& text,
                                         const std::string& source = "<string>");
void save_distance_matrix(const DistanceMatrix& d, const std::filesystem::path& path);
DistanceMatrix load_distance_matrix(const std::filesystem::path& path);

/// Newick with every node annotated by the height of the merge that joins
/// it to its sibling, e.g. "((0:1,1:1):5,2:5);".
std::string dendrogram_to_newick(const Dendrogram& dend);
/// JSON list of merges [[a, b, h], ...].
std::string dendrogram_to_json(const Dendrogram& dend);
void save_dendrogram(const Dendrogram& dend, const std::filesystem::path& newick_path,
                     const std::filesystem::path& json_path);

/// Two-column CSV `item,cluster`.
std::string labels_to_csv(const ClusterLabels& labels);
ClusterLabels parse_labels_csv(const std::string& text, const std::string& source = "<string>");
ClusterLabels load_labels_csv(const std::filesystem::path& path);

/// Manifest JSON:
///   { "plans": [ { "path": str, "label": str? } ... ],
///     "extraction": { "prominence_threshold", "epsilon_rel", "classes": [...],
///                     "per_dimension": { id: [...] } },
///     "kernel": { "soft_sim", "gap_weighting", "salience_weighting",
///                 "max_subseq_len" } }
/// Relative plan paths resolve against the manifest's directory.
struct PlanSetManifest {
  std::vector<std::filesystem::path> plans;
  std::vector<std::string> labels;  ///< empty, or one per plan
  std::optional<ExtractionConfig> extraction;
  std::optional<double> soft_sim;
  std::optional<bool> gap_weighting;
  std::optional<bool> salience_weighting;
  std::optional<std::size_t> max_subseq_len;
};
PlanSetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const PlanSetManifest& manifest, const std::filesystem::path& path);

/// Dispatches on extension: .json plan or .csv samples.
MotionPlan load_plan(const std::filesystem::path& path);

struct LabelledPlan {
  MotionPlan plan;
  std::string label;
};

enum class SyntheticFamily { HalfSwings, SaturationArcs };

/// Synthetic plan families with a known ground truth. Each parameter value
/// is one cluster: the number of half swings (sign changes of the first
/// state dimension) or the number of control saturation arcs.
struct SyntheticFamilySpec {
  SyntheticFamily family = SyntheticFamily::HalfSwings;
  std::vector<int> parameters{1, 2, 3};
  std::size_t plans_per_cluster = 20;
  double amplitude_jitter = 0.1;
  double phase_jitter = 0.1;
  double time_warp_jitter = 0.1;
  std::uint64_t seed = 42;
  std::size_t knots = 41;

  void validate() const;
};

/// Deterministic for a fixed seed.
std::vector<LabelledPlan> generate_synthetic(const SyntheticFamilySpec& spec);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

}  // namespace plancluster
