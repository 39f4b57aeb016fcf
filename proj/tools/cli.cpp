#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "plancluster/bench.hpp"
#include "plancluster/cluster.hpp"
#include "plancluster/data.hpp"
#include "plancluster/dtw.hpp"
#include "plancluster/errors.hpp"
#include "plancluster/features.hpp"
#include "plancluster/seqkernel.hpp"

namespace plancluster::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::vector<std::string> inputs;
  std::string metric = "feature";
  double prominence_threshold = 0.02;
  double epsilon_rel = 0.01;
  std::vector<std::string> classes;
  double soft_sim = 0.5;
  bool no_gap = false;
  bool no_salience = false;
  std::size_t max_subseq_len = 0;
  std::size_t cut_k = 0;
  double cut_height = 0.0;
  std::vector<std::size_t> samples{150};
  std::uint64_t seed = 42;
  std::string out;
  std::string truth;
  unsigned threads = 0;

  // generate
  std::string family = "half-swings";
  std::vector<int> parameters{1, 2, 3};
  std::size_t per_cluster = 20;
  double amplitude_jitter = 0.1;
  double phase_jitter = 0.1;
  double time_warp_jitter = 0.1;

  // bench
  std::size_t repetitions = 20;
  std::size_t max_pairs = 1;
};

// Options whose presence on the command line matters.
struct Given {
  CLI::Option* threshold = nullptr;
  CLI::Option* epsilon = nullptr;
  CLI::Option* classes = nullptr;
  CLI::Option* soft_sim = nullptr;
  CLI::Option* max_len = nullptr;
  CLI::Option* cut_k = nullptr;
  CLI::Option* cut_height = nullptr;
  CLI::Option* samples = nullptr;

  static bool set(const CLI::Option* o) { return o != nullptr && o->count() > 0; }
};

struct PlanSet {
  std::vector<MotionPlan> plans;
  std::vector<std::string> labels;  // empty unless every plan has one
  std::optional<PlanSetManifest> manifest;
};

bool is_manifest_file(const fs::path& path) {
  if (path.extension() != ".json") return false;
  const auto doc = nlohmann::json::parse(read_text_file(path), nullptr, false);
  return doc.is_object() && doc.contains("plans");
}

void add_manifest(PlanSet& set, const fs::path& path, bool& labels_complete) {
  auto m = load_manifest(path);
  if (m.labels.empty()) labels_complete = false;
  for (std::size_t i = 0; i < m.plans.size(); ++i) {
    set.plans.push_back(load_plan(m.plans[i]));
    if (!m.labels.empty()) set.labels.push_back(m.labels[i]);
  }
  if (!set.manifest) set.manifest = std::move(m);
}

PlanSet load_inputs(const std::vector<std::string>& inputs) {
  PlanSet set;
  bool labels_complete = true;
  for (const auto& in : inputs) {
    const fs::path p(in);
    if (fs::is_directory(p)) {
      if (fs::exists(p / "manifest.json")) {
        add_manifest(set, p / "manifest.json", labels_complete);
        continue;
      }
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(p)) {
        const auto ext = entry.path().extension();
        if (entry.is_regular_file() && (ext == ".json" || ext == ".csv")) files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      files.erase(std::remove_if(files.begin(), files.end(),
                                 [](const fs::path& f) {
                                   return f.extension() == ".json" && is_manifest_file(f);
                                 }),
                  files.end());
      if (files.empty()) throw ConfigError("no plan files (.json, .csv) in directory '" + in + "'");
      for (const auto& f : files) set.plans.push_back(load_plan(f));
      labels_complete = false;
    } else if (!fs::exists(p)) {
      throw IoError("no such file or directory: '" + in + "'");
    } else if (is_manifest_file(p)) {
      add_manifest(set, p, labels_complete);
    } else {
      set.plans.push_back(load_plan(p));
      labels_complete = false;
    }
  }
  if (!labels_complete) set.labels.clear();
  std::set<std::string> names;
  for (const auto& plan : set.plans)
    if (!names.insert(plan.name()).second)
      throw ConfigError("duplicate plan name '" + plan.name() + "'");
  return set;
}

ExtractionConfig extraction_config(const Options& o, const Given& g, const PlanSet& set) {
  ExtractionConfig cfg =
      set.manifest && set.manifest->extraction ? *set.manifest->extraction : ExtractionConfig{};
  if (Given::set(g.threshold)) cfg.prominence_threshold = o.prominence_threshold;
  if (Given::set(g.epsilon)) cfg.constraint_epsilon_rel = o.epsilon_rel;
  if (Given::set(g.classes)) {
    FeatureClassSet classes;
    for (const auto& name : o.classes) {
      try {
        classes.insert(feature_class_from_string(name));
      } catch (const FormatError&) {
        throw ConfigError("unknown feature class '" + name + "' (expected max, min, root, ub, lb)");
      }
    }
    cfg.classes = classes;
    cfg.per_dimension.clear();
  }
  cfg.validate();
  return cfg;
}

KernelConfig kernel_config(const Options& o, const Given& g, const PlanSet& set) {
  const PlanSetManifest* m = set.manifest ? &*set.manifest : nullptr;
  double sigma = m && m->soft_sim ? *m->soft_sim : 0.5;
  if (Given::set(g.soft_sim)) sigma = o.soft_sim;
  if (!(sigma >= 0.0 && sigma < 1.0)) throw ConfigError("--soft-sim must lie in [0, 1)");
  KernelConfig cfg;
  cfg.similarity = SimilarityMatrix::feature_default(sigma);
  cfg.use_gap_weighting = m && m->gap_weighting ? *m->gap_weighting : true;
  cfg.use_salience_weighting = m && m->salience_weighting ? *m->salience_weighting : true;
  if (o.no_gap) cfg.use_gap_weighting = false;
  if (o.no_salience) cfg.use_salience_weighting = false;
  if (m && m->max_subseq_len) cfg.max_subseq_len = m->max_subseq_len;
  if (Given::set(g.max_len)) {
    if (o.max_subseq_len < 1) throw ConfigError("--max-subseq-len must be >= 1");
    cfg.max_subseq_len = o.max_subseq_len;
  }
  cfg.validate();
  return cfg;
}

std::size_t dtw_samples(const Options& o, const Given& g) {
  if (o.metric != "dtw") {
    if (Given::set(g.samples)) throw ConfigError("--samples applies only to --metric dtw");
    return 0;
  }
  if (o.samples.size() != 1) throw ConfigError("--samples takes one value here");
  if (o.samples[0] < 2) throw ConfigError("--samples must be >= 2");
  return o.samples[0];
}

std::vector<std::string> plan_names(const std::vector<MotionPlan>& plans) {
  std::vector<std::string> names;
  for (const auto& p : plans) names.push_back(p.name());
  return names;
}

// Precomputed per-plan representation for the selected metric.
class Metric {
 public:
  Metric(const std::vector<MotionPlan>& plans, const Options& o, const Given& g,
         const PlanSet& set)
      : samples_(dtw_samples(o, g)) {
    if (samples_ == 0) {
      kernel_ = kernel_config(o, g, set);
      const auto extraction = extraction_config(o, g, set);
      for (const auto& p : plans) features_.push_back(extract(p, extraction));
    } else {
      for (const auto& p : plans) series_.push_back(sample(p, samples_));
    }
  }

  double operator()(std::size_t i, std::size_t j) const {
    if (samples_ == 0) return plan_distance(features_[i], features_[j], *kernel_);
    return dtw_distance(series_[i], series_[j]);
  }

 private:
  std::size_t samples_;
  std::optional<KernelConfig> kernel_;
  std::vector<std::vector<FeatureSequence>> features_;
  std::vector<SampledSeries> series_;
};

fs::path output_dir(const Options& o) {
  const fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

std::string feature_summary(const std::vector<std::pair<std::string, std::vector<FeatureSequence>>>& rows) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-24s %-5s %5s %5s %5s %5s %5s %6s\n", "plan", "dim", "max",
                "min", "root", "ub", "lb", "total");
  os << line;
  for (const auto& [name, seqs] : rows) {
    for (const auto& s : seqs) {
      std::size_t c[5] = {0, 0, 0, 0, 0};
      for (const auto& e : s.elements) ++c[static_cast<int>(e.cls)];
      std::snprintf(line, sizeof line, "%-24s %-5s %5zu %5zu %5zu %5zu %5zu %6zu\n", name.c_str(),
                    s.dimension_id.c_str(), c[0], c[1], c[2], c[3], c[4], s.elements.size());
      os << line;
    }
  }
  return os.str();
}

int cmd_extract(const Options& o, const Given& g, std::ostream& out) {
  const PlanSet set = load_inputs(o.inputs);
  const auto cfg = extraction_config(o, g, set);
  const fs::path dir = output_dir(o);
  std::vector<std::pair<std::string, std::vector<FeatureSequence>>> rows;
  for (const auto& plan : set.plans) {
    auto seqs = extract(plan, cfg);
    save_feature_sequences({plan.name(), seqs}, dir / (plan.name() + ".features.json"));
    rows.emplace_back(plan.name(), std::move(seqs));
  }
  out << feature_summary(rows);
  return 0;
}

int cmd_distance(const Options& o, const Given& g, std::ostream& out) {
  if (o.inputs.size() != 2) throw ConfigError("distance takes exactly two plan files");
  const PlanSet set = load_inputs(o.inputs);
  if (set.plans.size() != 2) throw ConfigError("distance takes exactly two plans");
  const Metric metric(set.plans, o, g, set);
  out << format_double(metric(0, 1)) << "\n";
  return 0;
}

DistanceMatrix build_matrix(const PlanSet& set, const Options& o, const Given& g) {
  if (set.plans.size() < 2) throw ConfigError("need at least two plans");
  const Metric metric(set.plans, o, g, set);
  return pairwise_matrix(plan_names(set.plans),
                         [&](std::size_t i, std::size_t j) { return metric(i, j); }, o.threads);
}

int cmd_matrix(const Options& o, const Given& g, std::ostream& out) {
  const PlanSet set = load_inputs(o.inputs);
  const auto d = build_matrix(set, o, g);
  if (o.out.empty()) {
    out << distance_matrix_to_csv(d);
  } else {
    const fs::path path = output_dir(o) / "distances.csv";
    save_distance_matrix(d, path);
    out << "wrote " << path.string() << " (" << d.size() << " items)\n";
  }
  return 0;
}

CutCriterion cut_criterion(const Options& o, const Given& g) {
  const bool k = Given::set(g.cut_k);
  const bool h = Given::set(g.cut_height);
  if (k == h) throw ConfigError("give exactly one of --cut-k or --cut-height");
  if (k) return CutCriterion::clusters(o.cut_k);
  if (!(o.cut_height >= 0.0)) throw ConfigError("--cut-height must be >= 0");
  return CutCriterion::at_height(o.cut_height);
}

std::string cluster_summary(const ClusterLabels& labels) {
  std::vector<std::size_t> sizes(labels.cluster_count(), 0);
  for (auto a : labels.assignment) ++sizes[a];
  std::ostringstream os;
  os << labels.cluster_count() << " clusters:";
  for (std::size_t c = 0; c < sizes.size(); ++c) os << " " << labels.cluster_names[c] << "=" << sizes[c];
  os << "\n";
  return os.str();
}

std::optional<ClusterLabels> truth_labels(const Options& o, const PlanSet& set) {
  if (!o.truth.empty()) return load_labels_csv(o.truth);
  if (!set.labels.empty()) return labels_from_names(plan_names(set.plans), set.labels);
  return std::nullopt;
}

int cmd_cluster(const Options& o, const Given& g, std::ostream& out) {
  const auto criterion = cut_criterion(o, g);
  const PlanSet set = load_inputs(o.inputs);
  const auto d = build_matrix(set, o, g);
  const auto dend = single_linkage(d);
  const auto labels = cut(dend, criterion);
  const auto truth = truth_labels(o, set);

  const fs::path dir = output_dir(o);
  write_text_file(dir / "labels.csv", labels_to_csv(labels));
  save_dendrogram(dend, dir / "dendrogram.nwk", dir / "dendrogram.json");
  out << "metric: " << o.metric << "\n" << cluster_summary(labels);
  if (truth) {
    const auto report = format_confusion(confusion(labels, *truth));
    write_text_file(dir / "confusion.txt", report);
    out << report;
  }
  return 0;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  if (o.inputs.size() != 1) throw ConfigError("evaluate takes one labels CSV");
  if (o.truth.empty()) throw ConfigError("evaluate needs --truth FILE");
  const auto report = format_confusion(confusion(load_labels_csv(o.inputs[0]), load_labels_csv(o.truth)));
  if (!o.out.empty()) write_text_file(output_dir(o) / "confusion.txt", report);
  out << report;
  return 0;
}

int cmd_generate(const Options& o, std::ostream& out) {
  SyntheticFamilySpec spec;
  if (o.family == "half-swings") {
    spec.family = SyntheticFamily::HalfSwings;
  } else if (o.family == "saturation-arcs") {
    spec.family = SyntheticFamily::SaturationArcs;
  } else {
    throw ConfigError("unknown family '" + o.family + "'");
  }
  spec.parameters = o.parameters;
  spec.plans_per_cluster = o.per_cluster;
  spec.amplitude_jitter = o.amplitude_jitter;
  spec.phase_jitter = o.phase_jitter;
  spec.time_warp_jitter = o.time_warp_jitter;
  spec.seed = o.seed;
  const auto plans = generate_synthetic(spec);

  const fs::path dir = output_dir(o);
  std::error_code ec;
  fs::create_directories(dir / "plans", ec);
  if (ec) throw IoError("cannot create '" + (dir / "plans").string() + "': " + ec.message());
  PlanSetManifest manifest;
  std::vector<std::string> names;
  for (const auto& lp : plans) {
    const fs::path rel = fs::path("plans") / (lp.plan.name() + ".json");
    save_plan_json(lp.plan, dir / rel);
    manifest.plans.push_back(rel);
    manifest.labels.push_back(lp.label);
    names.push_back(lp.plan.name());
  }
  save_manifest(manifest, dir / "manifest.json");
  write_text_file(dir / "truth.csv", labels_to_csv(labels_from_names(names, manifest.labels)));
  out << "wrote " << plans.size() << " plans to " << dir.string() << "\n";
  return 0;
}

int cmd_bench(const Options& o, const Given& g, std::ostream& out) {
  const PlanSet set = load_inputs(o.inputs);
  Options feature_opts = o;
  feature_opts.metric = "feature";
  Given no_samples = g;
  no_samples.samples = nullptr;
  BenchConfig cfg;
  if (Given::set(g.samples)) cfg.sample_counts = o.samples;
  cfg.repetitions = o.repetitions;
  cfg.max_pairs = o.max_pairs;
  cfg.extraction = extraction_config(feature_opts, no_samples, set);
  cfg.kernel = kernel_config(feature_opts, no_samples, set);
  const auto rows = run_bench(set.plans, cfg);
  if (!o.out.empty()) write_text_file(output_dir(o) / "bench.csv", bench_to_csv(rows));
  out << format_bench_table(rows);
  return 0;
}

void add_extraction_options(CLI::App* sub, Options& o, Given& g) {
  g.threshold = sub->add_option("--prominence-threshold", o.prominence_threshold,
                                "Discard extrema and constraint arcs below this salience (0.02)");
  g.epsilon = sub->add_option("--epsilon-rel", o.epsilon_rel,
                              "Constraint proximity as a fraction of the bound range (0.01)");
  g.classes = sub->add_option("--classes", o.classes, "Feature classes: max,min,root,ub,lb")
                  ->delimiter(',');
}

void add_kernel_options(CLI::App* sub, Options& o, Given& g) {
  g.soft_sim = sub->add_option("--soft-sim", o.soft_sim, "sim(max,ub) = sim(min,lb) (0.5)");
  sub->add_flag("--no-gap-weighting", o.no_gap, "Disable time-gap weighting");
  sub->add_flag("--no-salience-weighting", o.no_salience, "Disable salience weighting");
  g.max_len = sub->add_option("--max-subseq-len", o.max_subseq_len, "Ignore longer chains");
}

void add_metric_options(CLI::App* sub, Options& o, Given& g) {
  sub->add_option("--metric", o.metric, "feature or dtw")
      ->check(CLI::IsMember({"feature", "dtw"}));
  g.samples = sub->add_option("--samples", o.samples, "DTW sample count K (150)")->expected(1);
  add_extraction_options(sub, o, g);
  add_kernel_options(sub, o, g);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Feature-based motion plan clustering", "plancluster"};
  app.require_subcommand(1);
  Options o;
  Given ge, gd, gm, gc, gb;

  auto* extract_cmd = app.add_subcommand("extract", "Write one feature-sequence file per plan");
  extract_cmd->add_option("inputs", o.inputs, "Plan files, directories or manifests")->required();
  extract_cmd->add_option("--out", o.out, "Output directory");
  add_extraction_options(extract_cmd, o, ge);

  auto* distance_cmd = app.add_subcommand("distance", "Distance between two plans");
  distance_cmd->add_option("inputs", o.inputs, "Two plan files")->required();
  add_metric_options(distance_cmd, o, gd);

  auto* matrix_cmd = app.add_subcommand("matrix", "Pairwise distance matrix");
  matrix_cmd->add_option("inputs", o.inputs, "Plan files, directories or manifests")->required();
  matrix_cmd->add_option("--out", o.out, "Output directory (stdout when absent)");
  matrix_cmd->add_option("--threads", o.threads, "Worker threads (0: all cores)");
  add_metric_options(matrix_cmd, o, gm);

  auto* cluster_cmd = app.add_subcommand("cluster", "Single-linkage clustering");
  cluster_cmd->add_option("inputs", o.inputs, "Plan files, directories or manifests")->required();
  cluster_cmd->add_option("--out", o.out, "Output directory");
  cluster_cmd->add_option("--truth", o.truth, "Ground-truth labels CSV");
  cluster_cmd->add_option("--threads", o.threads, "Worker threads (0: all cores)");
  gc.cut_k = cluster_cmd->add_option("--cut-k", o.cut_k, "Number of clusters");
  gc.cut_height = cluster_cmd->add_option("--cut-height", o.cut_height, "Dendrogram cut height");
  add_metric_options(cluster_cmd, o, gc);

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Confusion matrix of a labelling");
  evaluate_cmd->add_option("labels", o.inputs, "Predicted labels CSV")->required();
  evaluate_cmd->add_option("--truth", o.truth, "Ground-truth labels CSV")->required();
  evaluate_cmd->add_option("--out", o.out, "Output directory");

  auto* generate_cmd = app.add_subcommand("generate", "Synthetic plan families");
  generate_cmd->add_option("--out", o.out, "Output directory")->required();
  generate_cmd->add_option("--family", o.family, "half-swings or saturation-arcs")
      ->check(CLI::IsMember({"half-swings", "saturation-arcs"}));
  generate_cmd->add_option("--params", o.parameters, "One cluster per value (1,2,3)")->delimiter(',');
  generate_cmd->add_option("--per-cluster", o.per_cluster, "Plans per cluster (20)");
  generate_cmd->add_option("--seed", o.seed, "Random seed (42)");
  generate_cmd->add_option("--amplitude-jitter", o.amplitude_jitter, "Relative amplitude jitter");
  generate_cmd->add_option("--phase-jitter", o.phase_jitter, "Relative phase jitter");
  generate_cmd->add_option("--time-warp-jitter", o.time_warp_jitter, "Relative time warp jitter");

  auto* bench_cmd = app.add_subcommand("bench", "Time extraction, kernel distance and DTW");
  bench_cmd->add_option("inputs", o.inputs, "Plan files, directories or manifests")->required();
  bench_cmd->add_option("--out", o.out, "Output directory for bench.csv");
  gb.samples =
      bench_cmd->add_option("--samples", o.samples, "Sample counts (100,1000,10000)")->delimiter(',');
  bench_cmd->add_option("--repetitions", o.repetitions, "Timed repetitions (20)");
  bench_cmd->add_option("--pairs", o.max_pairs, "Number of plan pairs to time (1)");
  add_extraction_options(bench_cmd, o, gb);
  add_kernel_options(bench_cmd, o, gb);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*extract_cmd) return cmd_extract(o, ge, out);
    if (*distance_cmd) return cmd_distance(o, gd, out);
    if (*matrix_cmd) return cmd_matrix(o, gm, out);
    if (*cluster_cmd) return cmd_cluster(o, gc, out);
    if (*evaluate_cmd) return cmd_evaluate(o, out);
    if (*generate_cmd) return cmd_generate(o, out);
    if (*bench_cmd) return cmd_bench(o, gb, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace plancluster::cli
