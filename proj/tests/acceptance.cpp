// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "plancluster/bench.hpp"
#include "plancluster/cluster.hpp"
#include "plancluster/data.hpp"
#include "plancluster/dtw.hpp"
#include "plancluster/features.hpp"
#include "plancluster/seqkernel.hpp"

using namespace plancluster;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Detail {
 public:
  template <class... Args>
  void add(const char* fmt, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    if (!text_.empty()) text_ += "; ";
    text_ += buf;
  }
  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

LabeledSequence word(const std::string& letters) {
  LabeledSequence s;
  for (std::size_t i = 0; i < letters.size(); ++i)
    s.push_back({std::string(1, letters[i]), static_cast<double>(i) / 10.0, 1.0});
  return s;
}

KernelConfig plain(SimilarityMatrix sim) {
  KernelConfig cfg;
  cfg.similarity = std::move(sim);
  cfg.use_gap_weighting = false;
  cfg.use_salience_weighting = false;
  return cfg;
}

SimilarityMatrix abc(double ab) { return SimilarityMatrix({"a", "b", "c"}, {1, ab, 0, ab, 1, 0, 0, 0, 1}); }

Outcome kernel_oracle() {
  oracle::Gen gen(1001);
  const std::vector<std::string> alphabet{"a", "b", "c"};
  double worst = 0.0;
  int bad = 0;
  for (int trial = 0; trial < 500; ++trial) {
    KernelConfig cfg;
    const int combo = trial % 8;
    cfg.similarity = combo & 1 ? abc(gen.uniform(0.05, 0.9)) : SimilarityMatrix::identity(alphabet);
    cfg.use_gap_weighting = combo & 2;
    cfg.use_salience_weighting = combo & 4;
    const auto x = gen.labeled(gen.index(0, 6), alphabet);
    const auto y = gen.labeled(gen.index(0, 6), alphabet);
    const double fast = kernel(x, y, cfg);
    const double slow = oracle::kernel_bruteforce(x, y, cfg);
    const double rel = std::abs(fast - slow) / std::max(std::abs(slow), 1e-300);
    const double err = slow == 0.0 ? std::abs(fast) : rel;
    worst = std::max(worst, err);
    if (err > 1e-9) ++bad;
  }
  Detail d;
  d.add("500 pairs, 8 weighting combinations, max relative error %.3g, %d above 1e-9", worst, bad);
  return {bad == 0, d.str()};
}

Outcome abb_fixture() {
  const auto abb = word("abb");
  const double self = kernel(abb, abb, plain(SimilarityMatrix::identity({"a", "b"})));
  const auto profile = oracle::subsequence_profile(abb);
  const std::map<std::vector<std::string>, double> expected{
      {{"a"}, 1}, {{"b"}, 2}, {{"a", "b"}, 2}, {{"b", "b"}, 1}, {{"a", "b", "b"}, 1}};
  Detail d;
  d.add("k(abb, abb) = %.17g, multiset %s", self, profile == expected ? "matches" : "differs");
  return {self == 11.0 && profile == expected, d.str()};
}

Outcome soft_ordering() {
  const auto cfg = plain(abc(0.7));
  const double ab = dimension_distance(word("ab"), word("aa"), cfg);
  const double ac = dimension_distance(word("ac"), word("aa"), cfg);
  Detail d;
  d.add("d(ab, aa) = %.15f, d(ac, aa) = %.15f", ab, ac);
  return {ab < ac && std::abs(ab - std::sqrt(1.2)) <= 1e-9 && std::abs(ac - 2.0) <= 1e-9, d.str()};
}

Outcome prominence_oracle() {
  oracle::Gen gen(1004);
  double worst = 0.0;
  int extrema = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto pp = trial % 2 ? gen.cubic(gen.index(1, 10)) : gen.linear(gen.index(1, 10));
    for (const auto& e : find_extrema(pp)) {
      const double algo = e.cls == FeatureClass::Max
                              ? peak_prominence(pp, e.time, e.time, e.value)
                              : peak_prominence(pp.negated(), e.time, e.time, -e.value);
      worst = std::max(worst, std::abs(algo - oracle::prominence_dense(pp, e.time, e.cls, 10000)));
      ++extrema;
    }
  }
  Detail d;
  d.add("200 splines, %d extrema, max absolute error %.3g", extrema, worst);
  return {worst <= 1e-6 && extrema > 0, d.str()};
}

Outcome metric_sanity() {
  oracle::Gen gen(1005);
  auto random_plan = [&] {
    return std::vector<FeatureSequence>{gen.features(gen.index(0, 8), "s0"),
                                        gen.features(gen.index(0, 8), "c0")};
  };
  bool exact = true;
  Detail d;
  int off_violations = 0;
  for (bool gap : {false, true}) {
    KernelConfig cfg;
    cfg.use_gap_weighting = gap;
    int violations = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const auto a = random_plan(), b = random_plan(), c = random_plan();
      const double ab = plan_distance(a, b, cfg), ba = plan_distance(b, a, cfg);
      const double bc = plan_distance(b, c, cfg), ac = plan_distance(a, c, cfg);
      exact = exact && ab == ba && plan_distance(a, a, cfg) == 0.0 && ab >= 0.0 && bc >= 0.0 &&
              ac >= 0.0;
      if (ac > ab + bc + 1e-9 || ab > ac + bc + 1e-9 || bc > ab + ac + 1e-9) ++violations;
    }
    if (!gap) off_violations = violations;
    d.add("triangle violations with gap weighting %s: %d/100", gap ? "on" : "off", violations);
  }
  d.add("symmetry, identity, non-negativity %s", exact ? "exact" : "broken");
  return {exact && off_violations == 0, d.str()};
}

Outcome synthetic_clustering() {
  SyntheticFamilySpec spec;
  spec.parameters = {1, 2, 3};
  spec.plans_per_cluster = 20;
  const auto plans = generate_synthetic(spec);
  ExtractionConfig ex;
  ex.classes = {FeatureClass::Max, FeatureClass::Min, FeatureClass::Root};
  std::vector<std::vector<FeatureSequence>> features;
  std::vector<std::string> names, truth;
  for (const auto& p : plans) {
    features.push_back(extract(p.plan, ex));
    names.push_back(p.plan.name());
    truth.push_back(p.label);
  }
  const KernelConfig kc;
  const auto d = pairwise_matrix(names, [&](std::size_t i, std::size_t j) {
    return plan_distance(features[i], features[j], kc);
  });
  const auto labels = cut(single_linkage(d), CutCriterion::clusters(3));
  const auto report = confusion(labels, labels_from_names(names, truth));
  Detail det;
  det.add("%zu plans, accuracy %.4f (%zu/%zu)", plans.size(), report.accuracy, report.correct,
          plans.size());
  return {report.accuracy >= 0.95, det.str()};
}

// A plan defined by 10 linear knots is reproduced exactly by any uniform
// resampling with K - 1 divisible by 9. Arcs are found on check points, so
// the ends stay off the bounds and every saturated plateau is entered and
// left with equal slopes; all K then share the same features.
MotionPlan knot_plan(const std::string& name, const std::vector<double>& s, const std::vector<double>& c) {
  std::vector<double> t(s.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = 2.0 * static_cast<double>(i) / 9.0;
  t.back() = 2.0;
  return MotionPlan(name, 2.0, {{from_samples(t, s), DimensionBounds(-1, 1)}},
                    {{from_samples(t, c), DimensionBounds(-1, 1)}});
}

bool same_features(const std::vector<FeatureSequence>& a, const std::vector<FeatureSequence>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t d = 0; d < a.size(); ++d) {
    if (a[d].elements.size() != b[d].elements.size()) return false;
    for (std::size_t i = 0; i < a[d].elements.size(); ++i) {
      const auto& x = a[d].elements[i];
      const auto& y = b[d].elements[i];
      if (x.cls != y.cls || std::abs(x.time - y.time) > 1e-9 || std::abs(x.salience - y.salience) > 1e-9)
        return false;
    }
  }
  return true;
}

Outcome runtime_decoupling() {
  const auto a = knot_plan("a", {0.8, 0.3, -0.5, -0.9, -0.2, 0.6, 0.9, 0.4, -0.3, -0.7},
                           {0.2, 1, 1, 0.2, -0.6, -1, -1, -0.6, 0.1, 0.7});
  const auto b = knot_plan("b", {-0.6, 0.2, 0.9, 0.5, -0.4, -0.8, 0.1, 0.7, 0.2, -0.5},
                           {-0.7, -0.3, 0.5, 1, 1, 0.5, -0.2, -1, -1, -0.2});
  const ExtractionConfig ex;
  const KernelConfig kc;
  const std::vector<std::size_t> ks{100, 1000, 10000};
  std::vector<double> t_kernel, t_dtw, t_extract;
  std::vector<std::vector<FeatureSequence>> ref_a, ref_b;
  bool identical = true;
  Detail d;
  for (std::size_t k : ks) {
    const auto ra = resample(a, k), rb = resample(b, k);
    const auto fa = extract(ra, ex), fb = extract(rb, ex);
    if (ref_a.empty()) {
      ref_a.push_back(fa);
      ref_b.push_back(fb);
    }
    identical = identical && same_features(fa, ref_a[0]) && same_features(fb, ref_b[0]);
    const auto sa = sample(ra, k), sb = sample(rb, k);
    volatile double sink = 0.0;
    t_extract.push_back(median_seconds([&] { sink = sink + static_cast<double>(extract(ra, ex).size()); },
                                       k >= 10000 ? 5 : 11, 1e-3));
    t_kernel.push_back(median_seconds([&] { sink = sink + plan_distance(fa, fb, kc); }, 21, 5e-3));
    t_dtw.push_back(median_seconds([&] { sink = sink + dtw_distance(sa, sb); }, k >= 10000 ? 5 : 11, 1e-3));
    std::size_t na = 0, nb = 0;
    for (const auto& s : fa) na += s.elements.size();
    for (const auto& s : fb) nb += s.elements.size();
    d.add("K=%zu: features %zu/%zu, extract %.3g ms (precomputation), kernel %.3g us, dtw %.3g ms", k,
          na, nb, t_extract.back() * 1e3, t_kernel.back() * 1e6, t_dtw.back() * 1e3);
  }
  const auto [kmin, kmax] = std::minmax_element(t_kernel.begin(), t_kernel.end());
  const double kernel_ratio = *kmax / *kmin;
  const double dtw_ratio = t_dtw.back() / t_dtw.front();
  d.add("kernel max/min %.3g (< 2), dtw K=10000/K=100 %.3g (>= 25), features %s", kernel_ratio,
        dtw_ratio, identical ? "identical across K" : "DIFFER across K");
  return {identical && kernel_ratio < 2.0 && dtw_ratio >= 25.0, d.str()};
}

Outcome golden_fixtures() {
  const auto path = std::filesystem::path(TEST_DATA_DIR) / "mixed_features.json";
  const std::string text = read_text_file(path);
  const auto features = parse_features_json(text, path.string());
  const bool round_trip = features_to_json(features) == text && features.dimensions.size() == 1 &&
                          features.dimensions[0].elements.size() == 8;

  const DistanceMatrix m({"0", "1", "2"}, {0, 1, 5, 1, 0, 5, 5, 5, 0});
  const auto dend = single_linkage(m);
  const bool merges = dend.merges == std::vector<Merge>{{0, 1, 1.0}, {3, 2, 5.0}};
  const auto labels = cut(dend, CutCriterion::at_height(2.0));
  const bool split = labels.assignment == std::vector<std::size_t>{0, 0, 1};
  Detail d;
  d.add("feature JSON round trip %s, merges %s, height-2 cut %s, newick %s",
        round_trip ? "byte-identical" : "differs", merges ? "as traced" : "differ",
        split ? "{0,1},{2}" : "wrong", dendrogram_to_newick(dend).c_str());
  return {round_trip && merges && split, d.str()};
}

SampledSeries series(std::vector<double> v) {
  SampledSeries s;
  s.dims = 1;
  s.steps = v.size();
  s.values = std::move(v);
  s.dimension_ids = {"s0"};
  return s;
}

Outcome dtw_cases() {
  const double first = dtw_distance(series({0, 0, 1}), series({0, 1, 1}));
  const double second = dtw_distance(series({0, 0}), series({1, 1}));
  Detail d;
  d.add("(0,0,1) vs (0,1,1) = %.17g, (0,0) vs (1,1) = %.17g", first, second);
  return {first == 0.0 && second == 2.0, d.str()};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double limit_seconds;
  };
  const std::vector<Criterion> criteria{
      {"kernel matches brute-force enumeration", kernel_oracle, 10.0},
      {"abb self-kernel and subsequence multiset", abb_fixture, 0.0},
      {"soft matching ordering and values", soft_ordering, 0.0},
      {"prominence matches dense-grid oracle", prominence_oracle, 0.0},
      {"metric sanity", metric_sanity, 0.0},
      {"synthetic half-swing clustering", synthetic_clustering, 60.0},
      {"kernel runtime independent of sample count", runtime_decoupling, 0.0},
      {"golden fixtures", golden_fixtures, 0.0},
      {"DTW hand-traced cases", dtw_cases, 0.0},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_seconds > 0.0 && secs >= c.limit_seconds) {
      o.pass = false;
      o.detail += "; over the " + std::to_string(static_cast<int>(c.limit_seconds)) + " s limit";
    }
    if (!o.pass) ++failures;
    std::printf("%s [%zu] %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, c.name, secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
