#include "plancluster/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

#include "plancluster/data.hpp"
#include "plancluster/dtw.hpp"
#include "plancluster/errors.hpp"

namespace plancluster {

namespace {

volatile double g_sink = 0.0;

std::size_t feature_count(const std::vector<FeatureSequence>& seqs) {
  std::size_t n = 0;
  for (const auto& s : seqs) n += s.elements.size();
  return n;
}

PiecewisePolynomial resample_dimension(const PiecewisePolynomial& pp, double t_f,
                                       std::size_t samples) {
  std::vector<double> t(samples), v(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    t[i] = t_f * static_cast<double>(i) / static_cast<double>(samples - 1);
    if (i + 1 == samples) t[i] = t_f;
    v[i] = pp.evaluate(std::clamp(t[i], pp.start(), pp.end()));
  }
  return from_samples(t, v);
}

}  // namespace

void BenchConfig::validate() const {
  if (sample_counts.empty()) throw ConfigError("bench needs at least one sample count");
  for (auto k : sample_counts)
    if (k < 2) throw ConfigError("bench sample counts must be >= 2");
  if (repetitions < 1) throw ConfigError("bench repetitions must be >= 1");
  if (max_pairs < 1) throw ConfigError("bench max_pairs must be >= 1");
  extraction.validate();
  kernel.validate();
}

MotionPlan resample(const MotionPlan& plan, std::size_t samples) {
  if (samples < 2) throw ConfigError("resampling needs at least 2 samples");
  auto convert = [&](const std::vector<Dimension>& dims) {
    std::vector<Dimension> out;
    for (const auto& d : dims)
      out.push_back({resample_dimension(d.trajectory, plan.t_f(), samples), d.bounds});
    return out;
  };
  return MotionPlan(plan.name(), plan.t_f(), convert(plan.state()), convert(plan.control()));
}

double median_seconds(const std::function<void()>& fn, std::size_t repetitions,
                      double min_batch_seconds) {
  using clock = std::chrono::steady_clock;
  auto elapsed = [](clock::time_point a, clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
  };
  // Calibrate the batch size so that short calls are not dominated by
  // clock resolution.
  std::size_t batch = 1;
  for (;;) {
    const auto t0 = clock::now();
    for (std::size_t i = 0; i < batch; ++i) fn();
    const double s = elapsed(t0, clock::now());
    if (s >= min_batch_seconds || batch >= (std::size_t{1} << 20)) break;
    batch *= 2;
  }
  std::vector<double> times;
  times.reserve(repetitions);
  for (std::size_t r = 0; r < repetitions; ++r) {
    const auto t0 = clock::now();
    for (std::size_t i = 0; i < batch; ++i) fn();
    times.push_back(elapsed(t0, clock::now()) / static_cast<double>(batch));
  }
  std::sort(times.begin(), times.end());
  const std::size_t n = times.size();
  return n % 2 == 1 ? times[n / 2] : 0.5 * (times[n / 2 - 1] + times[n / 2]);
}

std::vector<BenchRow> run_bench(const std::vector<MotionPlan>& plans, const BenchConfig& cfg) {
  cfg.validate();
  if (plans.size() < 2) throw ConfigError("bench needs at least 2 plans");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < plans.size() && pairs.size() < cfg.max_pairs; ++i)
    for (std::size_t j = i + 1; j < plans.size() && pairs.size() < cfg.max_pairs; ++j)
      pairs.emplace_back(i, j);

  std::vector<BenchRow> rows;
  for (auto [i, j] : pairs) {
    const std::string pair = plans[i].name() + "|" + plans[j].name();
    for (std::size_t k : cfg.sample_counts) {
      const MotionPlan a = resample(plans[i], k);
      const MotionPlan b = resample(plans[j], k);
      const auto fa = extract(a, cfg.extraction);
      const auto fb = extract(b, cfg.extraction);
      const auto sa = sample(a, k);
      const auto sb = sample(b, k);
      const std::size_t na = feature_count(fa);
      const std::size_t nb = feature_count(fb);

      const double t_extract = median_seconds(
          [&] {
            g_sink = g_sink + static_cast<double>(extract(a, cfg.extraction).size() +
                                                  extract(b, cfg.extraction).size());
          },
          cfg.repetitions, cfg.min_batch_seconds);
      const double t_kernel = median_seconds(
          [&] { g_sink = g_sink + plan_distance(fa, fb, cfg.kernel); }, cfg.repetitions,
          cfg.min_batch_seconds);
      const double t_dtw = median_seconds([&] { g_sink = g_sink + dtw_distance(sa, sb); },
                                          cfg.repetitions, cfg.min_batch_seconds);
      rows.push_back({pair, k, "extract", t_extract, na, nb});
      rows.push_back({pair, k, "kernel", t_kernel, na, nb});
      rows.push_back({pair, k, "dtw", t_dtw, na, nb});
    }
  }
  return rows;
}

std::string bench_to_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << "pair,samples,metric,median_seconds,features_a,features_b\n";
  for (const auto& r : rows)
    os << r.pair << ',' << r.samples << ',' << r.metric << ',' << format_double(r.median_seconds)
       << ',' << r.features_a << ',' << r.features_b << '\n';
  return os.str();
}

std::string format_bench_table(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-32s %8s %-8s %14s %6s %6s\n", "pair", "samples", "metric",
                "median [us]", "#f(a)", "#f(b)");
  os << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-32s %8zu %-8s %14.3f %6zu %6zu\n", r.pair.c_str(),
                  r.samples, r.metric.c_str(), r.median_seconds * 1e6, r.features_a,
                  r.features_b);
    os << line;
  }
  return os.str();
}

}  // namespace plancluster
