#include "plancluster/seqkernel.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "plancluster/errors.hpp"

namespace plancluster {

namespace {

struct Item {
  std::size_t symbol;
  double time;
  double weight;
  auto key() const { return std::tie(symbol, time, weight); }
};

std::vector<Item> to_items(const LabeledSequence& seq, const KernelConfig& cfg) {
  std::vector<Item> out;
  out.reserve(seq.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto& e = seq[i];
    if (cfg.use_gap_weighting) {
      if (!(e.time >= 0.0 && e.time <= 1.0))
        throw ConfigError("element " + std::to_string(i) +
                          ": time must lie in [0, 1] for gap weighting");
      if (e.time < prev)
        throw ConfigError("element " + std::to_string(i) + ": times must be non-decreasing");
      prev = e.time;
    }
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight))
      throw ConfigError("element " + std::to_string(i) + ": weight must be finite and >= 0");
    out.push_back({cfg.similarity.index_of(e.label), e.time, e.weight});
  }
  return out;
}

bool lexicographically_less(const std::vector<Item>& a, const std::vector<Item>& b) {
  return std::lexicographical_compare(
      a.begin(), a.end(), b.begin(), b.end(),
      [](const Item& l, const Item& r) { return l.key() < r.key(); });
}

// Dynamic program over K_p(i, j), the weighted count of length-p chain pairs
// ending at x_i and y_j.
double kernel_items(const std::vector<Item>& x, const std::vector<Item>& y,
                    const KernelConfig& cfg) {
  const std::size_t n = x.size(), m = y.size();
  if (n == 0 || m == 0) return 0.0;
  std::size_t max_len = std::min(n, m);
  if (cfg.max_subseq_len) max_len = std::min(max_len, *cfg.max_subseq_len);

  std::vector<double> base(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      double v = cfg.similarity(x[i].symbol, y[j].symbol);
      if (cfg.use_salience_weighting) v *= x[i].weight * y[j].weight;
      base[i * m + j] = v;
    }

  std::vector<double> cur = base;
  double total = 0.0;
  for (double v : cur) total += v;

  std::vector<double> next(n * m);
  std::vector<double> row_prefix, strict_prefix;
  for (std::size_t p = 2; p <= max_len; ++p) {
    if (cfg.use_gap_weighting) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          const double b = base[i * m + j];
          double acc = 0.0;
          if (b != 0.0) {
            for (std::size_t ip = 0; ip < i; ++ip)
              for (std::size_t jp = 0; jp < j; ++jp) {
                const double k = cur[ip * m + jp];
                if (k == 0.0) continue;
                acc += gap_weight(x[ip].time, x[i].time, y[jp].time, y[j].time) * k;
              }
          }
          next[i * m + j] = b * acc;
        }
    } else {
      // Sum over i' < i, j' < j via row prefixes then column accumulation.
      row_prefix.assign(n * (m + 1), 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
          row_prefix[i * (m + 1) + j + 1] = row_prefix[i * (m + 1) + j] + cur[i * m + j];
      strict_prefix.assign((n + 1) * (m + 1), 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= m; ++j)
          strict_prefix[(i + 1) * (m + 1) + j] =
              strict_prefix[i * (m + 1) + j] + row_prefix[i * (m + 1) + j];
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
          next[i * m + j] = base[i * m + j] * strict_prefix[i * (m + 1) + j];
    }
    double layer = 0.0;
    for (double v : next) layer += v;
    total += layer;
    if (layer == 0.0) break;
    std::swap(cur, next);
  }
  return total;
}

double kernel_canonical(std::vector<Item> x, std::vector<Item> y, const KernelConfig& cfg) {
  // Fixed argument order makes k(x, y) and k(y, x) the same computation.
  if (lexicographically_less(y, x)) std::swap(x, y);
  return kernel_items(x, y, cfg);
}

}  // namespace

SimilarityMatrix::SimilarityMatrix(std::vector<std::string> labels,
                                   std::vector<double> entries)
    : labels_(std::move(labels)), entries_(std::move(entries)) {
  const std::size_t n = labels_.size();
  if (n == 0) throw ConfigError("similarity matrix needs at least one label");
  if (entries_.size() != n * n)
    throw ConfigError("similarity matrix needs " + std::to_string(n * n) +
                      " entries, got " + std::to_string(entries_.size()));
  for (std::size_t i = 0; i < n; ++i) {
    if (!index_.emplace(labels_[i], i).second)
      throw ConfigError("duplicate similarity label '" + labels_[i] + "'");
    if (entries_[i * n + i] != 1.0)
      throw ConfigError("similarity diagonal must be 1 for '" + labels_[i] + "'");
    for (std::size_t j = 0; j < n; ++j) {
      const double v = entries_[i * n + j];
      if (!(v >= 0.0 && v <= 1.0))
        throw ConfigError("similarity entries must lie in [0, 1]");
      if (v != entries_[j * n + i])
        throw ConfigError("similarity matrix is not symmetric at ('" + labels_[i] +
                          "', '" + labels_[j] + "')");
    }
  }
  // Cholesky factorization as the positive-definiteness test.
  std::vector<double> l(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double d = entries_[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
    if (!(d > 1e-12)) throw ConfigError("similarity matrix is not positive definite");
    const double ljj = std::sqrt(d);
    l[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = entries_[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = s / ljj;
    }
  }
}

SimilarityMatrix SimilarityMatrix::identity(std::vector<std::string> labels) {
  const std::size_t n = labels.size();
  std::vector<double> e(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) e[i * n + i] = 1.0;
  return {std::move(labels), std::move(e)};
}

SimilarityMatrix SimilarityMatrix::feature_default(double sigma) {
  std::vector<std::string> labels;
  for (auto c : {FeatureClass::Max, FeatureClass::Min, FeatureClass::Root,
                 FeatureClass::UpperBound, FeatureClass::LowerBound})
    labels.emplace_back(to_string(c));
  const std::size_t n = labels.size();
  std::vector<double> e(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) e[i * n + i] = 1.0;
  auto set = [&](FeatureClass a, FeatureClass b) {
    const auto i = static_cast<std::size_t>(a), j = static_cast<std::size_t>(b);
    e[i * n + j] = e[j * n + i] = sigma;
  };
  set(FeatureClass::Max, FeatureClass::UpperBound);
  set(FeatureClass::Min, FeatureClass::LowerBound);
  return {std::move(labels), std::move(e)};
}

std::size_t SimilarityMatrix::index_of(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end())
    throw ConfigError("label '" + std::string(label) + "' is not in the similarity alphabet");
  return it->second;
}

void KernelConfig::validate() const {
  if (max_subseq_len && *max_subseq_len < 1)
    throw ConfigError("max subsequence length must be >= 1");
}

LabeledSequence as_labeled(const FeatureSequence& seq) {
  LabeledSequence out;
  out.reserve(seq.elements.size());
  for (const auto& e : seq.elements)
    out.push_back({std::string(to_string(e.cls)), e.time, e.salience});
  return out;
}

double gap_weight(double t_x_prev, double t_x, double t_y_prev, double t_y) {
  return 1.0 - std::abs((t_x - t_x_prev) - (t_y - t_y_prev));
}

double kernel(const LabeledSequence& x, const LabeledSequence& y, const KernelConfig& cfg) {
  cfg.validate();
  return kernel_canonical(to_items(x, cfg), to_items(y, cfg), cfg);
}

double kernel(const FeatureSequence& x, const FeatureSequence& y, const KernelConfig& cfg) {
  return kernel(as_labeled(x), as_labeled(y), cfg);
}

double dimension_distance(const LabeledSequence& x, const LabeledSequence& y,
                          const KernelConfig& cfg) {
  cfg.validate();
  const auto xi = to_items(x, cfg);
  const auto yi = to_items(y, cfg);
  const double kxx = kernel_items(xi, xi, cfg);
  const double kyy = kernel_items(yi, yi, cfg);
  const double kxy = kernel_canonical(xi, yi, cfg);
  // Sum in a fixed order so d(x, y) == d(y, x) exactly.
  const double self = std::min(kxx, kyy) + std::max(kxx, kyy);
  return std::sqrt(std::max(0.0, self - 2.0 * kxy));
}

double dimension_distance(const FeatureSequence& x, const FeatureSequence& y,
                          const KernelConfig& cfg) {
  return dimension_distance(as_labeled(x), as_labeled(y), cfg);
}

double plan_distance(std::span<const FeatureSequence> a,
                     std::span<const FeatureSequence> b, const KernelConfig& cfg) {
  if (a.size() != b.size())
    throw ConfigError("dimension count mismatch: " + std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()));
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].dimension_id != b[k].dimension_id)
      throw ConfigError("dimension id mismatch at " + std::to_string(k) + ": '" +
                        a[k].dimension_id + "' vs '" + b[k].dimension_id + "'");
    const double d = dimension_distance(a[k], b[k], cfg);
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace plancluster
