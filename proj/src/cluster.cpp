#include "plancluster/cluster.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "plancluster/errors.hpp"

namespace plancluster {

namespace {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

[[noreturn]] void rethrow_for_pair(std::exception_ptr err, const std::string& a,
                                   const std::string& b) {
  const std::string where = "distance(" + a + ", " + b + "): ";
  try {
    std::rethrow_exception(err);
  } catch (const FormatError& e) {
    throw FormatError(where + e.what());
  } catch (const DataError& e) {
    throw DataError(where + e.what());
  } catch (const DomainError& e) {
    throw DomainError(where + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(where + e.what());
  } catch (const IoError& e) {
    throw IoError(where + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(where + e.what());
  }
}

// Minimum-cost perfect assignment on a square cost matrix (Kuhn-Munkres with
// potentials). Returns the column assigned to each row.
std::vector<std::size_t> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace

DistanceMatrix::DistanceMatrix(std::vector<std::string> ids, std::vector<double> entries)
    : ids_(std::move(ids)), entries_(std::move(entries)) {
  const std::size_t n = ids_.size();
  if (entries_.size() != n * n)
    throw DataError("distance matrix needs " + std::to_string(n * n) + " entries, got " +
                    std::to_string(entries_.size()));
  for (std::size_t i = 0; i < n; ++i) {
    if ((*this)(i, i) != 0.0) throw DataError("distance matrix diagonal must be 0 at " + ids_[i]);
    for (std::size_t j = 0; j < n; ++j) {
      const double v = (*this)(i, j);
      if (!std::isfinite(v) || v < 0.0)
        throw DataError("distance (" + ids_[i] + ", " + ids_[j] + ") must be finite and >= 0");
      if (v != (*this)(j, i))
        throw DataError("distance matrix not symmetric at (" + ids_[i] + ", " + ids_[j] + ")");
    }
  }
}

DistanceMatrix pairwise_matrix(std::vector<std::string> ids, const PairMetric& metric,
                               unsigned threads) {
  const std::size_t n = ids.size();
  if (n < 2) throw ConfigError("need at least 2 items for a distance matrix");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

  std::vector<double> values(pairs.size(), 0.0);
  std::vector<std::exception_ptr> errors(pairs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < pairs.size(); k = next++) {
      try {
        values[k] = metric(pairs[k].first, pairs[k].second);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, pairs.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::vector<double> entries(n * n, 0.0);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    if (errors[k]) rethrow_for_pair(errors[k], ids[i], ids[j]);
    if (!std::isfinite(values[k]) || values[k] < 0.0)
      throw DataError("distance(" + ids[i] + ", " + ids[j] + ") is not a finite non-negative value");
    entries[i * n + j] = entries[j * n + i] = values[k];
  }
  return {std::move(ids), std::move(entries)};
}

Dendrogram single_linkage(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  Dendrogram out{d.ids(), {}};
  if (n < 2) return out;
  // Clusters are keyed by their smallest member; dist rows are kept for
  // active representatives only.
  std::vector<double> dist = d.entries();
  std::vector<char> active(n, 1);
  std::vector<std::size_t> cluster_id(n);
  std::iota(cluster_id.begin(), cluster_id.end(), 0);

  for (std::size_t step = 0; step + 1 < n; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t ba = 0, bb = 0;
    for (std::size_t a = 0; a < n; ++a) {
      if (!active[a]) continue;
      for (std::size_t b = a + 1; b < n; ++b) {
        if (!active[b]) continue;
        if (dist[a * n + b] < best) {
          best = dist[a * n + b];
          ba = a;
          bb = b;
        }
      }
    }
    out.merges.push_back({cluster_id[ba], cluster_id[bb], best});
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == ba || k == bb) continue;
      const double v = std::min(dist[ba * n + k], dist[bb * n + k]);
      dist[ba * n + k] = dist[k * n + ba] = v;
    }
    active[bb] = 0;
    cluster_id[ba] = n + step;
  }
  return out;
}

ClusterLabels labels_from_names(std::vector<std::string> item_ids,
                                const std::vector<std::string>& names) {
  if (item_ids.size() != names.size())
    throw ConfigError("label count " + std::to_string(names.size()) + " does not match " +
                      std::to_string(item_ids.size()) + " items");
  ClusterLabels out{std::move(item_ids), {}, {}};
  std::map<std::string, std::size_t> index;
  for (const auto& name : names) {
    auto [it, inserted] = index.emplace(name, out.cluster_names.size());
    if (inserted) out.cluster_names.push_back(name);
    out.assignment.push_back(it->second);
  }
  return out;
}

ClusterLabels cut(const Dendrogram& dend, const CutCriterion& criterion) {
  const std::size_t n = dend.leaf_ids.size();
  if (n == 0) throw ConfigError("cannot cut an empty dendrogram");
  if (criterion.num_clusters.has_value() == criterion.height.has_value())
    throw ConfigError("cut needs exactly one of cluster count or height");
  std::size_t applied = 0;
  if (criterion.num_clusters) {
    const std::size_t k = *criterion.num_clusters;
    if (k < 1 || k > n)
      throw ConfigError("cluster count " + std::to_string(k) + " outside [1, " +
                        std::to_string(n) + "]");
    applied = n - k;
  } else {
    const double h = *criterion.height;
    if (!(h >= 0.0)) throw ConfigError("cut height must be >= 0");
    while (applied < dend.merges.size() && dend.merges[applied].height <= h) ++applied;
  }

  // Representative leaf of every cluster id created so far.
  std::vector<std::size_t> leaf_of(n + dend.merges.size());
  std::iota(leaf_of.begin(), leaf_of.begin() + static_cast<std::ptrdiff_t>(n), 0);
  DisjointSets sets(n);
  for (std::size_t k = 0; k < dend.merges.size(); ++k) {
    const auto& m = dend.merges[k];
    if (m.a >= n + k || m.b >= n + k) throw DataError("dendrogram merge refers to a future cluster");
    leaf_of[n + k] = leaf_of[m.a];
    if (k < applied) sets.unite(leaf_of[m.a], leaf_of[m.b]);
  }

  ClusterLabels out{dend.leaf_ids, std::vector<std::size_t>(n), {}};
  std::map<std::size_t, std::size_t> label_of_root;
  for (std::size_t i = 0; i < n; ++i) {
    const auto root = sets.find(i);
    auto [it, inserted] = label_of_root.emplace(root, out.cluster_names.size());
    if (inserted) out.cluster_names.push_back("C" + std::to_string(out.cluster_names.size() + 1));
    out.assignment[i] = it->second;
  }
  return out;
}

ConfusionReport confusion(const ClusterLabels& predicted, const ClusterLabels& truth) {
  if (predicted.item_ids != truth.item_ids)
    throw ConfigError("predicted and ground-truth labels cover different items");
  ConfusionReport r;
  r.truth_names = truth.cluster_names;
  r.predicted_names = predicted.cluster_names;
  const std::size_t nt = truth.cluster_count(), np = predicted.cluster_count();
  r.counts.assign(nt, std::vector<std::size_t>(np, 0));
  for (std::size_t i = 0; i < truth.assignment.size(); ++i)
    ++r.counts.at(truth.assignment[i]).at(predicted.assignment[i]);

  const std::size_t size = std::max(nt, np);
  std::size_t peak = 0;
  for (const auto& row : r.counts)
    for (auto c : row) peak = std::max(peak, c);
  std::vector<std::vector<double>> cost(size, std::vector<double>(size, static_cast<double>(peak)));
  for (std::size_t t = 0; t < nt; ++t)
    for (std::size_t p = 0; p < np; ++p)
      cost[t][p] = static_cast<double>(peak - r.counts[t][p]);
  const auto assign = min_cost_assignment(cost);

  r.matching.assign(nt, std::nullopt);
  for (std::size_t t = 0; t < nt; ++t) {
    if (assign[t] < np) {
      r.matching[t] = assign[t];
      r.correct += r.counts[t][assign[t]];
    }
  }
  const auto items = truth.assignment.size();
  r.accuracy = items ? static_cast<double>(r.correct) / static_cast<double>(items) : 1.0;
  return r;
}

std::string format_confusion(const ConfusionReport& r) {
  const std::size_t nt = r.truth_names.size(), np = r.predicted_names.size();
  std::vector<char> shown(np, 0);
  std::vector<std::string> header{"GT"};
  for (std::size_t t = 0; t < nt; ++t) {
    header.push_back("C" + std::to_string(t + 1));
    if (r.matching[t]) shown[*r.matching[t]] = 1;
  }
  const bool has_rest = std::count(shown.begin(), shown.end(), 0) > 0;
  if (has_rest) header.push_back("...");

  std::vector<std::vector<std::string>> rows{header};
  for (std::size_t t = 0; t < nt; ++t) {
    std::vector<std::string> row{r.truth_names[t]};
    for (std::size_t c = 0; c < nt; ++c) {
      const auto cnt = r.matching[c] ? r.counts[t][*r.matching[c]] : 0;
      row.push_back(cnt ? std::to_string(cnt) : "");
    }
    if (has_rest) {
      std::size_t rest = 0;
      for (std::size_t p = 0; p < np; ++p)
        if (!shown[p]) rest += r.counts[t][p];
      row.push_back(rest ? std::to_string(rest) : "");
    }
    rows.push_back(std::move(row));
  }

  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::ostringstream os;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      os << (c ? "  " : "") << std::setw(static_cast<int>(width[c]))
         << (c ? std::right : std::left) << row[c];
    }
    os << '\n';
  }
  std::size_t total = 0;
  for (const auto& row : r.counts)
    for (auto v : row) total += v;
  os << "predicted clusters: " << np << ", correctly clustered: " << r.correct << '/' << total
     << ", accuracy: " << std::setprecision(4) << r.accuracy << '\n';
  return os.str();
}

}  // namespace plancluster
