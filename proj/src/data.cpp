#include "plancluster/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "json.hpp"
#include "plancluster/errors.hpp"

namespace plancluster {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(source + ": invalid JSON: " + e.what());
  }
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw FormatError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(where + ": missing field '" + key + "'");
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw FormatError(where + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw FormatError(where + ": expected a finite number");
  return d;
}

std::string string_field(const json& v, const std::string& where) {
  if (!v.is_string()) throw FormatError(where + ": expected a string");
  return v.get<std::string>();
}

const json& array(const json& v, const std::string& where) {
  if (!v.is_array()) throw FormatError(where + ": expected an array");
  return v;
}

// Rethrows construction errors with the JSON location prepended.
template <class F>
auto located(const std::string& where, F&& make) {
  try {
    return make();
  } catch (const FormatError& e) {
    throw FormatError(where + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(where + ": " + e.what());
  }
}

std::vector<Dimension> parse_dimensions(const json& arr, const std::string& where) {
  std::vector<Dimension> out;
  array(arr, where);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    const auto& d = arr[i];
    std::optional<DimensionBounds> bounds;
    if (d.is_object() && d.contains("bounds") && !d["bounds"].is_null()) {
      const auto& b = array(d["bounds"], at + ".bounds");
      if (b.size() != 2) throw FormatError(at + ".bounds: expected [lower, upper]");
      bounds = located(at + ".bounds", [&] {
        return DimensionBounds(number(b[0], at + ".bounds[0]"), number(b[1], at + ".bounds[1]"));
      });
    }
    const auto& deg = field(d, "degree", at);
    if (!deg.is_number_integer()) throw FormatError(at + ".degree: expected 1 or 3");
    const int degree = deg.get<int>();
    const auto& bp = array(field(d, "breakpoints", at), at + ".breakpoints");
    std::vector<double> breakpoints;
    for (std::size_t k = 0; k < bp.size(); ++k)
      breakpoints.push_back(number(bp[k], at + ".breakpoints[" + std::to_string(k) + "]"));
    for (std::size_t k = 1; k < breakpoints.size(); ++k)
      if (!(breakpoints[k] > breakpoints[k - 1]))
        throw FormatError(at + ".breakpoints[" + std::to_string(k) +
                          "]: breakpoints must be strictly increasing");
    const auto& cs = array(field(d, "coeffs", at), at + ".coeffs");
    std::vector<std::vector<double>> coeffs;
    for (std::size_t s = 0; s < cs.size(); ++s) {
      const std::string cat = at + ".coeffs[" + std::to_string(s) + "]";
      std::vector<double> seg;
      for (std::size_t k = 0; k < array(cs[s], cat).size(); ++k)
        seg.push_back(number(cs[s][k], cat + "[" + std::to_string(k) + "]"));
      coeffs.push_back(std::move(seg));
    }
    auto pp = located(at, [&] {
      return PiecewisePolynomial(std::move(breakpoints), std::move(coeffs), degree);
    });
    out.push_back({std::move(pp), bounds});
  }
  return out;
}

ordered_json dimensions_to_json(const std::vector<Dimension>& dims) {
  ordered_json arr = ordered_json::array();
  for (const auto& d : dims) {
    ordered_json o;
    o["bounds"] = d.bounds ? ordered_json::array({d.bounds->lower, d.bounds->upper})
                           : ordered_json(nullptr);
    o["degree"] = d.trajectory.degree();
    o["breakpoints"] = d.trajectory.breakpoints();
    o["coeffs"] = d.trajectory.all_coeffs();
    arr.push_back(std::move(o));
  }
  return arr;
}

// Splits one CSV line on commas (no quoting).
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  for (auto& s : out) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  }
  return out;
}

std::vector<std::string> csv_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream is(text);
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    first = false;
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

double parse_cell(const std::string& cell, const std::string& where) {
  if (cell.empty()) throw FormatError(where + ": missing value");
  double v = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw FormatError(where + ": not a number: '" + cell + "'");
  return v;
}

std::string newick_name(const std::string& name) {
  if (name.find_first_of(" \t\n()[]':;,") == std::string::npos && !name.empty()) return name;
  std::string out = "'";
  for (char c : name) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

std::string csv_name(const std::string& name, const std::string& what) {
  if (name.find_first_of(",\n\r") != std::string::npos)
    throw FormatError(what + " '" + name + "' contains a comma or newline");
  return name;
}

ordered_json classes_to_json(FeatureClassSet set) {
  ordered_json arr = ordered_json::array();
  for (auto c : {FeatureClass::Max, FeatureClass::Min, FeatureClass::Root,
                 FeatureClass::UpperBound, FeatureClass::LowerBound})
    if (set.contains(c)) arr.push_back(std::string(to_string(c)));
  return arr;
}

FeatureClassSet classes_from_json(const json& v, const std::string& where) {
  FeatureClassSet set;
  array(v, where);
  for (std::size_t i = 0; i < v.size(); ++i)
    set.insert(located(where, [&] {
      return feature_class_from_string(string_field(v[i], where + "[" + std::to_string(i) + "]"));
    }));
  return set;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os << text;
  if (!os) throw IoError("failed writing '" + path.string() + "'");
}

std::string read_text_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

MotionPlan parse_plan_json(const std::string& text, const std::string& source) {
  const json doc = parse_json(text, source);
  const std::string name = string_field(field(doc, "name", source), source + ".name");
  const double t_f = number(field(doc, "t_f", source), source + ".t_f");
  auto state = parse_dimensions(field(doc, "state", source), source + ".state");
  std::vector<Dimension> control;
  if (doc.contains("control") && !doc["control"].is_null())
    control = parse_dimensions(doc["control"], source + ".control");
  return located(source, [&] {
    return MotionPlan(name, t_f, std::move(state), std::move(control));
  });
}

std::string plan_to_json(const MotionPlan& plan) {
  ordered_json doc;
  doc["name"] = plan.name();
  doc["t_f"] = plan.t_f();
  doc["state"] = dimensions_to_json(plan.state());
  doc["control"] = dimensions_to_json(plan.control());
  return doc.dump(2) + "\n";
}

MotionPlan load_plan_json(const fs::path& path) {
  return parse_plan_json(read_text_file(path), path.string());
}

void save_plan_json(const MotionPlan& plan, const fs::path& path) {
  write_text_file(path, plan_to_json(plan));
}

MotionPlan parse_samples_csv(const std::string& text, const std::string& name,
                             const std::vector<std::optional<DimensionBounds>>& bounds,
                             std::optional<double> t_f, const std::string& source) {
  const auto lines = csv_lines(text);
  if (lines.empty()) throw FormatError(source + ": empty file");
  const auto header = split_csv_line(lines[0]);
  if (header.size() < 2 || header[0] != "t")
    throw FormatError(source + ": line 1: header must be 't,<dim names...>'");
  const std::size_t dims = header.size() - 1;
  if (!bounds.empty() && bounds.size() != dims)
    throw ConfigError(source + ": " + std::to_string(bounds.size()) + " bounds given for " +
                      std::to_string(dims) + " columns");

  std::vector<double> times;
  std::vector<std::vector<double>> cols(dims);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::string where = source + ": line " + std::to_string(r + 1);
    const auto cells = split_csv_line(lines[r]);
    if (cells.size() != header.size())
      throw FormatError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                        std::to_string(cells.size()));
    times.push_back(parse_cell(cells[0], where + ", column t"));
    if (times.size() > 1 && !(times.back() > times[times.size() - 2]))
      throw FormatError(where + ": time must be strictly increasing");
    for (std::size_t d = 0; d < dims; ++d)
      cols[d].push_back(parse_cell(cells[d + 1], where + ", column " + header[d + 1]));
  }
  if (times.size() < 2) throw FormatError(source + ": need at least 2 data rows");

  const double t0 = times.front(), span = times.back() - times.front();
  const double target = t_f.value_or(span);
  if (!(target > 0.0)) throw ConfigError(source + ": t_f must be > 0");
  for (double& t : times) t = (t - t0) / span * target;
  times.front() = 0.0;
  times.back() = target;

  std::vector<Dimension> state;
  for (std::size_t d = 0; d < dims; ++d) {
    std::optional<DimensionBounds> b = bounds.empty() ? std::nullopt : bounds[d];
    if (!b) {
      const auto [lo, hi] = std::minmax_element(cols[d].begin(), cols[d].end());
      double widen = 0.01 * (*hi - *lo);
      if (widen == 0.0) widen = 0.01 * std::max(1.0, std::abs(*lo));
      b = DimensionBounds(*lo - widen, *hi + widen, true);
    }
    auto pp = located(source + ", column " + header[d + 1],
                      [&] { return from_samples(times, cols[d]); });
    state.push_back({std::move(pp), b});
  }
  return MotionPlan(name, target, std::move(state), {});
}

MotionPlan load_samples_csv(const fs::path& path,
                            const std::vector<std::optional<DimensionBounds>>& bounds,
                            std::optional<double> t_f) {
  return parse_samples_csv(read_text_file(path), path.stem().string(), bounds, t_f, path.string());
}

MotionPlan load_plan(const fs::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".csv") return load_samples_csv(path);
  if (ext == ".json") return load_plan_json(path);
  throw FormatError(path.string() + ": unsupported plan file extension '" + ext + "'");
}

std::string features_to_json(const PlanFeatures& features) {
  ordered_json doc;
  doc["name"] = features.name;
  ordered_json dims = ordered_json::array();
  for (const auto& seq : features.dimensions) {
    ordered_json d;
    d["id"] = seq.dimension_id;
    ordered_json list = ordered_json::array();
    for (const auto& e : seq.elements) {
      ordered_json f;
      f["class"] = std::string(to_string(e.cls));
      f["time"] = e.time;
      f["salience"] = e.salience;
      list.push_back(std::move(f));
    }
    d["features"] = std::move(list);
    dims.push_back(std::move(d));
  }
  doc["dimensions"] = std::move(dims);
  return doc.dump(2) + "\n";
}

PlanFeatures parse_features_json(const std::string& text, const std::string& source) {
  const json doc = parse_json(text, source);
  PlanFeatures out;
  out.name = string_field(field(doc, "name", source), source + ".name");
  const auto& dims = array(field(doc, "dimensions", source), source + ".dimensions");
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const std::string at = source + ".dimensions[" + std::to_string(i) + "]";
    FeatureSequence seq;
    seq.dimension_id = string_field(field(dims[i], "id", at), at + ".id");
    const auto& list = array(field(dims[i], "features", at), at + ".features");
    double prev = 0.0;
    for (std::size_t k = 0; k < list.size(); ++k) {
      const std::string fat = at + ".features[" + std::to_string(k) + "]";
      const auto cls = located(fat + ".class", [&] {
        return feature_class_from_string(string_field(field(list[k], "class", fat), fat + ".class"));
      });
      const double t = number(field(list[k], "time", fat), fat + ".time");
      const double s = number(field(list[k], "salience", fat), fat + ".salience");
      if (t < 0.0 || t > 1.0) throw FormatError(fat + ".time: must lie in [0, 1]");
      if (t < prev) throw FormatError(fat + ".time: features must be sorted by time");
      if (s < 0.0) throw FormatError(fat + ".salience: must be >= 0");
      prev = t;
      seq.elements.push_back({cls, t, s});
    }
    out.dimensions.push_back(std::move(seq));
  }
  return out;
}

void save_feature_sequences(const PlanFeatures& features, const fs::path& path) {
  write_text_file(path, features_to_json(features));
}

PlanFeatures load_feature_sequences(const fs::path& path) {
  return parse_features_json(read_text_file(path), path.string());
}

std::string distance_matrix_to_csv(const DistanceMatrix& d) {
  std::string out;
  for (const auto& id : d.ids()) out += "," + csv_name(id, "item name");
  out += "\n";
  for (std::size_t i = 0; i < d.size(); ++i) {
    out += d.ids()[i];
    for (std::size_t j = 0; j < d.size(); ++j) out += "," + format_double(d(i, j));
    out += "\n";
  }
  return out;
}

DistanceMatrix parse_distance_matrix_csv(const std::string& text, const std::string& source) {
  const auto lines = csv_lines(text);
  if (lines.empty()) throw FormatError(source + ": empty file");
  auto header = split_csv_line(lines[0]);
  if (header.size() < 2 || !header[0].empty())
    throw FormatError(source + ": line 1: header must be ',<item names...>'");
  std::vector<std::string> ids(header.begin() + 1, header.end());
  const std::size_t n = ids.size();
  if (lines.size() != n + 1)
    throw FormatError(source + ": expected " + std::to_string(n) + " rows, got " +
                      std::to_string(lines.size() - 1));
  std::vector<double> entries;
  entries.reserve(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::string where = source + ": line " + std::to_string(r + 2);
    const auto cells = split_csv_line(lines[r + 1]);
    if (cells.size() != n + 1)
      throw FormatError(where + ": expected " + std::to_string(n + 1) + " fields");
    if (cells[0] != ids[r])
      throw FormatError(where + ": row name '" + cells[0] + "' does not match column '" + ids[r] + "'");
    for (std::size_t c = 0; c < n; ++c)
      entries.push_back(parse_cell(cells[c + 1], where + ", column " + ids[c]));
  }
  return located(source, [&] { return DistanceMatrix(std::move(ids), std::move(entries)); });
}

void save_distance_matrix(const DistanceMatrix& d, const fs::path& path) {
  write_text_file(path, distance_matrix_to_csv(d));
}

DistanceMatrix load_distance_matrix(const fs::path& path) {
  return parse_distance_matrix_csv(read_text_file(path), path.string());
}

std::string dendrogram_to_newick(const Dendrogram& dend) {
  const std::size_t n = dend.leaf_ids.size();
  if (n == 0) return ";";
  if (n == 1) return newick_name(dend.leaf_ids[0]) + ";";
  std::function<std::string(std::size_t)> render = [&](std::size_t id) -> std::string {
    if (id < n) return newick_name(dend.leaf_ids[id]);
    const auto& m = dend.merges.at(id - n);
    const std::string h = format_double(m.height);
    return "(" + render(m.a) + ":" + h + "," + render(m.b) + ":" + h + ")";
  };
  return render(n + dend.merges.size() - 1) + ";";
}

std::string dendrogram_to_json(const Dendrogram& dend) {
  ordered_json arr = ordered_json::array();
  for (const auto& m : dend.merges) arr.push_back(ordered_json::array({m.a, m.b, m.height}));
  ordered_json doc;
  doc["leaves"] = dend.leaf_ids;
  doc["merges"] = std::move(arr);
  return doc.dump() + "\n";
}

void save_dendrogram(const Dendrogram& dend, const fs::path& newick_path,
                     const fs::path& json_path) {
  write_text_file(newick_path, dendrogram_to_newick(dend) + "\n");
  write_text_file(json_path, dendrogram_to_json(dend));
}

std::string labels_to_csv(const ClusterLabels& labels) {
  std::string out = "item,cluster\n";
  for (std::size_t i = 0; i < labels.item_ids.size(); ++i)
    out += csv_name(labels.item_ids[i], "item name") + "," +
           csv_name(labels.cluster_names.at(labels.assignment[i]), "cluster name") + "\n";
  return out;
}

ClusterLabels parse_labels_csv(const std::string& text, const std::string& source) {
  const auto lines = csv_lines(text);
  if (lines.empty()) throw FormatError(source + ": empty file");
  if (split_csv_line(lines[0]).size() != 2)
    throw FormatError(source + ": line 1: header must have two columns (item,cluster)");
  std::vector<std::string> items, names;
  std::set<std::string> seen;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::string where = source + ": line " + std::to_string(r + 1);
    const auto cells = split_csv_line(lines[r]);
    if (cells.size() != 2) throw FormatError(where + ": expected 2 fields");
    if (cells[0].empty() || cells[1].empty()) throw FormatError(where + ": missing value");
    if (!seen.insert(cells[0]).second) throw FormatError(where + ": duplicate item '" + cells[0] + "'");
    items.push_back(cells[0]);
    names.push_back(cells[1]);
  }
  return labels_from_names(std::move(items), names);
}

ClusterLabels load_labels_csv(const fs::path& path) {
  return parse_labels_csv(read_text_file(path), path.string());
}

PlanSetManifest load_manifest(const fs::path& path) {
  const std::string source = path.string();
  const json doc = parse_json(read_text_file(path), source);
  PlanSetManifest m;
  const auto& plans = array(field(doc, "plans", source), source + ".plans");
  bool any_label = false;
  std::vector<std::optional<std::string>> labels;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const std::string at = source + ".plans[" + std::to_string(i) + "]";
    fs::path p = string_field(field(plans[i], "path", at), at + ".path");
    if (p.is_relative()) p = path.parent_path() / p;
    m.plans.push_back(p);
    if (plans[i].contains("label") && !plans[i]["label"].is_null()) {
      labels.push_back(string_field(plans[i]["label"], at + ".label"));
      any_label = true;
    } else {
      labels.emplace_back();
    }
  }
  if (any_label) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (!labels[i])
        throw FormatError(source + ".plans[" + std::to_string(i) +
                          "]: labels must be given for every plan or none");
      m.labels.push_back(*labels[i]);
    }
  }
  if (doc.contains("extraction")) {
    const auto& e = doc["extraction"];
    const std::string at = source + ".extraction";
    ExtractionConfig cfg;
    if (e.contains("prominence_threshold"))
      cfg.prominence_threshold = number(e["prominence_threshold"], at + ".prominence_threshold");
    if (e.contains("epsilon_rel"))
      cfg.constraint_epsilon_rel = number(e["epsilon_rel"], at + ".epsilon_rel");
    if (e.contains("classes")) cfg.classes = classes_from_json(e["classes"], at + ".classes");
    if (e.contains("per_dimension")) {
      if (!e["per_dimension"].is_object()) throw FormatError(at + ".per_dimension: expected an object");
      for (const auto& [id, v] : e["per_dimension"].items())
        cfg.per_dimension[id] = classes_from_json(v, at + ".per_dimension." + id);
    }
    try {
      cfg.validate();
    } catch (const ConfigError& err) {
      throw FormatError(at + ": " + err.what());
    }
    m.extraction = cfg;
  }
  if (doc.contains("kernel")) {
    const auto& k = doc["kernel"];
    const std::string at = source + ".kernel";
    if (k.contains("soft_sim")) m.soft_sim = number(k["soft_sim"], at + ".soft_sim");
    if (k.contains("gap_weighting")) {
      if (!k["gap_weighting"].is_boolean()) throw FormatError(at + ".gap_weighting: expected a boolean");
      m.gap_weighting = k["gap_weighting"].get<bool>();
    }
    if (k.contains("salience_weighting")) {
      if (!k["salience_weighting"].is_boolean())
        throw FormatError(at + ".salience_weighting: expected a boolean");
      m.salience_weighting = k["salience_weighting"].get<bool>();
    }
    if (k.contains("max_subseq_len") && !k["max_subseq_len"].is_null()) {
      if (!k["max_subseq_len"].is_number_unsigned() || k["max_subseq_len"].get<std::size_t>() < 1)
        throw FormatError(at + ".max_subseq_len: expected a positive integer");
      m.max_subseq_len = k["max_subseq_len"].get<std::size_t>();
    }
  }
  return m;
}

void save_manifest(const PlanSetManifest& m, const fs::path& path) {
  ordered_json doc;
  ordered_json plans = ordered_json::array();
  for (std::size_t i = 0; i < m.plans.size(); ++i) {
    ordered_json p;
    p["path"] = m.plans[i].generic_string();
    if (!m.labels.empty()) p["label"] = m.labels.at(i);
    plans.push_back(std::move(p));
  }
  doc["plans"] = std::move(plans);
  if (m.extraction) {
    ordered_json e;
    e["prominence_threshold"] = m.extraction->prominence_threshold;
    e["epsilon_rel"] = m.extraction->constraint_epsilon_rel;
    e["classes"] = classes_to_json(m.extraction->classes);
    if (!m.extraction->per_dimension.empty()) {
      ordered_json per = ordered_json::object();
      for (const auto& [id, set] : m.extraction->per_dimension) per[id] = classes_to_json(set);
      e["per_dimension"] = std::move(per);
    }
    doc["extraction"] = std::move(e);
  }
  ordered_json k = ordered_json::object();
  if (m.soft_sim) k["soft_sim"] = *m.soft_sim;
  if (m.gap_weighting) k["gap_weighting"] = *m.gap_weighting;
  if (m.salience_weighting) k["salience_weighting"] = *m.salience_weighting;
  if (m.max_subseq_len) k["max_subseq_len"] = *m.max_subseq_len;
  if (!k.empty()) doc["kernel"] = std::move(k);
  write_text_file(path, doc.dump(2) + "\n");
}

}  // namespace plancluster
