#include "lsboost/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "lsboost/error.hpp"

namespace lsboost::io {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_number(std::string_view cell, double& out) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return res.ec == std::errc() && res.ptr == cell.data() + cell.size() && std::isfinite(out);
}

}  // namespace

std::size_t CsvTable::column_index(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw DataError("column '" + name + "' not found in header");
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable parse_csv(const std::string& text, const std::string& source) {
  CsvTable table;
  std::string_view rest(text);
  if (rest.size() >= 3 && std::memcmp(rest.data(), "\xEF\xBB\xBF", 3) == 0) rest.remove_prefix(3);
  std::size_t line_no = 0;
  bool have_header = false;
  while (!rest.empty()) {
    const std::size_t nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (!have_header) {
      for (auto f : fields) {
        if (f.size() >= 2 && f.front() == '"' && f.back() == '"') f = f.substr(1, f.size() - 2);
        if (f.empty()) throw DataError(source + ": empty column name in header");
        table.header.emplace_back(f);
      }
      std::set<std::string> unique(table.header.begin(), table.header.end());
      if (unique.size() != table.header.size()) throw DataError(source + ": duplicate column name in header");
      table.columns.resize(table.header.size());
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size())
      throw DataError(source + ": line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                      " fields, header has " + std::to_string(table.header.size()));
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double v = 0.0;
      if (!parse_number(fields[c], v))
        throw DataError(source + ": line " + std::to_string(line_no) + ", column '" + table.header[c] +
                        "': cannot parse '" + std::string(fields[c]) + "' as a finite number");
      table.columns[c].push_back(v);
    }
  }
  if (!have_header) throw DataError(source + ": no header row");
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_text(path), path.string()); }

Rescale parse_rescale(const std::string& text) {
  if (text == "auto") return Rescale::Auto;
  if (text == "minmax") return Rescale::MinMax;
  if (text == "none") return Rescale::None;
  throw UsageError("unknown rescale mode '" + text + "' (expected auto|minmax|none)");
}

std::vector<double> feature_matrix(const CsvTable& table, const std::vector<std::string>& feature_names) {
  std::vector<std::size_t> idx;
  for (const auto& name : feature_names) idx.push_back(table.column_index(name));
  const std::size_t n = table.rows();
  std::vector<double> out(n * idx.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) out[i * idx.size() + j] = table.columns[idx[j]][i];
  return out;
}

LoadedData load_with(const CsvTable& table, const std::string& label,
                     const std::vector<std::string>& feature_names, const Normalization& norm) {
  const auto& raw = table.columns[table.column_index(label)];
  if (table.rows() == 0) throw DataError("dataset has no rows");
  std::vector<double> labels(raw.size());
  std::transform(raw.begin(), raw.end(), labels.begin(), [&](double v) { return norm.apply(v); });
  return {Dataset(feature_matrix(table, feature_names), std::move(labels), feature_names.size()), norm,
          feature_names};
}

LoadedData load_table(const CsvTable& table, const PreprocessSpec& spec) {
  const std::size_t label_idx = table.column_index(spec.label);
  std::vector<std::string> features;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c == label_idx) continue;
    if (std::find(spec.exclude.begin(), spec.exclude.end(), table.header[c]) != spec.exclude.end()) continue;
    features.push_back(table.header[c]);
  }
  if (features.empty()) throw DataError("no feature columns besides the label '" + spec.label + "'");
  if (table.rows() == 0) throw DataError("dataset has no rows");

  std::vector<double> capped = table.columns[label_idx];
  if (spec.cap) {
    if (!std::isfinite(*spec.cap)) throw UsageError("cap must be finite");
    for (double& v : capped) v = std::min(v, *spec.cap);
  }
  const auto [lo, hi] = std::minmax_element(capped.begin(), capped.end());
  const bool in_unit = *lo >= 0.0 && *hi <= 1.0;

  Normalization norm;
  norm.cap = spec.cap;
  const bool minmax = spec.rescale == Rescale::MinMax || (spec.rescale == Rescale::Auto && (!in_unit || spec.cap));
  if (minmax) {
    norm.min = *lo;
    norm.max = *hi;
    if (!(*hi > *lo))
      std::cerr << "warning: label '" << spec.label << "' is constant after preprocessing; all labels map to 0\n";
  } else if (!in_unit) {
    throw DataError("label '" + spec.label + "' has values outside [0,1] and rescaling is disabled");
  }
  return load_with(table, spec.label, features, norm);
}

LoadedData load_csv(const std::filesystem::path& path, const PreprocessSpec& spec) {
  return load_table(read_csv(path), spec);
}

std::uint64_t fingerprint(const Dataset& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](double v) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof bits);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffu;
      h *= 0x100000001b3ULL;
    }
  };
  for (double v : data.features()) mix(v);
  for (double v : data.labels()) mix(v);
  return h;
}

// ---------------------------------------------------------------------------
// Model file

namespace {

constexpr const char* kFormat = "lsboost-model";

void expect_keys(const json& j, std::initializer_list<const char*> required,
                 std::initializer_list<const char*> optional, const std::string& where) {
  if (!j.is_object()) throw DataError(where + ": expected an object");
  for (const char* k : required)
    if (!j.contains(k)) throw DataError(where + ": missing field '" + k + "'");
  for (const auto& [key, value] : j.items()) {
    const bool known = std::any_of(required.begin(), required.end(), [&](const char* k) { return key == k; }) ||
                       std::any_of(optional.begin(), optional.end(), [&](const char* k) { return key == k; });
    if (!known) throw DataError(where + ": unknown field '" + key + "'");
  }
}

double get_double(const json& j, const char* key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number()) throw DataError(where + ": field '" + key + "' must be a number");
  return v.get<double>();
}

long long get_int(const json& j, const char* key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw DataError(where + ": field '" + key + "' must be an integer");
  return v.get<long long>();
}

std::string get_string(const json& j, const char* key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_string()) throw DataError(where + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

json hypothesis_to_json(const WeakHypothesis& h) {
  return std::visit(
      [](const auto& body) -> json {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, ConstantHypothesis>) {
          return {{"kind", "constant"}, {"value", body.value}};
        } else if constexpr (std::is_same_v<T, AffineHypothesis>) {
          return {{"kind", "affine"}, {"intercept", body.intercept}, {"weights", body.weights}};
        } else {
          json nodes = json::array();
          for (const auto& n : body.nodes) {
            if (n.is_leaf())
              nodes.push_back({{"value", n.value}});
            else
              nodes.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right}});
          }
          return {{"kind", "tree"}, {"nodes", nodes}};
        }
      },
      h.body());
}

WeakHypothesis hypothesis_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("kind")) throw DataError(where + ": hypothesis needs a 'kind'");
  const std::string kind = get_string(j, "kind", where);
  if (kind == "constant") {
    expect_keys(j, {"kind", "value"}, {}, where);
    return WeakHypothesis(ConstantHypothesis{get_double(j, "value", where)});
  }
  if (kind == "affine") {
    expect_keys(j, {"kind", "intercept", "weights"}, {}, where);
    AffineHypothesis a{get_double(j, "intercept", where), {}};
    if (!j.at("weights").is_array()) throw DataError(where + ": 'weights' must be an array");
    for (const auto& w : j.at("weights")) {
      if (!w.is_number()) throw DataError(where + ": weights must be numbers");
      a.weights.push_back(w.get<double>());
    }
    return WeakHypothesis(std::move(a));
  }
  if (kind == "tree") {
    expect_keys(j, {"kind", "nodes"}, {}, where);
    if (!j.at("nodes").is_array()) throw DataError(where + ": 'nodes' must be an array");
    TreeHypothesis t;
    for (const auto& n : j.at("nodes")) {
      const std::string nw = where + ".nodes[" + std::to_string(t.nodes.size()) + "]";
      TreeNode node;
      if (n.is_object() && n.contains("value")) {
        expect_keys(n, {"value"}, {}, nw);
        node.value = get_double(n, "value", nw);
      } else {
        expect_keys(n, {"feature", "threshold", "left", "right"}, {}, nw);
        node.feature = static_cast<int>(get_int(n, "feature", nw));
        if (node.feature < 0) throw DataError(nw + ": negative feature index");
        node.threshold = get_double(n, "threshold", nw);
        node.left = static_cast<int>(get_int(n, "left", nw));
        node.right = static_cast<int>(get_int(n, "right", nw));
      }
      t.nodes.push_back(node);
    }
    return WeakHypothesis(std::move(t));
  }
  throw DataError(where + ": unknown hypothesis kind '" + kind + "'");
}

json normalization_to_json(const Normalization& n) {
  json j = {{"min", n.min}, {"max", n.max}};
  j["cap"] = n.cap ? json(*n.cap) : json(nullptr);
  return j;
}

Normalization normalization_from_json(const json& j, const std::string& where) {
  expect_keys(j, {"min", "max", "cap"}, {}, where);
  Normalization n;
  n.min = get_double(j, "min", where);
  n.max = get_double(j, "max", where);
  if (!j.at("cap").is_null()) n.cap = get_double(j, "cap", where);
  return n;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string serialize_model(const ModelFile& file) {
  const LevelSetModel& m = file.model;
  json rounds = json::array();
  for (const auto& r : m.rounds()) {
    json entries = json::array();
    for (const auto& [level, h] : r.entries()) entries.push_back({{"level", level}, {"hypothesis", hypothesis_to_json(h)}});
    rounds.push_back(entries);
  }
  const ModelMetadata& md = file.metadata;
  json meta = {
      {"label", md.label},
      {"feature_names", md.feature_names},
      {"normalization", normalization_to_json(md.normalization)},
      {"alpha", md.alpha},
      {"bound_B", md.bound_B},
      {"oracle", md.oracle},
      {"min_level_size", md.min_level_size},
      {"dataset_fingerprint", hex64(md.dataset_fingerprint)},
  };
  json j = {
      {"format", kFormat},
      {"schema_version", ModelFile::kSchemaVersion},
      {"grid_m", m.grid().m()},
      {"dims", m.dims()},
      {"initial", hypothesis_to_json(m.initial())},
      {"rounds", rounds},
      {"metadata", meta},
  };
  return j.dump(1) + "\n";
}

ModelFile parse_model(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("model file is not valid JSON: ") + e.what());
  }
  expect_keys(j, {"format", "schema_version", "grid_m", "dims", "initial", "rounds", "metadata"}, {}, "model");
  if (get_string(j, "format", "model") != kFormat) throw DataError("model: not an lsboost model file");
  const auto version = get_int(j, "schema_version", "model");
  if (version != ModelFile::kSchemaVersion)
    throw DataError("model: unsupported schema_version " + std::to_string(version));
  const auto m = get_int(j, "grid_m", "model");
  const auto dims = get_int(j, "dims", "model");
  if (m < 1 || m > 100000000) throw DataError("model: grid_m out of range");
  if (dims < 1) throw DataError("model: dims must be positive");
  const Grid grid(static_cast<int>(m));

  if (!j.at("rounds").is_array()) throw DataError("model: 'rounds' must be an array");
  std::vector<LevelRound> rounds;
  for (const auto& r : j.at("rounds")) {
    const std::string where = "model.rounds[" + std::to_string(rounds.size()) + "]";
    if (!r.is_array()) throw DataError(where + ": expected an array");
    std::map<int, WeakHypothesis> by_level;
    for (const auto& e : r) {
      expect_keys(e, {"level", "hypothesis"}, {}, where);
      const auto level = get_int(e, "level", where);
      if (level < 0 || level > m) throw DataError(where + ": level index out of range");
      if (!by_level.emplace(static_cast<int>(level), hypothesis_from_json(e.at("hypothesis"), where)).second)
        throw DataError(where + ": duplicate level " + std::to_string(level));
    }
    rounds.emplace_back(grid, std::move(by_level));
  }

  const json& meta = j.at("metadata");
  expect_keys(meta,
              {"label", "feature_names", "normalization", "alpha", "bound_B", "oracle", "min_level_size",
               "dataset_fingerprint"},
              {}, "model.metadata");
  ModelMetadata md;
  md.label = get_string(meta, "label", "model.metadata");
  if (!meta.at("feature_names").is_array()) throw DataError("model.metadata: feature_names must be an array");
  for (const auto& f : meta.at("feature_names")) {
    if (!f.is_string()) throw DataError("model.metadata: feature names must be strings");
    md.feature_names.push_back(f.get<std::string>());
  }
  if (md.feature_names.size() != static_cast<std::size_t>(dims))
    throw DataError("model.metadata: feature_names length does not match dims");
  md.normalization = normalization_from_json(meta.at("normalization"), "model.metadata.normalization");
  md.alpha = get_double(meta, "alpha", "model.metadata");
  md.bound_B = get_double(meta, "bound_B", "model.metadata");
  md.oracle = get_string(meta, "oracle", "model.metadata");
  const auto mls = get_int(meta, "min_level_size", "model.metadata");
  if (mls < 0) throw DataError("model.metadata: min_level_size must be non-negative");
  md.min_level_size = static_cast<std::size_t>(mls);
  const std::string fp = get_string(meta, "dataset_fingerprint", "model.metadata");
  if (fp.size() != 16 || fp.find_first_not_of("0123456789abcdef") != std::string::npos)
    throw DataError("model.metadata: dataset_fingerprint must be 16 hex digits");
  md.dataset_fingerprint = std::stoull(fp, nullptr, 16);

  return {LevelSetModel(grid, static_cast<std::size_t>(dims), hypothesis_from_json(j.at("initial"), "model.initial"),
                        std::move(rounds)),
          std::move(md)};
}

void write_model(const std::filesystem::path& path, const ModelFile& file) { write_text(path, serialize_model(file)); }

ModelFile read_model(const std::filesystem::path& path) { return parse_model(read_text(path)); }

std::string report_csv(const TrainReport& report) {
  std::string out = "round,mse,msce,nonempty_levels,oracle_calls,millis\n";
  char millis[32];
  for (const auto& r : report.records) {
    if (!r.retained) continue;
    std::snprintf(millis, sizeof millis, "%.3f", r.millis);
    out += std::to_string(r.round) + "," + format_double(r.mse) + "," + format_double(r.msce) + "," +
           std::to_string(r.nonempty_levels) + "," + std::to_string(r.oracle_calls) + "," + millis + "\n";
  }
  return out;
}

}  // namespace lsboost::io
