#include "rofigs/dataset.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "rofigs/csv.hpp"
#include "rofigs/error.hpp"

namespace rofigs {

bool Dataset::all_numeric() const {
  return std::none_of(columns.begin(), columns.end(),
                      [](const Column& c) { return c.nominal; });
}

Matrix Dataset::to_matrix() const {
  if (!all_numeric()) throw Error("dataset has nominal columns, encode first");
  Matrix m(n(), d());
  for (std::size_t j = 0; j < columns.size(); ++j)
    for (std::size_t i = 0; i < labels.size(); ++i)
      m(i, j) = columns[j].numeric[i];
  return m;
}

std::vector<std::string> Dataset::feature_names() const {
  std::vector<std::string> names;
  names.reserve(columns.size());
  for (const auto& c : columns) names.push_back(c.name);
  return names;
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  Dataset out;
  out.task = task;
  out.labels.reserve(rows.size());
  for (std::size_t r : rows) {
    if (r >= n()) throw Error("subset: row index out of range");
    out.labels.push_back(labels[r]);
  }
  out.columns.reserve(columns.size());
  for (const auto& c : columns) {
    Column oc;
    oc.name = c.name;
    oc.nominal = c.nominal;
    if (c.nominal) {
      oc.cells.reserve(rows.size());
      for (std::size_t r : rows) oc.cells.push_back(c.cells[r]);
      // categories restricted to those present, first-appearance order
      std::unordered_set<std::string> seen;
      for (const auto& cell : oc.cells)
        if (seen.insert(cell).second) oc.categories.push_back(cell);
    } else {
      oc.numeric.reserve(rows.size());
      for (std::size_t r : rows) oc.numeric.push_back(c.numeric[r]);
    }
    out.columns.push_back(std::move(oc));
  }
  return out;
}

std::optional<double> parse_numeric(const std::string& cell) {
  std::size_t b = cell.find_first_not_of(" \t");
  if (b == std::string::npos) return std::nullopt;
  std::size_t e = cell.find_last_not_of(" \t");
  std::string s = cell.substr(b, e - b + 1);
  const char* p = s.c_str();
  char* end = nullptr;
  double v = std::strtod(p, &end);
  if (end == p || *end != '\0') return std::nullopt;
  return v;
}

namespace {

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // row-major, header removed
};

RawTable to_table(std::vector<std::vector<std::string>> records) {
  RawTable t;
  t.header = std::move(records[0]);
  std::unordered_set<std::string> seen;
  for (const auto& name : t.header)
    if (!seen.insert(name).second)
      throw Error("duplicate column name in header: " + name);
  records.erase(records.begin());
  t.rows = std::move(records);
  return t;
}

Column build_column(const RawTable& t, std::size_t j, bool force_nominal) {
  Column col;
  col.name = t.header[j];
  std::vector<double> numeric;
  numeric.reserve(t.rows.size());
  bool all_numeric = !force_nominal;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::string& cell = t.rows[i][j];
    if (cell.find_first_not_of(" \t") == std::string::npos) {
      std::ostringstream msg;
      msg << "missing value at row " << (i + 1) << ", column '" << col.name
          << "'";
      throw Error(msg.str());
    }
    if (all_numeric) {
      auto v = parse_numeric(cell);
      if (v)
        numeric.push_back(*v);
      else
        all_numeric = false;
    }
  }
  col.nominal = !all_numeric;
  if (col.nominal) {
    col.cells.reserve(t.rows.size());
    std::unordered_set<std::string> seen;
    for (const auto& row : t.rows) {
      col.cells.push_back(row[j]);
      if (seen.insert(row[j]).second) col.categories.push_back(row[j]);
    }
  } else {
    col.numeric = std::move(numeric);
  }
  return col;
}

std::vector<double> parse_labels(const RawTable& t, std::size_t j, Task task) {
  std::vector<double> labels;
  labels.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::string& cell = t.rows[i][j];
    auto v = parse_numeric(cell);
    if (!v) {
      std::ostringstream msg;
      msg << "label at row " << (i + 1) << " is not numeric: '" << cell << "'";
      throw Error(msg.str());
    }
    if (task == Task::BinaryClassification && *v != 0.0 && *v != 1.0) {
      std::ostringstream msg;
      msg << "binary label at row " << (i + 1) << " must be 0 or 1, got "
          << cell;
      throw Error(msg.str());
    }
    labels.push_back(*v);
  }
  return labels;
}

Dataset from_table(const RawTable& t, const LoadOptions& opts) {
  if (t.rows.empty()) throw Error("dataset has no data rows");
  std::size_t label_idx = t.header.size() - 1;
  if (opts.label_column) {
    auto it = std::find(t.header.begin(), t.header.end(), *opts.label_column);
    if (it == t.header.end())
      throw Error("label column not found: " + *opts.label_column);
    label_idx = static_cast<std::size_t>(it - t.header.begin());
  }
  Dataset ds;
  ds.task = opts.task;
  ds.labels = parse_labels(t, label_idx, opts.task);
  for (std::size_t j = 0; j < t.header.size(); ++j) {
    if (j == label_idx) continue;
    ds.columns.push_back(
        build_column(t, j, opts.force_nominal.count(t.header[j]) > 0));
  }
  if (ds.columns.empty()) throw Error("dataset has no feature columns");
  return ds;
}

}  // namespace

Dataset load_csv(const std::string& path, const LoadOptions& opts) {
  return from_table(to_table(read_csv_file(path)), opts);
}

Dataset load_csv_stream(std::istream& in, const LoadOptions& opts) {
  return from_table(to_table(read_csv(in)), opts);
}

Dataset load_csv_features(const std::string& path,
                          const std::vector<std::string>& expected_columns,
                          const std::vector<bool>& expected_nominal,
                          const std::optional<std::string>& label_column) {
  RawTable t = to_table(read_csv_file(path));
  if (t.rows.empty()) throw Error("dataset has no data rows");

  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t j = 0; j < t.header.size(); ++j) pos[t.header[j]] = j;

  Dataset ds;
  ds.labels.assign(t.rows.size(), 0.0);  // placeholder, unused
  for (std::size_t k = 0; k < expected_columns.size(); ++k) {
    auto it = pos.find(expected_columns[k]);
    if (it == pos.end())
      throw Error("column missing from input: " + expected_columns[k]);
    ds.columns.push_back(build_column(t, it->second, expected_nominal[k]));
  }
  // anything beyond the schema (other than the label column) is a mismatch
  std::unordered_set<std::string> known(expected_columns.begin(),
                                        expected_columns.end());
  for (const auto& name : t.header) {
    if (known.count(name)) continue;
    if (label_column && name == *label_column) continue;
    if (!label_column && name == t.header.back()) continue;
    throw Error("unexpected column in input: " + name);
  }
  return ds;
}

}  // namespace rofigs
