#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rofigs/matrix.hpp"

namespace rofigs {

enum class Task { BinaryClassification, Regression };

// A column is either numerical or nominal (unordered categories). Nominal
// columns keep their raw string cells plus the distinct category labels in
// order of first appearance.
struct Column {
  std::string name;
  bool nominal = false;
  std::vector<double> numeric;          // filled iff !nominal
  std::vector<std::string> cells;       // filled iff nominal
  std::vector<std::string> categories;  // filled iff nominal
};

struct Dataset {
  std::vector<Column> columns;
  std::vector<double> labels;
  Task task = Task::BinaryClassification;

  std::size_t n() const { return labels.size(); }
  std::size_t d() const { return columns.size(); }
  bool all_numeric() const;

  // Requires all_numeric().
  Matrix to_matrix() const;
  std::vector<std::string> feature_names() const;

  Dataset subset(const std::vector<std::size_t>& rows) const;
};

struct LoadOptions {
  std::optional<std::string> label_column;       // default: last column
  Task task = Task::BinaryClassification;
  std::set<std::string> force_nominal;           // schema override
};

// CSV with header; a column is nominal iff any cell fails numeric parsing
// (or it is listed in force_nominal). Missing (empty) cells are rejected.
Dataset load_csv(const std::string& path, const LoadOptions& opts = {});
Dataset load_csv_stream(std::istream& in, const LoadOptions& opts = {});

// Feature columns only, labels left empty (prediction input).
Dataset load_csv_features(const std::string& path,
                          const std::vector<std::string>& expected_columns,
                          const std::vector<bool>& expected_nominal,
                          const std::optional<std::string>& label_column);

std::optional<double> parse_numeric(const std::string& cell);

}  // namespace rofigs
