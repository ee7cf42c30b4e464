#include "rofigs/encode.hpp"

#include <unordered_map>

#include "rofigs/error.hpp"

namespace rofigs {

std::string encoding_name(Encoding e) {
  switch (e) {
    case Encoding::OneHot: return "one_hot";
    case Encoding::Count: return "count";
    case Encoding::Prop: return "prop";
  }
  return "one_hot";
}

Encoding encoding_from_name(const std::string& name) {
  if (name == "one_hot" || name == "one-hot" || name == "ohe")
    return Encoding::OneHot;
  if (name == "count") return Encoding::Count;
  if (name == "prop") return Encoding::Prop;
  throw Error("unknown encoding: " + name +
              " (expected one-hot, count, or prop)");
}

Encoder Encoder::identity(const std::vector<std::string>& column_names) {
  std::vector<ColumnScheme> schema;
  schema.reserve(column_names.size());
  for (const auto& n : column_names) schema.push_back({n, false, {}, {}});
  return Encoder(Encoding::OneHot, std::move(schema));
}

Encoder fit_encoder(const Dataset& data, Encoding strategy) {
  if (strategy != Encoding::OneHot &&
      data.task != Task::BinaryClassification) {
    throw Error("encoding '" + encoding_name(strategy) +
                "' is a target encoding and requires binary labels");
  }
  std::vector<ColumnScheme> schema;
  schema.reserve(data.columns.size());
  for (const auto& col : data.columns) {
    ColumnScheme cs;
    cs.name = col.name;
    cs.nominal = col.nominal;
    if (col.nominal) {
      cs.categories = col.categories;
      if (strategy != Encoding::OneHot) {
        std::unordered_map<std::string, std::size_t> index;
        for (std::size_t k = 0; k < cs.categories.size(); ++k)
          index[cs.categories[k]] = k;
        std::vector<double> positives(cs.categories.size(), 0.0);
        std::vector<double> totals(cs.categories.size(), 0.0);
        for (std::size_t i = 0; i < data.n(); ++i) {
          std::size_t k = index[col.cells[i]];
          totals[k] += 1.0;
          if (data.labels[i] == 1.0) positives[k] += 1.0;
        }
        cs.mapped.resize(cs.categories.size());
        for (std::size_t k = 0; k < cs.categories.size(); ++k)
          cs.mapped[k] = strategy == Encoding::Count ? positives[k]
                                                     : positives[k] / totals[k];
      }
    }
    schema.push_back(std::move(cs));
  }
  return Encoder(strategy, std::move(schema));
}

Dataset Encoder::transform(const Dataset& data) const {
  if (data.columns.size() != schema_.size())
    throw Error("encoder schema mismatch: expected " +
                std::to_string(schema_.size()) + " columns, got " +
                std::to_string(data.columns.size()));
  Dataset out;
  out.task = data.task;
  out.labels = data.labels;
  for (std::size_t j = 0; j < schema_.size(); ++j) {
    const ColumnScheme& cs = schema_[j];
    const Column& col = data.columns[j];
    if (col.name != cs.name)
      throw Error("encoder schema mismatch at column " + std::to_string(j) +
                  ": expected '" + cs.name + "', got '" + col.name + "'");
    if (!cs.nominal) {
      if (col.nominal)
        throw Error("column '" + col.name +
                    "' was numerical at fit time but is nominal now");
      Column oc;
      oc.name = cs.name;
      oc.numeric = col.numeric;
      out.columns.push_back(std::move(oc));
      continue;
    }
    // nominal input may arrive as a numeric column (e.g. all-numeric category
    // labels); normalize cells to strings via the raw cell values
    if (!col.nominal)
      throw Error("column '" + col.name +
                  "' was nominal at fit time but is numerical now");
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t k = 0; k < cs.categories.size(); ++k)
      index[cs.categories[k]] = k;
    if (strategy_ == Encoding::OneHot) {
      std::vector<Column> block(cs.categories.size());
      for (std::size_t k = 0; k < cs.categories.size(); ++k) {
        block[k].name = cs.name + "=" + cs.categories[k];
        block[k].numeric.assign(data.n(), 0.0);
      }
      for (std::size_t i = 0; i < data.n(); ++i) {
        auto it = index.find(col.cells[i]);
        if (it != index.end()) block[it->second].numeric[i] = 1.0;
        // unseen category: all-zero row block
      }
      for (auto& b : block) out.columns.push_back(std::move(b));
    } else {
      Column oc;
      oc.name = cs.name;
      oc.numeric.reserve(data.n());
      for (std::size_t i = 0; i < data.n(); ++i) {
        auto it = index.find(col.cells[i]);
        oc.numeric.push_back(it == index.end() ? 0.0 : cs.mapped[it->second]);
      }
      out.columns.push_back(std::move(oc));
    }
  }
  return out;
}

std::vector<std::string> Encoder::output_names() const {
  std::vector<std::string> names;
  for (const auto& cs : schema_) {
    if (cs.nominal && strategy_ == Encoding::OneHot)
      for (const auto& cat : cs.categories) names.push_back(cs.name + "=" + cat);
    else
      names.push_back(cs.name);
  }
  return names;
}

}  // namespace rofigs
