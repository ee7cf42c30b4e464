#pragma once

#include <string>
#include <vector>

#include "rofigs/dataset.hpp"

namespace rofigs {

// Nominal-feature encodings. OneHot expands each nominal column into one
// indicator column per category; Count maps a category to the number of
// positive samples it co-occurs with; Prop maps it to the fraction of
// positives. Count/Prop are target encodings and need binary labels.
enum class Encoding { OneHot, Count, Prop };

std::string encoding_name(Encoding e);
Encoding encoding_from_name(const std::string& name);

struct ColumnScheme {
  std::string name;
  bool nominal = false;
  std::vector<std::string> categories;  // fit-data categories, in order
  std::vector<double> mapped;           // Count/Prop statistic per category
};

class Encoder {
public:
  Encoder() = default;
  Encoder(Encoding strategy, std::vector<ColumnScheme> schema)
      : strategy_(strategy), schema_(std::move(schema)) {}

  // Pass-through encoder for an already-numeric schema.
  static Encoder identity(const std::vector<std::string>& column_names);

  Encoding strategy() const { return strategy_; }
  const std::vector<ColumnScheme>& schema() const { return schema_; }

  // All-numeric output. Unseen categories map to a zero indicator block
  // (OneHot) or to 0.0 (Count/Prop) so inference never needs labels.
  Dataset transform(const Dataset& data) const;

  std::vector<std::string> output_names() const;

private:
  Encoding strategy_ = Encoding::OneHot;
  std::vector<ColumnScheme> schema_;
};

Encoder fit_encoder(const Dataset& data, Encoding strategy);

}  // namespace rofigs
