#include "rofigs/scale.hpp"

#include <algorithm>

#include "rofigs/error.hpp"

namespace rofigs {

MinMaxScaler MinMaxScaler::identity(std::size_t d) {
  MinMaxScaler s;
  s.mins.assign(d, 0.0);
  s.maxs.assign(d, 1.0);
  return s;
}

MinMaxScaler fit_scaler(const Dataset& data) {
  if (!data.all_numeric())
    throw Error("scaler requires all-numeric data, encode first");
  MinMaxScaler s;
  s.mins.reserve(data.d());
  s.maxs.reserve(data.d());
  for (const auto& col : data.columns) {
    auto [lo, hi] = std::minmax_element(col.numeric.begin(), col.numeric.end());
    s.mins.push_back(*lo);
    s.maxs.push_back(*hi);
  }
  return s;
}

double MinMaxScaler::transform_value(std::size_t column, double x) const {
  double lo = mins[column], hi = maxs[column];
  if (hi == lo) return 0.0;
  return (x - lo) / (hi - lo);
}

Dataset MinMaxScaler::transform(const Dataset& data) const {
  if (!data.all_numeric())
    throw Error("scaler requires all-numeric data, encode first");
  if (data.d() != mins.size())
    throw Error("scaler fitted on " + std::to_string(mins.size()) +
                " columns, got " + std::to_string(data.d()));
  Dataset out = data;
  for (std::size_t j = 0; j < out.columns.size(); ++j)
    for (double& x : out.columns[j].numeric) x = transform_value(j, x);
  return out;
}

}  // namespace rofigs
