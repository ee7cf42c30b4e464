#pragma once

#include <vector>

#include "rofigs/dataset.hpp"

namespace rofigs {

// Per-column min-max scaling to [0, 1], learnt from fit data. Held-out
// values outside the fitted range are not clipped. A constant column maps
// to all zeros.
struct MinMaxScaler {
  std::vector<double> mins;
  std::vector<double> maxs;

  static MinMaxScaler identity(std::size_t d);
  Dataset transform(const Dataset& data) const;
  double transform_value(std::size_t column, double x) const;
};

MinMaxScaler fit_scaler(const Dataset& data);

}  // namespace rofigs
