#include "rofigs/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "rofigs/error.hpp"

namespace rofigs {

double balanced_accuracy(std::span<const int> y_true,
                         std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size())
    throw Error("balanced accuracy: length mismatch");
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] == 1)
      y_pred[i] == 1 ? ++tp : ++fn;
    else
      y_pred[i] == 0 ? ++tn : ++fp;
  }
  if (tp + fn == 0 || tn + fp == 0)
    throw Error("balanced accuracy undefined: only one class present");
  double tpr = static_cast<double>(tp) / static_cast<double>(tp + fn);
  double tnr = static_cast<double>(tn) / static_cast<double>(tn + fp);
  return 0.5 * (tpr + tnr);
}

std::vector<double> mean_rank(
    const std::vector<std::vector<double>>& scores) {
  const std::size_t m = scores.size();
  if (m == 0) return {};
  const std::size_t n_datasets = scores[0].size();
  for (const auto& row : scores)
    if (row.size() != n_datasets)
      throw Error("mean rank: ragged score table");
  if (n_datasets == 0) throw Error("mean rank: no datasets");

  std::vector<double> sums(m, 0.0);
  std::vector<std::size_t> order(m);
  for (std::size_t d = 0; d < n_datasets; ++d) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return scores[a][d] < scores[b][d];
                     });
    // ascending positions 1..m double as reversed ranks (best gets m);
    // tied scores share the average of their positions
    std::size_t i = 0;
    while (i < m) {
      std::size_t j = i;
      while (j + 1 < m && scores[order[j + 1]][d] == scores[order[i]][d]) ++j;
      double avg = 0.5 * static_cast<double>((i + 1) + (j + 1));
      for (std::size_t k = i; k <= j; ++k) sums[order[k]] += avg;
      i = j + 1;
    }
  }
  for (double& s : sums) s /= static_cast<double>(n_datasets);
  return sums;
}

}  // namespace rofigs
