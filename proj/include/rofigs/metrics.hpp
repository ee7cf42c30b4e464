#pragma once

#include <span>
#include <vector>

namespace rofigs {

// (TPR + TNR) / 2. Throws if y_true contains a single class.
double balanced_accuracy(std::span<const int> y_true,
                         std::span<const int> y_pred);

// Reversed average ranks: scores[m][d] is method m's score on dataset d.
// Per dataset the best score receives rank M (the method count), ties share
// the average of their positions; returns per-method means across datasets.
std::vector<double> mean_rank(const std::vector<std::vector<double>>& scores);

}  // namespace rofigs
