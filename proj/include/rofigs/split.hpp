#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rofigs/matrix.hpp"

namespace rofigs {

// An oblique split over a feature subset: route LEFT iff
//   sum_j weights[j] * x[features[j]] <= threshold.
// features lists the sampled beam in ascending order; weights is aligned
// and has at least one non-zero entry (zeros mark pruned beam features).
struct ObliqueSplit {
  std::vector<std::size_t> features;
  std::vector<double> weights;
  double threshold = 0.0;

  bool routes_left(const Matrix& X, std::size_t row) const;
  std::size_t nonzero_count() const;
  std::vector<std::size_t> nonzero_features() const;
};

struct SplitSearchConfig {
  double impurity_weight = 1.0;     // weight of the fitness term vs the
                                    // sparsity penalty (paper's C)
  int gd_iterations = 100;
  double learning_rate = 0.05;
  double sigmoid_steepness = 10.0;  // soft-assignment sharpness on [0,1] data
  double sqrt_smoothing = 1e-8;     // delta under the square root
  double sparsify_epsilon = 0.05;   // relative weight-pruning threshold
  int restarts = 3;
  std::uint64_t seed = 0;
};

// (sum_i sqrt(|w_i|))^2 — the sparsity-inducing penalty on split weights.
double half_norm(std::span<const double> w);

// Sum of squared deviations from the mean. Empty input gives 0.
double node_sse(std::span<const double> values);

struct ObjectiveEval {
  double value = 0.0;
  std::vector<double> grad_w;
  double grad_b = 0.0;
};

// Smoothed split objective and its exact analytic gradient:
//
//   value = (sum_j sqrt(|w_j| + delta))^2 + c * g(w, b)
//   g     = sum_i s_i (r_i - mu_R)^2 + (1 - s_i)(r_i - mu_L)^2
//   s_i   = sigmoid(steepness * (w . x_i + b))
//
// with mu_R, mu_L the s-weighted residual means of each side. Since the
// weighted mean makes sum_i s_i (r_i - mu_R) vanish, dg/ds_i collapses to
// (r_i - mu_R)^2 - (r_i - mu_L)^2, which is what the gradients use. A side
// whose total soft mass falls below 1e-12 is dropped from g (the empty-side
// limit), never an error.
ObjectiveEval smoothed_objective(std::span<const double> w, double b,
                                 const Matrix& X_sub,
                                 std::span<const double> residuals,
                                 const SplitSearchConfig& cfg);

// Learns one oblique split on node_rows restricted to the beam columns by
// minimizing smoothed_objective from `restarts` random starts. Returns
// nullopt when the node has fewer than 2 rows, when every weight is pruned,
// or when the final hard split leaves a side empty.
std::optional<ObliqueSplit> learn_oblique_split(
    const Matrix& X, std::span<const double> residuals,
    std::span<const std::size_t> node_rows,
    std::span<const std::size_t> beam, const SplitSearchConfig& cfg);

// Unnormalized SSE decrease of the hard split on node_rows:
// node_sse(parent) - node_sse(left) - node_sse(right); 0 if a side is empty.
double impurity_decrease(const ObliqueSplit& split, const Matrix& X,
                         std::span<const double> residuals,
                         std::span<const std::size_t> node_rows);

struct ScoredSplit {
  ObliqueSplit split;
  double decrease = 0.0;
};

// Exhaustive single-feature search over every midpoint between consecutive
// distinct values; ties go to the lowest feature index, then the lowest
// threshold. nullopt when every feature is constant on the node.
std::optional<ScoredSplit> best_univariate_split(
    const Matrix& X, std::span<const double> residuals,
    std::span<const std::size_t> node_rows);

}  // namespace rofigs
