#pragma once

#include <map>
#include <string>
#include <vector>

#include "rofigs/fit.hpp"
#include "rofigs/folds.hpp"

namespace rofigs {

struct ModelStats {
  std::size_t n_trees = 0;
  std::size_t n_splits = 0;
  double avg_features_per_split = 0.0;  // mean non-zero weights; 0 if no splits
  // non-zero feature-index set of each split -> number of splits using it
  std::map<std::vector<std::size_t>, std::size_t> cooccurrence;
};

ModelStats model_stats(const TreeSumModel& model);

struct FoldScore {
  double balanced_accuracy = 0.0;
  ModelStats stats;
};

struct MetricReport {
  std::vector<FoldScore> folds;
  double mean = 0.0;
  double stddev = 0.0;  // population std across folds
};

// Per fold: encoder and scaler are fitted on train+validation, the test
// split is transformed with them, the model is fitted on train+validation
// and scored on test. Per-fold seeds derive from (cfg.seed, fold).
MetricReport cross_validate(const Dataset& data, const FitConfig& cfg,
                            const FoldPlan& folds, Encoding encoding,
                            int jobs = 1);

struct GridSpec {
  std::vector<double> min_imp_dec{0.05, 0.1, 1.0, 5.0, 10.0};
  std::vector<std::size_t> beam_sizes;  // empty = derive from d

  // {1, 2, ceil(sqrt(d)), ceil(d/4), ceil(d/2), d}, deduplicated and
  // clamped to [1, d]
  static std::vector<std::size_t> default_beams(std::size_t d);
  GridSpec resolved(std::size_t d) const;
};

struct GridCell {
  double min_imp_dec = 0.0;
  std::size_t beam_size = 0;
  std::vector<double> fold_scores;
  double mean_score = 0.0;
  double std_score = 0.0;
};

struct GridResult {
  std::vector<GridCell> cells;
  FitConfig best;
};

// Scores every (min_imp_dec, beam_size) cell. By default fits on each
// fold's train split and scores its validation split; with select_on_test
// it fits on train+validation and scores test instead. Ties prefer the
// smaller beam, then the larger impurity floor.
GridResult grid_search(const Dataset& data, const GridSpec& grid,
                       const FoldPlan& folds, Encoding encoding,
                       const FitConfig& base, bool select_on_test = false,
                       int jobs = 1);

std::string grid_table_csv(const GridResult& result);
std::string fold_table_csv(const MetricReport& report);

}  // namespace rofigs
