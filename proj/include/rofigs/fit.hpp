#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rofigs/dataset.hpp"
#include "rofigs/encode.hpp"
#include "rofigs/scale.hpp"
#include "rofigs/tree.hpp"

namespace rofigs {

enum class FitMode { Oblique, UnivariateFigs };

constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

struct FitConfig {
  std::size_t beam_size = 0;  // features per candidate split, in [1, d]
  double min_imp_dec = 0.1;   // impurity-decrease stopping floor
  std::size_t max_splits = kUnlimited;
  std::size_t max_trees = kUnlimited;
  int repetitions = 5;        // beam resamplings per tree per iteration
  SplitSearchConfig split_search;
  FitMode mode = FitMode::Oblique;
  std::uint64_t seed = 0;
};

enum class StopReason { ImpurityFloor, MaxSplits, NoValidSplit };
std::string stop_reason_name(StopReason r);

constexpr int kNewStump = -1;

struct IterationRecord {
  int target_tree = kNewStump;  // kNewStump or index of the split tree
  int target_leaf = -1;         // depth-first leaf index within the tree
  double decrease = 0.0;
  int repetition = 0;           // resampling round that produced the split
  std::vector<std::size_t> beam;
};

struct FitReport {
  std::vector<IterationRecord> iterations;
  StopReason stop = StopReason::ImpurityFloor;
};

// Greedy additive sum of oblique trees. Each iteration grows the model by
// exactly one split: either a new stump or a replacement of an existing
// leaf, whichever candidate decreases the residual SSE the most.
struct TreeSumModel {
  Task task = Task::BinaryClassification;
  double label_offset = 0.5;
  std::vector<std::unique_ptr<TreeNode>> trees;
  Encoder encoder;      // schema fingerprint: how raw columns become features
  MinMaxScaler scaler;
  FitConfig config;

  TreeSumModel() = default;
  TreeSumModel(TreeSumModel&&) = default;
  TreeSumModel& operator=(TreeSumModel&&) = default;

  std::size_t n_splits() const;
};

// Residuals of y_centered against every tree except `exclude`
// (pass kNoExclude to subtract all trees).
constexpr std::size_t kNoExclude = std::numeric_limits<std::size_t>::max();
std::vector<double> residuals(const TreeSumModel& model, std::size_t exclude,
                              const Matrix& X,
                              const std::vector<double>& y_centered);

struct FitResult {
  TreeSumModel model;
  FitReport report;
};

// data must be all-numeric (encode + scale first).
FitResult fit(const Dataset& data, const FitConfig& cfg);

std::vector<double> predict_raw(const TreeSumModel& model, const Matrix& X);
std::vector<double> predict_proba(const TreeSumModel& model, const Matrix& X);
std::vector<int> predict_class(const TreeSumModel& model, const Matrix& X);

}  // namespace rofigs
