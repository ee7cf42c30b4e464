#include "rofigs/fit.hpp"

#include <algorithm>
#include <cmath>

#include "rofigs/error.hpp"
#include "rofigs/rng.hpp"

namespace rofigs {

std::string stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::ImpurityFloor: return "impurity_floor";
    case StopReason::MaxSplits: return "max_splits";
    case StopReason::NoValidSplit: return "no_valid_split";
  }
  return "impurity_floor";
}

std::size_t TreeSumModel::n_splits() const {
  std::size_t total = 0;
  for (const auto& t : trees) total += count_internal(*t);
  return total;
}

namespace {

std::vector<double> residuals_of(
    const std::vector<std::unique_ptr<TreeNode>>& trees, std::size_t exclude,
    const Matrix& X, const std::vector<double>& y_centered) {
  std::vector<double> r = y_centered;
  std::vector<double> pred(X.rows(), 0.0);
  for (std::size_t t = 0; t < trees.size(); ++t) {
    if (t == exclude) continue;
    std::fill(pred.begin(), pred.end(), 0.0);
    tree_predict_accumulate(*trees[t], X, pred);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= pred[i];
  }
  return r;
}

}  // namespace

std::vector<double> residuals(const TreeSumModel& model, std::size_t exclude,
                              const Matrix& X,
                              const std::vector<double>& y_centered) {
  if (exclude != kNoExclude && exclude >= model.trees.size())
    throw Error("residuals: tree index " + std::to_string(exclude) +
                " out of range");
  return residuals_of(model.trees, exclude, X, y_centered);
}

namespace {

struct Candidate {
  ObliqueSplit split;
  double decrease = 0.0;
  int tree = kNewStump;     // kNewStump or tree index
  int leaf = 0;             // depth-first leaf index
  TreeNode* leaf_node = nullptr;
  int repetition = 0;       // 0-based resampling round
};

// higher decrease first; then existing trees in index order ahead of the
// new stump; then lower leaf, earlier repetition
bool better(const Candidate& a, const Candidate& b, std::size_t n_trees) {
  if (a.decrease != b.decrease) return a.decrease > b.decrease;
  auto order = [&](const Candidate& c) {
    return c.tree == kNewStump ? n_trees : static_cast<std::size_t>(c.tree);
  };
  if (order(a) != order(b)) return order(a) < order(b);
  if (a.leaf != b.leaf) return a.leaf < b.leaf;
  return a.repetition < b.repetition;
}

class Fitter {
public:
  Fitter(const Matrix& X, std::vector<double> y_centered, const FitConfig& cfg)
      : X_(X), y_(std::move(y_centered)), cfg_(cfg), n_(X.rows()) {}

  void run(TreeSumModel& model, FitReport& report) {
    trees_ = &model.trees;
    if (n_ < 2) {
      finish_degenerate(model, report, StopReason::NoValidSplit);
      return;
    }
    bool first_iteration = true;
    std::size_t iteration = 0;
    StopReason stop = StopReason::ImpurityFloor;
    while (true) {
      if (total_splits_ >= cfg_.max_splits) {
        stop = StopReason::MaxSplits;
        break;
      }
      bool any_splittable = false;
      std::vector<Candidate> candidates = gather(iteration, any_splittable);
      if (candidates.empty()) {
        stop = any_splittable ? StopReason::ImpurityFloor
                              : StopReason::NoValidSplit;
        break;
      }
      std::size_t best = 0;
      for (std::size_t i = 1; i < candidates.size(); ++i)
        if (better(candidates[i], candidates[best], trees_->size())) best = i;
      Candidate& chosen = candidates[best];
      if (!(chosen.decrease > cfg_.min_imp_dec) && !first_iteration) {
        stop = StopReason::ImpurityFloor;
        break;
      }
      first_iteration = false;
      commit(chosen, report);
      backfit();
      ++iteration;
    }
    if (trees_->empty()) {
      finish_degenerate(model, report, stop);
      return;
    }
    report.stop = stop;
  }

private:
  void finish_degenerate(TreeSumModel& model, FitReport& report,
                         StopReason stop) {
    double mean = 0.0;
    for (double y : y_) mean += y;
    if (n_ > 0) mean /= static_cast<double>(n_);
    std::vector<std::size_t> rows(n_);
    for (std::size_t i = 0; i < n_; ++i) rows[i] = i;
    model.trees.push_back(TreeNode::leaf(mean, std::move(rows)));
    report.stop = stop;
  }

  std::vector<Candidate> gather(std::size_t iteration, bool& any_splittable) {
    std::vector<Candidate> out;
    const std::size_t d = X_.cols();
    const bool oblique = cfg_.mode == FitMode::Oblique;

    // fresh stump over residuals of the whole current model
    if (trees_->size() < cfg_.max_trees && n_ >= 2) {
      any_splittable = true;
      std::vector<double> res = residuals_of(*trees_, kNoExclude, X_, y_);
      std::vector<std::size_t> all_rows(n_);
      for (std::size_t i = 0; i < n_; ++i) all_rows[i] = i;
      add_candidate(out, res, all_rows, kNewStump, 0, nullptr, 0, iteration,
                    d, oblique);
    }

    for (std::size_t ti = 0; ti < trees_->size(); ++ti) {
      std::vector<double> res = residuals_of(*trees_, ti, X_, y_);
      std::vector<TreeNode*> leaves = collect_leaves(*(*trees_)[ti]);
      const int reps = oblique ? cfg_.repetitions : 1;
      double tree_best = 0.0;
      for (int rep = 0; rep < reps; ++rep) {
        for (std::size_t li = 0; li < leaves.size(); ++li) {
          if (leaves[li]->rows.size() < 2) continue;
          any_splittable = true;
          double dec = add_candidate(out, res, leaves[li]->rows,
                                     static_cast<int>(ti),
                                     static_cast<int>(li), leaves[li], rep,
                                     iteration, d, oblique);
          tree_best = std::max(tree_best, dec);
        }
        // enough signal from this tree; stop resampling its beam
        if (tree_best > cfg_.min_imp_dec) break;
      }
    }
    return out;
  }

  // returns the candidate's decrease (0 when none was added)
  double add_candidate(std::vector<Candidate>& out,
                       const std::vector<double>& res,
                       const std::vector<std::size_t>& rows, int tree,
                       int leaf, TreeNode* leaf_node, int rep,
                       std::size_t iteration, std::size_t d, bool oblique) {
    const std::uint64_t slot =
        tree == kNewStump ? 0xffffULL : static_cast<std::uint64_t>(tree);
    std::optional<ObliqueSplit> split;
    if (oblique) {
      Rng beam_rng(derive_seed(cfg_.seed, 0xbea3, iteration, slot,
                               static_cast<std::uint64_t>(rep)));
      std::vector<std::size_t> beam =
          beam_rng.sample_indices(d, cfg_.beam_size);
      SplitSearchConfig sc = cfg_.split_search;
      sc.seed = derive_seed(cfg_.seed, 0x5471, iteration,
                            (slot << 20) ^ static_cast<std::uint64_t>(rep),
                            static_cast<std::uint64_t>(leaf));
      split = learn_oblique_split(X_, res, rows, beam, sc);
    } else {
      auto scored = best_univariate_split(X_, res, rows);
      if (scored) split = std::move(scored->split);
    }
    if (!split) return 0.0;
    double dec = impurity_decrease(*split, X_, res, rows);
    if (!(dec > 0.0)) return 0.0;  // cannot beat any positive floor
    Candidate c;
    c.split = std::move(*split);
    c.decrease = dec;
    c.tree = tree;
    c.leaf = leaf;
    c.leaf_node = leaf_node;
    c.repetition = rep;
    out.push_back(std::move(c));
    return dec;
  }

  void commit(Candidate& chosen, FitReport& report) {
    const bool stump = chosen.tree == kNewStump;
    std::vector<double> res = residuals_of(
        *trees_, stump ? kNoExclude : static_cast<std::size_t>(chosen.tree),
        X_, y_);

    std::vector<std::size_t> rows;
    if (stump) {
      rows.resize(n_);
      for (std::size_t i = 0; i < n_; ++i) rows[i] = i;
    } else {
      rows = chosen.leaf_node->rows;
    }
    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t row : rows) {
      if (chosen.split.routes_left(X_, row))
        left_rows.push_back(row);
      else
        right_rows.push_back(row);
    }
    if (left_rows.empty() || right_rows.empty())
      throw Error("internal: committed split has an empty side");
    auto mean_of = [&](const std::vector<std::size_t>& idx) {
      double m = 0.0;
      for (std::size_t i : idx) m += res[i];
      return m / static_cast<double>(idx.size());
    };
    IterationRecord rec;
    rec.target_tree = chosen.tree;
    rec.target_leaf = chosen.leaf;
    rec.decrease = chosen.decrease;
    rec.repetition = chosen.repetition + 1;
    rec.beam = chosen.split.features;

    auto left = TreeNode::leaf(mean_of(left_rows), std::move(left_rows));
    auto right = TreeNode::leaf(mean_of(right_rows), std::move(right_rows));
    if (stump) {
      auto node = std::make_unique<TreeNode>();
      node->split = std::make_unique<ObliqueSplit>(std::move(chosen.split));
      node->left = std::move(left);
      node->right = std::move(right);
      node->rows = std::move(rows);
      trees_->push_back(std::move(node));
    } else {
      TreeNode* target = chosen.leaf_node;
      target->split = std::make_unique<ObliqueSplit>(std::move(chosen.split));
      target->left = std::move(left);
      target->right = std::move(right);
      // target->rows stays: rows reaching this (now internal) node
    }
    ++total_splits_;
    report.iterations.push_back(std::move(rec));
  }

  // In-order leaf refresh, repeated until every tree's leaves equal the mean
  // residual (excluding that tree) over their rows. A single pass is not a
  // fixed point when tree partitions overlap, so iterate to convergence.
  void backfit() {
    const std::size_t T = trees_->size();
    std::vector<std::vector<double>> preds(T, std::vector<double>(n_, 0.0));
    std::vector<double> total(n_, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
      tree_predict_accumulate(*(*trees_)[t], X_, preds[t]);
      for (std::size_t i = 0; i < n_; ++i) total[i] += preds[t][i];
    }
    for (int pass = 0; pass < 500; ++pass) {
      double max_change = 0.0;
      for (std::size_t t = 0; t < T; ++t) {
        for (TreeNode* leaf : collect_leaves(*(*trees_)[t])) {
          double m = 0.0;
          for (std::size_t i : leaf->rows)
            m += y_[i] - (total[i] - preds[t][i]);
          m /= static_cast<double>(leaf->rows.size());
          double change = std::abs(m - leaf->value);
          max_change = std::max(max_change, change);
          if (change != 0.0) {
            double delta = m - leaf->value;
            leaf->value = m;
            for (std::size_t i : leaf->rows) {
              preds[t][i] += delta;
              total[i] += delta;
            }
          }
        }
      }
      if (max_change <= 1e-13) break;
    }
  }

  const Matrix& X_;
  std::vector<double> y_;
  FitConfig cfg_;
  std::size_t n_;
  std::vector<std::unique_ptr<TreeNode>>* trees_ = nullptr;
  std::size_t total_splits_ = 0;
};

}  // namespace

FitResult fit(const Dataset& data, const FitConfig& cfg) {
  if (!data.all_numeric())
    throw Error("fit requires all-numeric data, encode first");
  const std::size_t d = data.d();
  if (cfg.mode == FitMode::Oblique &&
      (cfg.beam_size < 1 || cfg.beam_size > d))
    throw Error("beam size " + std::to_string(cfg.beam_size) +
                " out of range [1, " + std::to_string(d) + "]");
  if (cfg.min_imp_dec < 0.0) throw Error("min impurity decrease must be >= 0");
  if (cfg.repetitions < 1) throw Error("repetitions must be >= 1");
  if (data.task == Task::BinaryClassification)
    for (double y : data.labels)
      if (y != 0.0 && y != 1.0)
        throw Error("binary task requires labels in {0, 1}");

  FitResult out;
  out.model.task = data.task;
  out.model.label_offset =
      data.task == Task::BinaryClassification ? 0.5 : 0.0;
  out.model.config = cfg;
  out.model.encoder = Encoder::identity(data.feature_names());
  out.model.scaler = MinMaxScaler::identity(d);

  Matrix X = data.to_matrix();
  std::vector<double> y_centered = data.labels;
  for (double& y : y_centered) y -= out.model.label_offset;

  Fitter fitter(X, std::move(y_centered), cfg);
  fitter.run(out.model, out.report);
  return out;
}

std::vector<double> predict_raw(const TreeSumModel& model, const Matrix& X) {
  std::size_t expected = model.scaler.mins.size();
  if (X.cols() != expected)
    throw Error("predict: expected " + std::to_string(expected) +
                " feature columns, got " + std::to_string(X.cols()));
  std::vector<double> out(X.rows(), 0.0);
  for (const auto& tree : model.trees)
    tree_predict_accumulate(*tree, X, out);
  return out;
}

std::vector<double> predict_proba(const TreeSumModel& model, const Matrix& X) {
  if (model.task != Task::BinaryClassification)
    throw Error("predict_proba requires a classification model");
  std::vector<double> out = predict_raw(model, X);
  for (double& v : out) {
    if (v >= 0.0)
      v = 1.0 / (1.0 + std::exp(-v));
    else {
      double e = std::exp(v);
      v = e / (1.0 + e);
    }
  }
  return out;
}

std::vector<int> predict_class(const TreeSumModel& model, const Matrix& X) {
  if (model.task != Task::BinaryClassification)
    throw Error("predict_class requires a classification model");
  std::vector<double> raw = predict_raw(model, X);
  std::vector<int> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = raw[i] > 0.0 ? 1 : 0;
  return out;
}

}  // namespace rofigs
