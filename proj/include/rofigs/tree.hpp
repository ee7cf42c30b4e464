#pragma once

#include <memory>
#include <span>
#include <vector>

#include "rofigs/split.hpp"

namespace rofigs {

// Binary tree node: a leaf carries a value and the training rows it holds;
// an internal node carries an oblique split.
struct TreeNode {
  double value = 0.0;
  std::vector<std::size_t> rows;
  std::unique_ptr<ObliqueSplit> split;
  std::unique_ptr<TreeNode> left;
  std::unique_ptr<TreeNode> right;

  bool is_leaf() const { return split == nullptr; }

  static std::unique_ptr<TreeNode> leaf(double value,
                                        std::vector<std::size_t> rows);
  std::unique_ptr<TreeNode> clone() const;
};

// Leaves in depth-first, left-before-right order. This ordering defines the
// leaf index used in candidate tie-breaking and fit reports.
std::vector<TreeNode*> collect_leaves(TreeNode& root);
std::vector<const TreeNode*> collect_leaves(const TreeNode& root);

std::size_t count_internal(const TreeNode& root);

double tree_predict_row(const TreeNode& root, const Matrix& X,
                        std::size_t row);

// Adds each row's leaf value into out (out must have X.rows() entries).
void tree_predict_accumulate(const TreeNode& root, const Matrix& X,
                             std::span<double> out);

}  // namespace rofigs
