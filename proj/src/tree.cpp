#include "rofigs/tree.hpp"

namespace rofigs {

std::unique_ptr<TreeNode> TreeNode::leaf(double value,
                                         std::vector<std::size_t> rows) {
  auto node = std::make_unique<TreeNode>();
  node->value = value;
  node->rows = std::move(rows);
  return node;
}

std::unique_ptr<TreeNode> TreeNode::clone() const {
  auto node = std::make_unique<TreeNode>();
  node->value = value;
  node->rows = rows;
  if (split) {
    node->split = std::make_unique<ObliqueSplit>(*split);
    node->left = left->clone();
    node->right = right->clone();
  }
  return node;
}

namespace {

template <typename Node, typename Out>
void collect_impl(Node& node, Out& out) {
  if (node.is_leaf()) {
    out.push_back(&node);
    return;
  }
  collect_impl(*node.left, out);
  collect_impl(*node.right, out);
}

}  // namespace

std::vector<TreeNode*> collect_leaves(TreeNode& root) {
  std::vector<TreeNode*> out;
  collect_impl(root, out);
  return out;
}

std::vector<const TreeNode*> collect_leaves(const TreeNode& root) {
  std::vector<const TreeNode*> out;
  collect_impl(root, out);
  return out;
}

std::size_t count_internal(const TreeNode& root) {
  if (root.is_leaf()) return 0;
  return 1 + count_internal(*root.left) + count_internal(*root.right);
}

double tree_predict_row(const TreeNode& root, const Matrix& X,
                        std::size_t row) {
  const TreeNode* node = &root;
  while (!node->is_leaf())
    node = node->split->routes_left(X, row) ? node->left.get()
                                            : node->right.get();
  return node->value;
}

void tree_predict_accumulate(const TreeNode& root, const Matrix& X,
                             std::span<double> out) {
  for (std::size_t i = 0; i < X.rows(); ++i)
    out[i] += tree_predict_row(root, X, i);
}

}  // namespace rofigs
