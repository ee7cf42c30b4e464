#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rofigs {

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

struct FoldPlan {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<Fold> folds;
};

// Stratified k-fold plan over binary labels: test sets partition [0, n);
// within each fold's remainder a stratified 1/9 slice becomes validation,
// giving ~80/10/10 at k = 10. Deterministic in seed.
FoldPlan make_folds(std::size_t n, std::size_t k,
                    const std::vector<double>& labels, std::uint64_t seed);

// JSON array of k objects {"train": [...], "val": [...], "test": [...]}.
FoldPlan load_fold_file(const std::string& path, std::size_t n);
void save_fold_file(const FoldPlan& plan, const std::string& path);

}  // namespace rofigs
