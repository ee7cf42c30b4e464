#include "rofigs/folds.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rofigs/error.hpp"
#include "rofigs/rng.hpp"

namespace rofigs {

FoldPlan make_folds(std::size_t n, std::size_t k,
                    const std::vector<double>& labels, std::uint64_t seed) {
  if (k < 2) throw Error("fold count must be at least 2");
  if (n < k)
    throw Error("cannot make " + std::to_string(k) + " folds from " +
                std::to_string(n) + " samples");
  if (labels.size() != n) throw Error("labels length does not match n");

  // per-class index lists, shuffled once
  std::vector<std::vector<std::size_t>> classes(2);
  for (std::size_t i = 0; i < n; ++i) {
    double y = labels[i];
    if (y != 0.0 && y != 1.0)
      throw Error("stratified folds require binary labels");
    classes[y == 1.0 ? 1 : 0].push_back(i);
  }
  for (std::size_t c = 0; c < 2; ++c) {
    if (!classes[c].empty() && classes[c].size() < k) {
      std::ostringstream msg;
      msg << "stratification error: class " << c << " has "
          << classes[c].size() << " samples, fewer than " << k << " folds";
      throw Error(msg.str());
    }
  }
  Rng rng(derive_seed(seed, 0xf01d5));
  for (auto& cls : classes) rng.shuffle(cls);

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.folds.resize(k);

  for (const auto& cls : classes) {
    const std::size_t m = cls.size();
    // contiguous chunks, first m % k folds get one extra
    std::size_t start = 0;
    std::vector<std::pair<std::size_t, std::size_t>> chunks(k);
    for (std::size_t f = 0; f < k; ++f) {
      std::size_t len = m / k + (f < m % k ? 1 : 0);
      chunks[f] = {start, start + len};
      start += len;
    }
    for (std::size_t f = 0; f < k; ++f) {
      auto [tb, te] = chunks[f];
      for (std::size_t i = tb; i < te; ++i)
        plan.folds[f].test.push_back(cls[i]);
      // remainder keeps shuffled order; leading 1/9 slice is validation
      std::vector<std::size_t> rest;
      rest.reserve(m - (te - tb));
      for (std::size_t i = 0; i < m; ++i)
        if (i < tb || i >= te) rest.push_back(cls[i]);
      std::size_t n_val = rest.size() / 9;
      for (std::size_t i = 0; i < rest.size(); ++i) {
        if (i < n_val)
          plan.folds[f].validation.push_back(rest[i]);
        else
          plan.folds[f].train.push_back(rest[i]);
      }
    }
  }
  for (auto& fold : plan.folds) {
    std::sort(fold.train.begin(), fold.train.end());
    std::sort(fold.validation.begin(), fold.validation.end());
    std::sort(fold.test.begin(), fold.test.end());
  }
  return plan;
}

namespace {

std::vector<std::size_t> parse_index_array(const nlohmann::json& j,
                                           const std::string& key,
                                           std::size_t fold, std::size_t n) {
  if (!j.contains(key))
    throw Error("fold file: fold " + std::to_string(fold) + " is missing '" +
                key + "'");
  std::vector<std::size_t> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      throw Error("fold file: fold " + std::to_string(fold) +
                  " has a negative or non-integer index in '" + key + "'");
    std::size_t idx = v.get<std::size_t>();
    if (idx >= n)
      throw Error("fold file: index " + std::to_string(idx) + " in fold " +
                  std::to_string(fold) + " exceeds sample count " +
                  std::to_string(n));
    out.push_back(idx);
  }
  return out;
}

}  // namespace

FoldPlan load_fold_file(const std::string& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open fold file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("fold file: invalid JSON: " + std::string(e.what()));
  }
  if (!j.is_array() || j.empty())
    throw Error("fold file: expected a non-empty JSON array of folds");

  FoldPlan plan;
  plan.k = j.size();
  std::vector<char> covered(n, 0);
  for (std::size_t f = 0; f < j.size(); ++f) {
    Fold fold;
    fold.train = parse_index_array(j[f], "train", f, n);
    fold.validation = parse_index_array(j[f], "val", f, n);
    fold.test = parse_index_array(j[f], "test", f, n);
    std::vector<char> seen(n, 0);
    for (const auto* part : {&fold.train, &fold.validation, &fold.test})
      for (std::size_t idx : *part) {
        if (seen[idx]++)
          throw Error("fold file: index " + std::to_string(idx) +
                      " appears twice within fold " + std::to_string(f));
      }
    for (std::size_t i = 0; i < n; ++i)
      if (!seen[i])
        throw Error("fold file: fold " + std::to_string(f) +
                    " does not cover index " + std::to_string(i));
    for (std::size_t idx : fold.test) {
      if (covered[idx]++)
        throw Error("fold file: test index " + std::to_string(idx) +
                    " appears in more than one fold");
    }
    plan.folds.push_back(std::move(fold));
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!covered[i])
      throw Error("fold file: test sets do not cover index " +
                  std::to_string(i));
  return plan;
}

void save_fold_file(const FoldPlan& plan, const std::string& path) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& fold : plan.folds) {
    nlohmann::ordered_json f;
    f["train"] = fold.train;
    f["val"] = fold.validation;
    f["test"] = fold.test;
    j.push_back(std::move(f));
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write fold file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace rofigs
