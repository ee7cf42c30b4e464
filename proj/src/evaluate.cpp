#include "rofigs/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>
#include <thread>

#include "rofigs/error.hpp"
#include "rofigs/metrics.hpp"
#include "rofigs/rng.hpp"

namespace rofigs {

namespace {

void collect_split_sets(const TreeNode& node, ModelStats& stats) {
  if (node.is_leaf()) return;
  ++stats.n_splits;
  std::vector<std::size_t> nz = node.split->nonzero_features();
  stats.avg_features_per_split += static_cast<double>(nz.size());
  ++stats.cooccurrence[nz];
  collect_split_sets(*node.left, stats);
  collect_split_sets(*node.right, stats);
}

std::vector<int> to_int_labels(const std::vector<double>& labels) {
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i)
    out[i] = labels[i] == 1.0 ? 1 : 0;
  return out;
}

std::vector<std::size_t> merge_sorted(const std::vector<std::size_t>& a,
                                      const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Runs tasks [0, count) on up to `jobs` threads. Tasks write into
// preallocated slots, so parallel and sequential execution agree exactly.
void run_tasks(std::size_t count, int jobs,
               const std::function<void(std::size_t)>& task) {
  std::vector<std::string> errors(count);
  auto guarded = [&](std::size_t i) {
    try {
      task(i);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  };
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) guarded(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::size_t n_threads =
        std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
    for (std::size_t t = 0; t < n_threads; ++t)
      pool.emplace_back([&] {
        for (;;) {
          std::size_t i = next.fetch_add(1);
          if (i >= count) return;
          guarded(i);
        }
      });
    for (auto& th : pool) th.join();
  }
  for (const auto& msg : errors)
    if (!msg.empty()) throw Error(msg);
}

std::string format_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& v) {
  MeanStd out;
  if (v.empty()) return out;
  for (double x : v) out.mean += x;
  out.mean /= static_cast<double>(v.size());
  for (double x : v) out.std += (x - out.mean) * (x - out.mean);
  out.std = std::sqrt(out.std / static_cast<double>(v.size()));
  return out;
}

}  // namespace

ModelStats model_stats(const TreeSumModel& model) {
  ModelStats stats;
  stats.n_trees = model.trees.size();
  for (const auto& t : model.trees) collect_split_sets(*t, stats);
  if (stats.n_splits > 0)
    stats.avg_features_per_split /= static_cast<double>(stats.n_splits);
  return stats;
}

MetricReport cross_validate(const Dataset& data, const FitConfig& cfg,
                            const FoldPlan& folds, Encoding encoding,
                            int jobs) {
  if (folds.folds.empty()) throw Error("cross_validate: empty fold plan");
  MetricReport report;
  report.folds.resize(folds.folds.size());

  run_tasks(folds.folds.size(), jobs, [&](std::size_t f) {
    try {
      const Fold& fold = folds.folds[f];
      std::vector<std::size_t> trainval =
          merge_sorted(fold.train, fold.validation);
      Dataset fit_part = data.subset(trainval);
      Dataset test_part = data.subset(fold.test);

      Encoder enc = fit_encoder(fit_part, encoding);
      Dataset fit_enc = enc.transform(fit_part);
      Dataset test_enc = enc.transform(test_part);
      MinMaxScaler scaler = fit_scaler(fit_enc);
      fit_enc = scaler.transform(fit_enc);
      test_enc = scaler.transform(test_enc);

      FitConfig fold_cfg = cfg;
      fold_cfg.seed = derive_seed(cfg.seed, 0xc0de, f);
      FitResult res = fit(fit_enc, fold_cfg);

      std::vector<int> pred = predict_class(res.model, test_enc.to_matrix());
      std::vector<int> truth = to_int_labels(test_part.labels);
      report.folds[f].balanced_accuracy = balanced_accuracy(truth, pred);
      report.folds[f].stats = model_stats(res.model);
    } catch (const std::exception& e) {
      throw Error("fold " + std::to_string(f) + ": " + e.what());
    }
  });

  std::vector<double> scores;
  scores.reserve(report.folds.size());
  for (const auto& fs : report.folds) scores.push_back(fs.balanced_accuracy);
  MeanStd ms = mean_std(scores);
  report.mean = ms.mean;
  report.stddev = ms.std;
  return report;
}

std::vector<std::size_t> GridSpec::default_beams(std::size_t d) {
  auto ceil_div = [](std::size_t a, std::size_t b) { return (a + b - 1) / b; };
  std::vector<std::size_t> beams{
      1,
      2,
      static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d)))),
      ceil_div(d, 4),
      ceil_div(d, 2),
      d};
  for (auto& b : beams) b = std::clamp<std::size_t>(b, 1, d);
  std::sort(beams.begin(), beams.end());
  beams.erase(std::unique(beams.begin(), beams.end()), beams.end());
  return beams;
}

GridSpec GridSpec::resolved(std::size_t d) const {
  GridSpec out = *this;
  if (out.beam_sizes.empty()) {
    out.beam_sizes = default_beams(d);
  } else {
    for (std::size_t b : out.beam_sizes)
      if (b < 1 || b > d)
        throw Error("grid beam size " + std::to_string(b) +
                    " out of range [1, " + std::to_string(d) + "]");
    std::sort(out.beam_sizes.begin(), out.beam_sizes.end());
    out.beam_sizes.erase(
        std::unique(out.beam_sizes.begin(), out.beam_sizes.end()),
        out.beam_sizes.end());
  }
  if (out.min_imp_dec.empty()) throw Error("grid has no impurity values");
  return out;
}

GridResult grid_search(const Dataset& data, const GridSpec& grid,
                       const FoldPlan& folds, Encoding encoding,
                       const FitConfig& base, bool select_on_test, int jobs) {
  // grid beams are defined on the encoded feature count
  std::size_t d_enc = fit_encoder(data, encoding).output_names().size();
  GridSpec spec = grid.resolved(d_enc);

  GridResult result;
  for (double imp : spec.min_imp_dec)
    for (std::size_t beam : spec.beam_sizes) {
      GridCell cell;
      cell.min_imp_dec = imp;
      cell.beam_size = beam;
      cell.fold_scores.resize(folds.folds.size());
      result.cells.push_back(std::move(cell));
    }

  const std::size_t n_folds = folds.folds.size();
  run_tasks(result.cells.size() * n_folds, jobs, [&](std::size_t task) {
    const std::size_t ci = task / n_folds;
    const std::size_t f = task % n_folds;
    GridCell& cell = result.cells[ci];
    try {
      const Fold& fold = folds.folds[f];
      std::vector<std::size_t> fit_rows =
          select_on_test ? merge_sorted(fold.train, fold.validation)
                         : fold.train;
      const std::vector<std::size_t>& score_rows =
          select_on_test ? fold.test : fold.validation;
      Dataset fit_part = data.subset(fit_rows);
      Dataset score_part = data.subset(score_rows);

      Encoder enc = fit_encoder(fit_part, encoding);
      Dataset fit_enc = enc.transform(fit_part);
      Dataset score_enc = enc.transform(score_part);
      MinMaxScaler scaler = fit_scaler(fit_enc);
      fit_enc = scaler.transform(fit_enc);
      score_enc = scaler.transform(score_enc);

      FitConfig cfg = base;
      cfg.min_imp_dec = cell.min_imp_dec;
      cfg.beam_size = std::min(cell.beam_size, fit_enc.d());
      cfg.seed = derive_seed(base.seed, 0x96d5, ci, f);
      FitResult res = fit(fit_enc, cfg);

      std::vector<int> pred = predict_class(res.model, score_enc.to_matrix());
      std::vector<int> truth = to_int_labels(score_part.labels);
      cell.fold_scores[f] = balanced_accuracy(truth, pred);
    } catch (const std::exception& e) {
      throw Error("grid cell (min_imp_dec=" + format_double(cell.min_imp_dec) +
                  ", beam_size=" + std::to_string(cell.beam_size) + ") fold " +
                  std::to_string(f) + ": " + e.what());
    }
  });

  for (auto& cell : result.cells) {
    MeanStd ms = mean_std(cell.fold_scores);
    cell.mean_score = ms.mean;
    cell.std_score = ms.std;
  }

  const GridCell* best = &result.cells.front();
  for (const auto& cell : result.cells) {
    if (cell.mean_score > best->mean_score ||
        (cell.mean_score == best->mean_score &&
         (cell.beam_size < best->beam_size ||
          (cell.beam_size == best->beam_size &&
           cell.min_imp_dec > best->min_imp_dec))))
      best = &cell;
  }
  result.best = base;
  result.best.min_imp_dec = best->min_imp_dec;
  result.best.beam_size = best->beam_size;
  return result;
}

std::string grid_table_csv(const GridResult& result) {
  std::ostringstream out;
  out << "min_imp_dec,beam_size,mean_balanced_accuracy,std_balanced_accuracy\n";
  for (const auto& cell : result.cells)
    out << format_double(cell.min_imp_dec) << "," << cell.beam_size << ","
        << format_double(cell.mean_score) << ","
        << format_double(cell.std_score) << "\n";
  return out.str();
}

std::string fold_table_csv(const MetricReport& report) {
  std::ostringstream out;
  out << "fold,balanced_accuracy,n_trees,n_splits,avg_features_per_split\n";
  for (std::size_t f = 0; f < report.folds.size(); ++f) {
    const FoldScore& fs = report.folds[f];
    out << f << "," << format_double(fs.balanced_accuracy) << ","
        << fs.stats.n_trees << "," << fs.stats.n_splits << ","
        << format_double(fs.stats.avg_features_per_split) << "\n";
  }
  return out.str();
}

}  // namespace rofigs
