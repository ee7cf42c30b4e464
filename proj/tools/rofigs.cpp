// rofigs: greedy additive sums of oblique decision trees for tabular data.
// Subcommands: train, predict, evaluate, tune, inspect.

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rofigs/csv.hpp"
#include "rofigs/dataset.hpp"
#include "rofigs/error.hpp"
#include "rofigs/evaluate.hpp"
#include "rofigs/fit.hpp"
#include "rofigs/serialize.hpp"

namespace {

using nlohmann::json;
using nlohmann::ordered_json;
using namespace rofigs;

std::string format_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

struct RunConfig {
  std::string data_path;
  std::string label_column;  // empty = last column
  std::string task = "binary";
  std::string encoding = "one-hot";
  std::string mode = "rofigs";
  std::vector<std::string> nominal;

  std::size_t beam_size = 0;  // 0 = ceil(sqrt(d))
  double min_imp_dec = 0.1;
  long long max_splits = -1;  // -1 = mode default
  long long max_trees = -1;   // -1 = unlimited
  int repetitions = 5;
  std::uint64_t seed = 0;

  double impurity_weight = 1.0;
  int gd_iterations = 100;
  double learning_rate = 0.05;
  double sigmoid_steepness = 10.0;
  double sparsify_epsilon = 0.05;
  int restarts = 3;

  std::size_t folds = 10;
  std::string fold_file;
  int jobs = 1;

  std::string grid_imp;    // comma-separated override
  std::string grid_beams;  // comma-separated override
  bool select_on_test = false;

  std::string model_path = "model.json";
  std::string report_path = "report.json";
  std::string predictions_path = "predictions.csv";
  std::string metrics_path = "metrics.json";
  std::string folds_table_path;
  std::string grid_table_path = "grid.csv";
  std::string best_config_path = "best_config.json";
};

Task parse_task(const std::string& s) {
  if (s == "binary") return Task::BinaryClassification;
  if (s == "regression") return Task::Regression;
  throw Error("unknown task: " + s + " (expected binary or regression)");
}

LoadOptions load_options(const RunConfig& rc) {
  LoadOptions opts;
  if (!rc.label_column.empty()) opts.label_column = rc.label_column;
  opts.task = parse_task(rc.task);
  opts.force_nominal.insert(rc.nominal.begin(), rc.nominal.end());
  return opts;
}

FitConfig fit_config(const RunConfig& rc, std::size_t d_encoded) {
  FitConfig cfg;
  cfg.mode = rc.mode == "figs" ? FitMode::UnivariateFigs : FitMode::Oblique;
  cfg.beam_size = rc.beam_size != 0
                      ? rc.beam_size
                      : static_cast<std::size_t>(std::ceil(
                            std::sqrt(static_cast<double>(d_encoded))));
  cfg.min_imp_dec = rc.min_imp_dec;
  if (rc.max_splits >= 0)
    cfg.max_splits = static_cast<std::size_t>(rc.max_splits);
  else if (cfg.mode == FitMode::UnivariateFigs)
    cfg.max_splits = 20;  // univariate baseline keeps its split budget
  if (rc.max_trees >= 0) cfg.max_trees = static_cast<std::size_t>(rc.max_trees);
  cfg.repetitions = rc.repetitions;
  cfg.seed = rc.seed;
  cfg.split_search.impurity_weight = rc.impurity_weight;
  cfg.split_search.gd_iterations = rc.gd_iterations;
  cfg.split_search.learning_rate = rc.learning_rate;
  cfg.split_search.sigmoid_steepness = rc.sigmoid_steepness;
  cfg.split_search.sparsify_epsilon = rc.sparsify_epsilon;
  cfg.split_search.restarts = rc.restarts;
  return cfg;
}

ordered_json echo_config(const RunConfig& rc, const std::string& subcommand) {
  ordered_json j;
  j["subcommand"] = subcommand;
  j["data"] = rc.data_path;
  j["label"] = rc.label_column;
  j["task"] = rc.task;
  j["encoding"] = rc.encoding;
  j["mode"] = rc.mode;
  j["nominal"] = rc.nominal;
  j["beam_size"] = rc.beam_size;
  j["min_imp_dec"] = rc.min_imp_dec;
  j["max_splits"] = rc.max_splits;
  j["max_trees"] = rc.max_trees;
  j["repetitions"] = rc.repetitions;
  j["seed"] = rc.seed;
  j["impurity_weight"] = rc.impurity_weight;
  j["gd_iterations"] = rc.gd_iterations;
  j["learning_rate"] = rc.learning_rate;
  j["sigmoid_steepness"] = rc.sigmoid_steepness;
  j["sparsify_epsilon"] = rc.sparsify_epsilon;
  j["restarts"] = rc.restarts;
  j["folds"] = rc.folds;
  j["fold_file"] = rc.fold_file;
  j["jobs"] = rc.jobs;
  return j;
}

FoldPlan resolve_folds(const RunConfig& rc, const Dataset& data) {
  if (!rc.fold_file.empty()) return load_fold_file(rc.fold_file, data.n());
  return make_folds(data.n(), rc.folds, data.labels, rc.seed);
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto v = parse_numeric(item);
    if (!v) throw Error("cannot parse number: '" + item + "'");
    out.push_back(*v);
  }
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& s) {
  std::vector<std::size_t> out;
  for (double v : parse_double_list(s)) {
    if (v < 1 || v != std::floor(v))
      throw Error("beam sizes must be positive integers, got " +
                  format_double(v));
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

int cmd_train(const RunConfig& rc) {
  Dataset raw = load_csv(rc.data_path, load_options(rc));
  Encoding encoding = encoding_from_name(rc.encoding);
  Encoder encoder = fit_encoder(raw, encoding);
  Dataset encoded = encoder.transform(raw);
  MinMaxScaler scaler = fit_scaler(encoded);
  Dataset scaled = scaler.transform(encoded);

  FitResult res = fit(scaled, fit_config(rc, scaled.d()));
  res.model.encoder = encoder;
  res.model.scaler = scaler;

  save_model(res.model, rc.model_path);
  ordered_json report;
  report["config"] = echo_config(rc, "train");
  report["fit"] = report_to_json(res.report);
  ModelStats stats = model_stats(res.model);
  report["n_trees"] = stats.n_trees;
  report["n_splits"] = stats.n_splits;
  atomic_write(rc.report_path, report.dump(2) + "\n");
  std::cout << "model: " << rc.model_path << " (" << stats.n_trees
            << " trees, " << stats.n_splits << " splits)\n"
            << "report: " << rc.report_path << "\n";
  return 0;
}

int cmd_predict(const RunConfig& rc) {
  TreeSumModel model = load_model(rc.model_path);
  std::vector<std::string> expected;
  std::vector<bool> nominal;
  for (const auto& cs : model.encoder.schema()) {
    expected.push_back(cs.name);
    nominal.push_back(cs.nominal);
  }
  std::optional<std::string> label;
  if (!rc.label_column.empty()) label = rc.label_column;
  Dataset raw = load_csv_features(rc.data_path, expected, nominal, label);
  Dataset scaled = model.scaler.transform(model.encoder.transform(raw));
  Matrix X = scaled.to_matrix();

  std::ostringstream out;
  if (model.task == Task::BinaryClassification) {
    std::vector<double> score = predict_raw(model, X);
    std::vector<double> proba = predict_proba(model, X);
    std::vector<int> cls = predict_class(model, X);
    out << "row,raw_score,proba,class\n";
    for (std::size_t i = 0; i < score.size(); ++i)
      out << i << "," << format_double(score[i]) << ","
          << format_double(proba[i]) << "," << cls[i] << "\n";
  } else {
    std::vector<double> score = predict_raw(model, X);
    out << "row,prediction\n";
    for (std::size_t i = 0; i < score.size(); ++i)
      out << i << "," << format_double(score[i]) << "\n";
  }
  atomic_write(rc.predictions_path, out.str());
  std::cout << "predictions: " << rc.predictions_path << "\n";
  return 0;
}

int cmd_evaluate(const RunConfig& rc) {
  Dataset raw = load_csv(rc.data_path, load_options(rc));
  Encoding encoding = encoding_from_name(rc.encoding);
  FoldPlan plan = resolve_folds(rc, raw);
  std::size_t d_enc = fit_encoder(raw, encoding).output_names().size();
  MetricReport report =
      cross_validate(raw, fit_config(rc, d_enc), plan, encoding, rc.jobs);

  ordered_json j;
  j["config"] = echo_config(rc, "evaluate");
  j["mean_balanced_accuracy"] = report.mean;
  j["std_balanced_accuracy"] = report.stddev;
  ordered_json folds = ordered_json::array();
  for (std::size_t f = 0; f < report.folds.size(); ++f) {
    ordered_json fj;
    fj["fold"] = f;
    fj["balanced_accuracy"] = report.folds[f].balanced_accuracy;
    fj["n_trees"] = report.folds[f].stats.n_trees;
    fj["n_splits"] = report.folds[f].stats.n_splits;
    fj["avg_features_per_split"] =
        report.folds[f].stats.avg_features_per_split;
    folds.push_back(std::move(fj));
  }
  j["folds"] = std::move(folds);
  atomic_write(rc.metrics_path, j.dump(2) + "\n");
  if (!rc.folds_table_path.empty())
    atomic_write(rc.folds_table_path, fold_table_csv(report));
  std::cout << "balanced accuracy: " << format_double(report.mean) << " +/- "
            << format_double(report.stddev) << " across "
            << report.folds.size() << " folds\n"
            << "metrics: " << rc.metrics_path << "\n";
  return 0;
}

int cmd_tune(const RunConfig& rc) {
  Dataset raw = load_csv(rc.data_path, load_options(rc));
  Encoding encoding = encoding_from_name(rc.encoding);
  FoldPlan plan = resolve_folds(rc, raw);

  GridSpec grid;
  if (!rc.grid_imp.empty()) grid.min_imp_dec = parse_double_list(rc.grid_imp);
  if (!rc.grid_beams.empty()) grid.beam_sizes = parse_size_list(rc.grid_beams);

  std::size_t d_enc = fit_encoder(raw, encoding).output_names().size();
  GridResult result = grid_search(raw, grid, plan, encoding,
                                  fit_config(rc, d_enc), rc.select_on_test,
                                  rc.jobs);

  atomic_write(rc.grid_table_path, grid_table_csv(result));
  ordered_json best;
  best["config"] = echo_config(rc, "tune");
  best["min_imp_dec"] = result.best.min_imp_dec;
  best["beam_size"] = result.best.beam_size;
  best["selection"] = rc.select_on_test ? "test" : "validation";
  atomic_write(rc.best_config_path, best.dump(2) + "\n");
  std::cout << "best: min_imp_dec=" << format_double(result.best.min_imp_dec)
            << " beam_size=" << result.best.beam_size << "\n"
            << "table: " << rc.grid_table_path << " ("
            << result.cells.size() << " cells)\n"
            << "best config: " << rc.best_config_path << "\n";
  return 0;
}

void print_split_line(std::ostream& out, const ObliqueSplit& split,
                      const std::vector<std::string>& names) {
  char buf[64];
  bool first = true;
  for (std::size_t j = 0; j < split.features.size(); ++j) {
    if (split.weights[j] == 0.0) continue;
    if (!first) out << " + ";
    std::snprintf(buf, sizeof(buf), "%.4f", split.weights[j]);
    out << buf << "*" << names[split.features[j]];
    first = false;
  }
  std::snprintf(buf, sizeof(buf), "%.4f", split.threshold);
  out << " <= " << buf;
}

void print_tree(std::ostream& out, const TreeNode& node,
                const std::vector<std::string>& names, int depth) {
  std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
  if (node.is_leaf()) {
    out << indent << "leaf value=" << format_double(node.value) << "\n";
    return;
  }
  out << indent << "split: ";
  print_split_line(out, *node.split, names);
  out << "\n";
  print_tree(out, *node.left, names, depth + 1);
  print_tree(out, *node.right, names, depth + 1);
}

int cmd_inspect(const RunConfig& rc) {
  TreeSumModel model = load_model(rc.model_path);
  std::vector<std::string> names = model.encoder.output_names();
  ModelStats stats = model_stats(model);

  std::cout << "task: "
            << (model.task == Task::BinaryClassification
                    ? "binary_classification"
                    : "regression")
            << "\n"
            << "trees: " << stats.n_trees << "\n"
            << "splits: " << stats.n_splits << "\n"
            << "avg features per split: "
            << format_double(stats.avg_features_per_split) << "\n\n";
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    std::cout << "tree " << t << ":\n";
    print_tree(std::cout, *model.trees[t], names, 1);
  }
  if (!stats.cooccurrence.empty()) {
    std::cout << "\nfeature co-occurrence (count x feature set):\n";
    // sort by count descending, then feature set ascending
    std::vector<std::pair<std::vector<std::size_t>, std::size_t>> rows(
        stats.cooccurrence.begin(), stats.cooccurrence.end());
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) {
                       return a.second > b.second;
                     });
    for (const auto& [features, count] : rows) {
      std::cout << "  " << count << " x {";
      for (std::size_t i = 0; i < features.size(); ++i) {
        if (i) std::cout << ", ";
        std::cout << names[features[i]];
      }
      std::cout << "}\n";
    }
  }
  return 0;
}

// defaults < env < config file < flags
void apply_env(RunConfig& rc) {
  if (const char* s = std::getenv("ROFIGS_SEED")) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s, s + std::string(s).size(), v);
    if (ec != std::errc() || *p != '\0')
      throw Error("ROFIGS_SEED must be an unsigned integer, got '" +
                  std::string(s) + "'");
    rc.seed = v;
  }
  if (const char* s = std::getenv("ROFIGS_JOBS")) {
    int v = 0;
    auto [p, ec] = std::from_chars(s, s + std::string(s).size(), v);
    if (ec != std::errc() || *p != '\0' || v < 1)
      throw Error("ROFIGS_JOBS must be a positive integer, got '" +
                  std::string(s) + "'");
    rc.jobs = v;
  }
}

void apply_config_file(RunConfig& rc, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("config file: invalid JSON: " + std::string(e.what()));
  }
  auto get = [&](const char* key, auto& slot) {
    if (j.contains(key)) slot = j.at(key).get<std::decay_t<decltype(slot)>>();
  };
  get("data", rc.data_path);
  get("label", rc.label_column);
  get("task", rc.task);
  get("encoding", rc.encoding);
  get("mode", rc.mode);
  get("nominal", rc.nominal);
  get("beam_size", rc.beam_size);
  get("min_imp_dec", rc.min_imp_dec);
  get("max_splits", rc.max_splits);
  get("max_trees", rc.max_trees);
  get("repetitions", rc.repetitions);
  get("seed", rc.seed);
  get("impurity_weight", rc.impurity_weight);
  get("gd_iterations", rc.gd_iterations);
  get("learning_rate", rc.learning_rate);
  get("sigmoid_steepness", rc.sigmoid_steepness);
  get("sparsify_epsilon", rc.sparsify_epsilon);
  get("restarts", rc.restarts);
  get("folds", rc.folds);
  get("fold_file", rc.fold_file);
  get("jobs", rc.jobs);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Greedy additive sums of oblique decision trees"};
  app.require_subcommand(1);

  RunConfig rc;
  std::string config_path;
  try {
    apply_env(rc);
    // config file layered before flag parsing so flags win
    for (int i = 1; i + 1 < argc; ++i)
      if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
    if (!config_path.empty()) apply_config_file(rc, config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--seed", rc.seed, "random seed");
  };
  auto add_data = [&](CLI::App* cmd) {
    cmd->add_option("--data", rc.data_path, "input CSV with header")
        ->required();
    cmd->add_option("--label", rc.label_column,
                    "label column name (default: last column)");
    cmd->add_option("--task", rc.task, "binary or regression");
    cmd->add_option("--encoding", rc.encoding,
                    "nominal encoding: one-hot, count, or prop");
    cmd->add_option("--nominal", rc.nominal,
                    "treat these columns as nominal")
        ->delimiter(',');
  };
  auto add_fit = [&](CLI::App* cmd) {
    cmd->add_option("--mode", rc.mode, "rofigs (oblique) or figs (univariate)");
    cmd->add_option("--beam-size", rc.beam_size,
                    "features per split (0 = ceil(sqrt(d)))");
    cmd->add_option("--min-imp-dec", rc.min_imp_dec,
                    "impurity-decrease stopping floor");
    cmd->add_option("--max-splits", rc.max_splits,
                    "split budget (-1 = mode default)");
    cmd->add_option("--max-trees", rc.max_trees, "tree budget (-1 = none)");
    cmd->add_option("--repetitions", rc.repetitions,
                    "beam resamplings per tree per iteration");
    cmd->add_option("--impurity-weight", rc.impurity_weight,
                    "fitness weight against the sparsity penalty");
    cmd->add_option("--gd-iterations", rc.gd_iterations,
                    "gradient steps per split search");
    cmd->add_option("--learning-rate", rc.learning_rate, "gradient step size");
    cmd->add_option("--sigmoid-steepness", rc.sigmoid_steepness,
                    "soft split sharpness");
    cmd->add_option("--sparsify-epsilon", rc.sparsify_epsilon,
                    "relative weight-pruning threshold");
    cmd->add_option("--restarts", rc.restarts, "split-search restarts");
  };
  auto add_folds = [&](CLI::App* cmd) {
    cmd->add_option("--folds", rc.folds, "fold count for generated folds");
    cmd->add_option("--fold-file", rc.fold_file,
                    "JSON fold file (overrides --folds)");
    cmd->add_option("--jobs", rc.jobs, "worker threads");
  };

  CLI::App* train = app.add_subcommand("train", "fit a model on a CSV");
  add_common(train);
  add_data(train);
  add_fit(train);
  train->add_option("--model-out", rc.model_path, "model output path");
  train->add_option("--report-out", rc.report_path, "fit report output path");

  CLI::App* predict = app.add_subcommand("predict", "score rows with a model");
  add_common(predict);
  predict->add_option("--model", rc.model_path, "model file")->required();
  predict->add_option("--data", rc.data_path, "input CSV")->required();
  predict->add_option("--label", rc.label_column,
                      "label column to ignore if present");
  predict->add_option("--out", rc.predictions_path, "predictions CSV path");

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "cross-validated test metrics");
  add_common(evaluate);
  add_data(evaluate);
  add_fit(evaluate);
  add_folds(evaluate);
  evaluate->add_option("--out", rc.metrics_path, "metrics JSON path");
  evaluate->add_option("--folds-out", rc.folds_table_path,
                       "optional per-fold CSV table");

  CLI::App* tune = app.add_subcommand(
      "tune", "grid search over min-imp-dec and beam-size");
  add_common(tune);
  add_data(tune);
  add_fit(tune);
  add_folds(tune);
  tune->add_option("--grid-imp", rc.grid_imp,
                   "comma-separated min-imp-dec grid");
  tune->add_option("--grid-beams", rc.grid_beams,
                   "comma-separated beam-size grid");
  tune->add_flag("--select-on-test", rc.select_on_test,
                 "select on test scores instead of validation");
  tune->add_option("--table-out", rc.grid_table_path, "grid CSV path");
  tune->add_option("--best-out", rc.best_config_path, "best config JSON path");

  CLI::App* inspect =
      app.add_subcommand("inspect", "print splits and model statistics");
  inspect->add_option("--model", rc.model_path, "model file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (train->parsed()) return cmd_train(rc);
    if (predict->parsed()) return cmd_predict(rc);
    if (evaluate->parsed()) return cmd_evaluate(rc);
    if (tune->parsed()) return cmd_tune(rc);
    if (inspect->parsed()) return cmd_inspect(rc);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
