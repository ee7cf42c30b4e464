#include "rofigs/serialize.hpp"

#include <filesystem>
#include <fstream>

#include "rofigs/error.hpp"

namespace rofigs {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json node_to_json(const TreeNode& node) {
  ordered_json j;
  if (node.is_leaf()) {
    j["value"] = node.value;
    return j;
  }
  j["features"] = node.split->features;
  j["weights"] = node.split->weights;
  j["threshold"] = node.split->threshold;
  j["left"] = node_to_json(*node.left);
  j["right"] = node_to_json(*node.right);
  return j;
}

std::unique_ptr<TreeNode> node_from_json(const json& j) {
  auto node = std::make_unique<TreeNode>();
  if (j.contains("value")) {
    node->value = j.at("value").get<double>();
    return node;
  }
  node->split = std::make_unique<ObliqueSplit>();
  node->split->features = j.at("features").get<std::vector<std::size_t>>();
  node->split->weights = j.at("weights").get<std::vector<double>>();
  node->split->threshold = j.at("threshold").get<double>();
  if (node->split->features.size() != node->split->weights.size())
    throw Error("model file: split features/weights length mismatch");
  node->left = node_from_json(j.at("left"));
  node->right = node_from_json(j.at("right"));
  return node;
}

ordered_json encoder_to_json(const Encoder& enc) {
  ordered_json j;
  j["strategy"] = encoding_name(enc.strategy());
  ordered_json cols = ordered_json::array();
  for (const auto& cs : enc.schema()) {
    ordered_json c;
    c["name"] = cs.name;
    c["kind"] = cs.nominal ? "nominal" : "numerical";
    if (cs.nominal) {
      c["categories"] = cs.categories;
      if (!cs.mapped.empty()) c["mapped"] = cs.mapped;
    }
    cols.push_back(std::move(c));
  }
  j["columns"] = std::move(cols);
  return j;
}

Encoder encoder_from_json(const json& j) {
  Encoding strategy = encoding_from_name(j.at("strategy").get<std::string>());
  std::vector<ColumnScheme> schema;
  for (const auto& c : j.at("columns")) {
    ColumnScheme cs;
    cs.name = c.at("name").get<std::string>();
    cs.nominal = c.at("kind").get<std::string>() == "nominal";
    if (cs.nominal) {
      cs.categories = c.at("categories").get<std::vector<std::string>>();
      if (c.contains("mapped"))
        cs.mapped = c.at("mapped").get<std::vector<double>>();
    }
    schema.push_back(std::move(cs));
  }
  return Encoder(strategy, std::move(schema));
}

ordered_json fit_config_to_json(const FitConfig& cfg) {
  ordered_json j;
  j["mode"] = cfg.mode == FitMode::Oblique ? "rofigs" : "figs";
  j["beam_size"] = cfg.beam_size;
  j["min_imp_dec"] = cfg.min_imp_dec;
  if (cfg.max_splits == kUnlimited)
    j["max_splits"] = nullptr;
  else
    j["max_splits"] = cfg.max_splits;
  if (cfg.max_trees == kUnlimited)
    j["max_trees"] = nullptr;
  else
    j["max_trees"] = cfg.max_trees;
  j["repetitions"] = cfg.repetitions;
  j["impurity_weight"] = cfg.split_search.impurity_weight;
  j["gd_iterations"] = cfg.split_search.gd_iterations;
  j["learning_rate"] = cfg.split_search.learning_rate;
  j["sigmoid_steepness"] = cfg.split_search.sigmoid_steepness;
  j["sqrt_smoothing"] = cfg.split_search.sqrt_smoothing;
  j["sparsify_epsilon"] = cfg.split_search.sparsify_epsilon;
  j["restarts"] = cfg.split_search.restarts;
  return j;
}

FitConfig fit_config_from_json(const json& j) {
  FitConfig cfg;
  cfg.mode = j.at("mode").get<std::string>() == "figs"
                 ? FitMode::UnivariateFigs
                 : FitMode::Oblique;
  cfg.beam_size = j.at("beam_size").get<std::size_t>();
  cfg.min_imp_dec = j.at("min_imp_dec").get<double>();
  cfg.max_splits = j.at("max_splits").is_null()
                       ? kUnlimited
                       : j.at("max_splits").get<std::size_t>();
  cfg.max_trees = j.at("max_trees").is_null()
                      ? kUnlimited
                      : j.at("max_trees").get<std::size_t>();
  cfg.repetitions = j.at("repetitions").get<int>();
  cfg.split_search.impurity_weight = j.at("impurity_weight").get<double>();
  cfg.split_search.gd_iterations = j.at("gd_iterations").get<int>();
  cfg.split_search.learning_rate = j.at("learning_rate").get<double>();
  cfg.split_search.sigmoid_steepness =
      j.at("sigmoid_steepness").get<double>();
  cfg.split_search.sqrt_smoothing = j.at("sqrt_smoothing").get<double>();
  cfg.split_search.sparsify_epsilon = j.at("sparsify_epsilon").get<double>();
  cfg.split_search.restarts = j.at("restarts").get<int>();
  return cfg;
}

}  // namespace

ordered_json model_to_json(const TreeSumModel& model) {
  ordered_json j;
  j["format_version"] = 1;
  j["task"] = model.task == Task::BinaryClassification
                  ? "binary_classification"
                  : "regression";
  j["label_offset"] = model.label_offset;
  j["encoder"] = encoder_to_json(model.encoder);
  ordered_json scaler;
  scaler["min"] = model.scaler.mins;
  scaler["max"] = model.scaler.maxs;
  j["scaler"] = std::move(scaler);
  ordered_json trees = ordered_json::array();
  for (const auto& t : model.trees) trees.push_back(node_to_json(*t));
  j["trees"] = std::move(trees);
  j["fit_config"] = fit_config_to_json(model.config);
  j["seed"] = model.config.seed;
  return j;
}

TreeSumModel model_from_json(const json& j) {
  TreeSumModel model;
  try {
    int version = j.at("format_version").get<int>();
    if (version != 1)
      throw Error("model file: unsupported format_version " +
                  std::to_string(version));
    model.task = j.at("task").get<std::string>() == "regression"
                     ? Task::Regression
                     : Task::BinaryClassification;
    model.label_offset = j.at("label_offset").get<double>();
    model.encoder = encoder_from_json(j.at("encoder"));
    model.scaler.mins = j.at("scaler").at("min").get<std::vector<double>>();
    model.scaler.maxs = j.at("scaler").at("max").get<std::vector<double>>();
    if (model.scaler.mins.size() != model.scaler.maxs.size())
      throw Error("model file: scaler min/max length mismatch");
    for (const auto& t : j.at("trees"))
      model.trees.push_back(node_from_json(t));
    if (model.trees.empty()) throw Error("model file: no trees");
    model.config = fit_config_from_json(j.at("fit_config"));
    model.config.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw Error("model file: " + std::string(e.what()));
  }
  return model;
}

void save_model(const TreeSumModel& model, const std::string& path) {
  atomic_write(path, model_to_json(model).dump(2) + "\n");
}

TreeSumModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("model file: invalid JSON: " + std::string(e.what()));
  }
  return model_from_json(j);
}

ordered_json report_to_json(const FitReport& report) {
  ordered_json j;
  j["stop_reason"] = stop_reason_name(report.stop);
  j["n_iterations"] = report.iterations.size();
  ordered_json its = ordered_json::array();
  for (const auto& it : report.iterations) {
    ordered_json r;
    if (it.target_tree == kNewStump)
      r["target_tree"] = "new_stump";
    else
      r["target_tree"] = it.target_tree;
    r["target_leaf"] = it.target_leaf;
    r["impurity_decrease"] = it.decrease;
    r["repetition"] = it.repetition;
    r["beam"] = it.beam;
    its.push_back(std::move(r));
  }
  j["iterations"] = std::move(its);
  return j;
}

void atomic_write(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write file: " + tmp);
    out << contents;
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw Error("write failed: " + tmp);
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot move " + tmp + " to " + path + ": " + ec.message());
  }
}

}  // namespace rofigs
