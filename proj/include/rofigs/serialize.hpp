#pragma once

#include <string>

#include <json.hpp>

#include "rofigs/fit.hpp"

namespace rofigs {

// Model document with a fixed field order (format_version, task,
// label_offset, encoder, scaler, trees, fit_config, seed) and round-trip
// number formatting, so identical models serialize to identical bytes.
nlohmann::ordered_json model_to_json(const TreeSumModel& model);
TreeSumModel model_from_json(const nlohmann::json& j);

void save_model(const TreeSumModel& model, const std::string& path);
TreeSumModel load_model(const std::string& path);

nlohmann::ordered_json report_to_json(const FitReport& report);

// Writes to <path>.tmp and renames into place, so failures never leave a
// partial artifact behind.
void atomic_write(const std::string& path, const std::string& contents);

}  // namespace rofigs
