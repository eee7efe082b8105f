#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "anticipate/metrics.hpp"
#include "anticipate/taxonomy.hpp"

namespace anticipate {

// Prediction files: {"config": {...}, "predictions": [{"video_id": ..., "sequences": [[[verb, noun], ...], ...]}]}

nlohmann::json predictions_to_json(const std::vector<PredictionSet>& predictions, const Taxonomy& tax,
                                   const nlohmann::json& config);
std::vector<PredictionSet> predictions_from_json(const nlohmann::json& doc, const Taxonomy& tax);
std::vector<PredictionSet> read_predictions(const std::filesystem::path& path, const Taxonomy& tax);

nlohmann::json ed_report_to_json(const EdReport& report, const nlohmann::json& config);
std::string ed_report_to_text(const EdReport& report);

nlohmann::json map_report_to_json(const MapReport& report, const nlohmann::json& config);
std::string map_report_to_text(const MapReport& report);

/// Two-space indented JSON with a trailing newline.
std::string render_document(const nlohmann::json& doc);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace anticipate
