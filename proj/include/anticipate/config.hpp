#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "anticipate/captioning.hpp"
#include "anticipate/dataset.hpp"
#include "anticipate/metrics.hpp"
#include "anticipate/prompting.hpp"
#include "anticipate/recognition.hpp"
#include "anticipate/retrieval.hpp"

namespace anticipate {

enum class PastSource { Recognized, Oracle };

/// Every knob of a run. Relative file paths resolve against base_dir (the
/// config file's directory) but are echoed exactly as written.
struct PipelineConfig {
  std::filesystem::path base_dir;

  std::string taxonomy;
  std::string exemplars;   // training-split annotation file
  std::string embeddings;  // exemplar embedding file

  std::size_t horizon = 20;    // Z
  std::size_t candidates = 5;  // K
  std::uint64_t seed = 0;

  PastSource past_source = PastSource::Recognized;
  RecognitionConfig recognition;
  SelectionPolicy selection;
  PromptOptions prompt;

  CaptionMode caption_mode;
  std::string caption_prefix{kDefaultCaptionPrefix};
  QuestionDictionary questions = default_question_dictionary();

  ExemplarWindowing::Mode windowing = ExemplarWindowing::Mode::Sliding;
  std::size_t exemplar_past = 8;

  std::string backend;
  std::chrono::milliseconds timeout{60000};
  std::size_t workers = 1;

  std::vector<std::size_t> freq_verbs;
  std::vector<std::size_t> rare_verbs;
  DlVariant dl_variant = DlVariant::Osa;

  /// Propagates the global seed into the recognition and selection settings
  /// and checks invariants. Throws InvalidConfig.
  void finalize();

  [[nodiscard]] std::filesystem::path resolve(const std::string& path) const;
  [[nodiscard]] ExemplarWindowing exemplar_windowing() const {
    return ExemplarWindowing{windowing, exemplar_past, horizon};
  }
  [[nodiscard]] nlohmann::json to_json() const;
};

/// Unknown keys are rejected. Throws InvalidConfig.
PipelineConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace anticipate
