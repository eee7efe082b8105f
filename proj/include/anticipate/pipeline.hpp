#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "anticipate/backend.hpp"
#include "anticipate/config.hpp"
#include "anticipate/dataset.hpp"
#include "anticipate/metrics.hpp"
#include "anticipate/prompting.hpp"
#include "anticipate/retrieval.hpp"
#include "anticipate/taxonomy.hpp"

namespace anticipate {

/// Taxonomy, exemplar pool and their embeddings, loaded once per run.
struct Resources {
  Taxonomy taxonomy;
  std::vector<ExemplarRecord> exemplars;
  EmbeddingStore store;
  std::unordered_map<std::string, std::size_t> exemplar_index;

  [[nodiscard]] const ExemplarRecord& exemplar(const std::string& id) const;
};

/// Loads what is configured; embeddings are attached to their exemplar records.
Resources load_resources(const PipelineConfig& cfg, bool with_exemplars = true, bool with_embeddings = true);

/// Observed past actions plus, when recognized, the mean noun distribution.
struct PastContext {
  ActionSequence actions;
  std::optional<std::vector<double>> noun_distribution;
};

PastContext observe_past(const VideoRecord& video, const PipelineConfig& cfg, const Taxonomy& tax, Backend& backend);

std::vector<std::string> caption_video(const VideoRecord& video, const PipelineConfig& cfg, Backend& backend);

/// Query block content: narrations (when captions are on), past actions, candidate nouns.
PromptRecord build_query(const VideoRecord& video, const PastContext& past, const PipelineConfig& cfg,
                         const Taxonomy& tax, Backend& backend);

std::vector<double> embed_text(const std::string& text, Backend& backend);

/// The exemplar-side text that gets embedded: the block without its future line.
std::string exemplar_embedding_text(const ExemplarRecord& exemplar, const Taxonomy& tax, const PromptOptions& options);

struct VideoPrediction {
  PredictionSet predictions;
  std::vector<std::string> prompts;
  std::vector<std::string> warnings;
};

/// recognize -> caption -> embed -> select -> prompt xK -> complete -> parse.
/// A failed completion degrades that candidate to the repeat baseline.
VideoPrediction predict_video(const VideoRecord& video, const PipelineConfig& cfg, const Resources& res,
                              Backend& backend);

/// Runs `fn` over every video with cfg.workers threads; results keep input order.
template <typename Result>
std::vector<Result> for_each_video(const std::vector<VideoRecord>& videos, std::size_t workers,
                                   const std::function<Result(const VideoRecord&)>& fn);

std::vector<VideoPrediction> predict_all(const std::vector<VideoRecord>& videos, const PipelineConfig& cfg,
                                         const Resources& res, Backend& backend);

/// Ground truth = the Z segments after the observed prefix. Throws
/// MissingPrediction / LengthMismatch.
EdReport evaluate_lta(const std::vector<VideoRecord>& videos, const std::vector<PredictionSet>& predictions,
                      std::size_t horizon, DlVariant variant = DlVariant::Osa);

using VideoPredictor = std::function<PredictionSet(const VideoRecord&)>;

inline constexpr int kObservedRatios[] = {25, 50, 75};

/// For each R, truncates every video to its R% prefix, predicts and scores verbs.
MapReport evaluate_map(const std::vector<VideoRecord>& videos, const VideoPredictor& predictor,
                       const MapSplits& splits, std::size_t verb_count);

}  // namespace anticipate
