#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "anticipate/taxonomy.hpp"

namespace anticipate {

struct Segment {
  std::size_t index = 0;
  double start_s = 0.0;
  double end_s = 0.0;
  std::optional<ActionLabel> gt_action;
  std::optional<std::string> narration;
};

struct VideoRecord {
  std::string video_id;
  std::vector<Segment> segments;
  std::size_t observed_count = 0;

  /// Ground-truth actions of the first observed_count segments.
  [[nodiscard]] ActionSequence observed_actions() const;
  /// Ground-truth actions of the segments following the observed prefix, at most `limit`.
  [[nodiscard]] ActionSequence future_actions(std::size_t limit) const;
  [[nodiscard]] std::vector<Segment> observed_segments() const;
};

struct ExemplarRecord {
  std::string exemplar_id;
  std::vector<std::string> narrations;
  ActionSequence past_actions;
  ActionSequence future_actions;
  std::optional<std::vector<double>> embedding;
};

struct ExemplarWindowing {
  enum class Mode { Sliding, PerVideo };
  Mode mode = Mode::Sliding;
  std::size_t past = 8;     // P
  std::size_t future = 20;  // Z
};

struct Dataset {
  std::string split;
  std::vector<VideoRecord> videos;
  /// Populated for the "train" split only.
  std::vector<ExemplarRecord> exemplars;
};

/// Exemplar records cut from one training video. Sliding mode uses stride P.
std::vector<ExemplarRecord> build_exemplars(const VideoRecord& video, const ExemplarWindowing& windowing);

Dataset ingest_dataset(const std::filesystem::path& path, const Taxonomy& tax,
                       const ExemplarWindowing& windowing = {});

struct ObservedPrefix {
  std::vector<Segment> observed;
  std::set<std::size_t> remaining_verbs;
};

/// Segments fully inside the first R% of the video (by end time); falls back to
/// the first segment when none fits.
ObservedPrefix observed_prefix_by_ratio(const VideoRecord& video, int ratio_percent);

inline double middle_timestamp(const Segment& seg) { return (seg.start_s + seg.end_s) / 2.0; }

}  // namespace anticipate
