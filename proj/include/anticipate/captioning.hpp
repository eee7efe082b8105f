#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "anticipate/dataset.hpp"

namespace anticipate {

enum class CaptionTopic { Location, Detection, Action, Prediction, Interaction, Intention };

inline constexpr std::array kCaptionTopics = {CaptionTopic::Location,   CaptionTopic::Detection,
                                              CaptionTopic::Action,     CaptionTopic::Prediction,
                                              CaptionTopic::Interaction, CaptionTopic::Intention};

std::string_view to_string(CaptionTopic topic);
std::optional<CaptionTopic> parse_caption_topic(std::string_view name);

inline constexpr std::string_view kDefaultCaptionPrefix = "A person is";
inline constexpr std::string_view kUnknownScene = "unknown scene";

/// Questions keyed by topic, stored without the trailing '?'.
using QuestionDictionary = std::map<CaptionTopic, std::string>;

/// Wording is a configurable default, one question per topic.
QuestionDictionary default_question_dictionary();

struct CaptionMode {
  enum class Kind { Prefix, Question };
  Kind kind = Kind::Prefix;
  CaptionTopic topic = CaptionTopic::Intention;  // Question mode only
};

struct CaptionRequestSpec {
  std::string video_id;
  std::size_t segment_index = 0;
  double timestamp_s = 0.0;
  CaptionMode mode;
  std::string conditional_text;
};

/// One request per observed segment at its middle timestamp.
std::vector<CaptionRequestSpec> make_caption_requests(const VideoRecord& video, const CaptionMode& mode,
                                                      std::string_view prefix = kDefaultCaptionPrefix,
                                                      const QuestionDictionary& questions = default_question_dictionary());

/// Narrations in segment order; blank captions become "unknown scene". Throws LengthMismatch.
std::vector<std::string> attach_narrations(const VideoRecord& video, const std::vector<std::string>& captions);

}  // namespace anticipate
