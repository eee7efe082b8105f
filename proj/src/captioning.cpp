#include "anticipate/captioning.hpp"

#include "anticipate/error.hpp"

namespace anticipate {

std::string_view to_string(CaptionTopic topic) {
  switch (topic) {
    case CaptionTopic::Location: return "location";
    case CaptionTopic::Detection: return "detection";
    case CaptionTopic::Action: return "action";
    case CaptionTopic::Prediction: return "prediction";
    case CaptionTopic::Interaction: return "interaction";
    case CaptionTopic::Intention: return "intention";
  }
  return "";
}

std::optional<CaptionTopic> parse_caption_topic(std::string_view name) {
  for (CaptionTopic t : kCaptionTopics) {
    if (to_string(t) == name) return t;
  }
  return std::nullopt;
}

QuestionDictionary default_question_dictionary() {
  return {
      {CaptionTopic::Location, "Where is the person in the image"},
      {CaptionTopic::Detection, "What objects are in the image"},
      {CaptionTopic::Action, "What is the person doing in the image"},
      {CaptionTopic::Prediction, "What will the person do next in the image"},
      {CaptionTopic::Interaction, "What is the person interacting with in the image"},
      {CaptionTopic::Intention, "What is the intention of the person in the image"},
  };
}

std::vector<CaptionRequestSpec> make_caption_requests(const VideoRecord& video, const CaptionMode& mode,
                                                      std::string_view prefix, const QuestionDictionary& questions) {
  std::string text;
  if (mode.kind == CaptionMode::Kind::Prefix) {
    text = std::string(prefix);
  } else {
    auto it = questions.find(mode.topic);
    if (it == questions.end()) {
      throw Error(ErrorCode::InvalidConfig, "no question configured for " + std::string(to_string(mode.topic)));
    }
    text = "Question: " + it->second + "? Answer:";
  }
  std::vector<CaptionRequestSpec> out;
  for (std::size_t i = 0; i < video.observed_count; ++i) {
    const Segment& seg = video.segments[i];
    out.push_back(CaptionRequestSpec{video.video_id, seg.index, middle_timestamp(seg), mode, text});
  }
  return out;
}

std::vector<std::string> attach_narrations(const VideoRecord& video, const std::vector<std::string>& captions) {
  if (captions.size() != video.observed_count) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(captions.size()) + " captions for " +
                                               std::to_string(video.observed_count) + " observed segments");
  }
  std::vector<std::string> out;
  out.reserve(captions.size());
  for (const auto& c : captions) {
    const bool blank = c.find_first_not_of(" \t\r\n") == std::string::npos;
    out.push_back(blank ? std::string(kUnknownScene) : c);
  }
  return out;
}

}  // namespace anticipate
