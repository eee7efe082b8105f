#include <gtest/gtest.h>

#include "anticipate/captioning.hpp"
#include "anticipate/error.hpp"

using namespace anticipate;

namespace {

VideoRecord two_segment_video() {
  VideoRecord v;
  v.video_id = "vid";
  v.segments = {Segment{0, 0.0, 2.0, {}, {}}, Segment{1, 2.0, 5.0, {}, {}}, Segment{2, 5.0, 6.0, {}, {}}};
  v.observed_count = 2;
  return v;
}

}  // namespace

TEST(Captioning, PrefixRequestsAtSegmentMiddles) {
  const auto reqs = make_caption_requests(two_segment_video(), CaptionMode{});
  ASSERT_EQ(reqs.size(), 2u);
  EXPECT_EQ(reqs[0].conditional_text, "A person is");
  EXPECT_DOUBLE_EQ(reqs[0].timestamp_s, 1.0);
  EXPECT_DOUBLE_EQ(reqs[1].timestamp_s, 3.5);
  EXPECT_EQ(reqs[1].segment_index, 1u);
  EXPECT_EQ(reqs[1].video_id, "vid");
}

TEST(Captioning, QuestionMode) {
  const CaptionMode mode{CaptionMode::Kind::Question, CaptionTopic::Intention};
  const auto reqs = make_caption_requests(two_segment_video(), mode);
  EXPECT_EQ(reqs[0].conditional_text, "Question: What is the intention of the person in the image? Answer:");
  QuestionDictionary custom{{CaptionTopic::Location, "Where are we"}};
  const auto loc = make_caption_requests(two_segment_video(), {CaptionMode::Kind::Question, CaptionTopic::Location},
                                         kDefaultCaptionPrefix, custom);
  EXPECT_EQ(loc[0].conditional_text, "Question: Where are we? Answer:");
  EXPECT_THROW(make_caption_requests(two_segment_video(), mode, kDefaultCaptionPrefix, custom), Error);
}

TEST(Captioning, SixTopicsRoundTrip) {
  EXPECT_EQ(default_question_dictionary().size(), 6u);
  for (CaptionTopic t : kCaptionTopics) EXPECT_EQ(parse_caption_topic(to_string(t)), t);
  EXPECT_FALSE(parse_caption_topic("mood"));
}

TEST(Captioning, AttachNarrations) {
  const auto v = two_segment_video();
  EXPECT_EQ(attach_narrations(v, {"a person is cutting", "  "}),
            (std::vector<std::string>{"a person is cutting", "unknown scene"}));
  try {
    attach_narrations(v, {"only one"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
  }
}
