#include <gtest/gtest.h>

#include "anticipate/config.hpp"
#include "anticipate/error.hpp"
#include "helpers/support.hpp"

using namespace anticipate;
using nlohmann::json;

namespace {

ErrorCode config_error(const json& doc) {
  try {
    config_from_json(doc);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "accepted " << doc.dump();
  return ErrorCode::BackendError;
}

}  // namespace

TEST(Config, DefaultsAndSeedPropagation) {
  const auto cfg = config_from_json(json{{"seed", 42}});
  EXPECT_EQ(cfg.horizon, 20u);
  EXPECT_EQ(cfg.candidates, 5u);
  EXPECT_EQ(cfg.recognition.window, 4u);
  EXPECT_EQ(cfg.selection.kind, SelectionKind::Mmr);
  EXPECT_EQ(cfg.selection.per_prompt, 4u);
  EXPECT_EQ(cfg.prompt.max_output_tokens, 80u);
  EXPECT_EQ(cfg.recognition.seed, 42u);
  EXPECT_EQ(cfg.selection.seed, 42u);
  EXPECT_EQ(cfg.timeout.count(), 60000);
}

TEST(Config, JsonEchoRoundTrips) {
  json doc{{"Z", 12},
           {"K", 3},
           {"past_source", "oracle"},
           {"selection", {{"kind", "similarity"}, {"lambda", 0.25}, {"m", 2}}},
           {"prompt", {{"include_noun_list", true}, {"max_output_tokens", 200}}},
           {"captions", {{"mode", "question:location"}, {"questions", {{"location", "Where is it"}}}}},
           {"exemplar_windowing", {{"mode", "per_video"}, {"past", 6}}},
           {"evaluation", {{"freq_verbs", {0, 1}}, {"rare_verbs", {2}}, {"dl_variant", "unrestricted"}}}};
  const auto cfg = config_from_json(doc);
  EXPECT_EQ(cfg.caption_mode.kind, CaptionMode::Kind::Question);
  EXPECT_EQ(cfg.questions.at(CaptionTopic::Location), "Where is it");
  EXPECT_EQ(cfg.dl_variant, DlVariant::Unrestricted);
  EXPECT_EQ(cfg.exemplar_windowing().future, 12u);
  const json echo = cfg.to_json();
  EXPECT_EQ(config_from_json(echo).to_json(), echo);
  EXPECT_EQ(echo["captions"]["mode"], "question:location");
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_EQ(config_error(json{{"Zed", 3}}), ErrorCode::InvalidConfig);
  EXPECT_EQ(config_error(json{{"selection", {{"kind", "mmr"}, {"alpha", 1}}}}), ErrorCode::InvalidConfig);
  EXPECT_EQ(config_error(json{{"Z", 0}}), ErrorCode::InvalidConfig);
  EXPECT_EQ(config_error(json{{"Z", "twenty"}}), ErrorCode::InvalidConfig);
  EXPECT_EQ(config_error(json{{"selection", {{"lambda", 1.5}}}}), ErrorCode::InvalidConfig);
  EXPECT_EQ(config_error(json{{"prompt", {{"max_output_tokens", 4}}}}), ErrorCode::InvalidConfig);
  EXPECT_EQ(config_error(json{{"captions", {{"mode", "question:mood"}}}}), ErrorCode::InvalidConfig);
  EXPECT_EQ(config_error(json{{"past_source", "guess"}}), ErrorCode::InvalidConfig);
  EXPECT_EQ(config_error(json::array()), ErrorCode::InvalidConfig);
}

TEST(Config, PathsResolveAgainstConfigDirectory) {
  testing_support::TempDir dir;
  testing_support::write_file(dir / "c.json", R"({"taxonomy": "tax.json", "embeddings": "/abs/e.txt"})");
  const auto cfg = load_config(dir / "c.json");
  EXPECT_EQ(cfg.resolve(cfg.taxonomy), dir / "tax.json");
  EXPECT_EQ(cfg.resolve(cfg.embeddings), std::filesystem::path("/abs/e.txt"));
  EXPECT_EQ(cfg.to_json()["taxonomy"], "tax.json");
}
