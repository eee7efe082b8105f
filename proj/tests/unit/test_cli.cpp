#include <gtest/gtest.h>

#include <cstdlib>

#include <nlohmann/json.hpp>

#include "helpers/support.hpp"

using nlohmann::json;
using testing_support::read_file;
using testing_support::run_cli;
using testing_support::TempDir;

namespace {

const std::string kData = ANTICIPATE_DATA_DIR;
const std::string kConfig = kData + "/config.json";
const std::string kEval = kData + "/eval.json";

// The mini config with absolute paths and no backend.
std::string detached_config(const TempDir& dir) {
  json cfg = json::parse(read_file(kConfig));
  for (const char* key : {"taxonomy", "exemplars", "embeddings"}) cfg[key] = kData + "/" + cfg[key].get<std::string>();
  cfg.erase("backend");
  const auto path = (dir / "config.json").string();
  testing_support::write_file(path, cfg.dump());
  return path;
}

}  // namespace

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(run_cli({"--help"}).code, 0);
  const auto unknown = run_cli({"predict", "--config", kConfig, "--data", kEval, "--bogus"});
  EXPECT_EQ(unknown.code, 1);
  EXPECT_NE(unknown.err.find("Usage"), std::string::npos);
  EXPECT_EQ(run_cli({}).code, 1);
  EXPECT_EQ(run_cli({"predict", "--config", kConfig}).code, 1);
  EXPECT_EQ(run_cli({"predict", "--config", kConfig, "--data", kEval, "--selection", "best"}).code, 1);
}

TEST(Cli, ValidationErrorsExitOne) {
  const auto missing = run_cli({"ingest", "--config", "/nonexistent/config.json", "--data", kEval});
  EXPECT_EQ(missing.code, 1);
  const auto bad_lambda = run_cli({"predict", "--config", kConfig, "--data", kEval, "--lambda", "2", "--format", "json"});
  EXPECT_EQ(bad_lambda.code, 1);
  const json diag = json::parse(bad_lambda.err);
  EXPECT_EQ(diag["error"], "InvalidConfig");
}

TEST(Cli, BackendErrorsExitTwo) {
  TempDir dir;
  testing_support::write_file(dir / "empty.json", "[]");
  const auto r = run_cli({"predict", "--config", kConfig, "--data", kEval, "--backend",
                          "mock:" + (dir / "empty.json").string(), "--format", "json"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(json::parse(r.err)["error"], "FixtureMiss");
}

TEST(Cli, IngestReportsStats) {
  const auto r = run_cli({"ingest", "--config", kConfig, "--data", kData + "/train.json", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["stats"]["split"], "train");
  EXPECT_GE(doc["stats"]["exemplars"].get<int>(), 30);
  EXPECT_EQ(doc["config"]["Z"], 20);
}

TEST(Cli, PredictThenEvaluateMatchesGolden) {
  TempDir dir;
  const auto preds = (dir / "preds.json").string();
  ASSERT_EQ(run_cli({"predict", "--config", kConfig, "--data", kEval, "--out", preds}).code, 0);
  EXPECT_EQ(read_file(preds), read_file(kData + "/golden_predictions.json"));
  const auto r = run_cli({"eval-ed", "--config", kConfig, "--pred", preds, "--gt", kEval, "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, read_file(kData + "/golden_ed_report.json"));

  const auto text = run_cli({"eval-ed", "--config", kConfig, "--pred", preds, "--gt", kEval});
  ASSERT_EQ(text.code, 0);
  EXPECT_EQ(text.out.rfind("# config: {", 0), 0u);
}

TEST(Cli, OverridesAreEchoed) {
  const auto r = run_cli({"baseline", "--config", kConfig, "--data", kEval, "--kind", "repeat", "--past", "oracle",
                          "-Z", "7", "-K", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["config"]["Z"], 7);
  EXPECT_EQ(doc["config"]["past_source"], "oracle");
  EXPECT_EQ(doc["predictions"][0]["sequences"].size(), 2u);
  EXPECT_EQ(doc["predictions"][0]["sequences"][0].size(), 7u);
}

TEST(Cli, BackendFromEnvironmentWhenConfigHasNone) {
  TempDir dir;
  const auto cfg = detached_config(dir);
  ::unsetenv("ANTICIPATE_BACKEND");
  const auto none = run_cli({"predict", "--config", cfg, "--data", kEval});
  EXPECT_EQ(none.code, 1);
  ::setenv("ANTICIPATE_BACKEND", ("mock:" + kData + "/fixture.json").c_str(), 1);
  const auto from_env = run_cli({"predict", "--config", cfg, "--data", kEval});
  EXPECT_EQ(from_env.code, 0) << from_env.err;
  testing_support::write_file(dir / "empty.json", "[]");
  const auto flag_wins = run_cli({"predict", "--config", cfg, "--data", kEval, "--backend",
                                  "mock:" + (dir / "empty.json").string()});
  EXPECT_EQ(flag_wins.code, 2);
  ::unsetenv("ANTICIPATE_BACKEND");
}

TEST(Cli, EvalMapWithOraclePredictor) {
  const auto r = run_cli({"eval-map", "--config", kConfig, "--data", kEval, "--predictor", "oracle", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["aggregate"]["all"], 1.0);
}

TEST(Cli, EvalMapWithPipelineReplaysFixture) {
  const auto r = run_cli({"eval-map", "--config", kConfig, "--data", kEval, "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  const double all = doc["aggregate"]["all"].get<double>();
  EXPECT_GT(all, 0.0);
  EXPECT_LE(all, 1.0);
}

TEST(Cli, RecordingWritesAReplayableFixture) {
  TempDir dir;
  const auto rec = (dir / "rec.json").string();
  ASSERT_EQ(run_cli({"predict", "--config", kConfig, "--data", kEval, "--record", rec, "--out",
                     (dir / "a.json").string()}).code, 0);
  ASSERT_EQ(run_cli({"predict", "--config", kConfig, "--data", kEval, "--backend", "mock:" + rec, "--out",
                     (dir / "b.json").string()}).code, 0);
  json a = json::parse(read_file(dir / "a.json"));
  json b = json::parse(read_file(dir / "b.json"));
  EXPECT_EQ(a["predictions"], b["predictions"]);
}
