// Regenerates data/mini: a small synthetic corpus, exemplar embeddings, a
// recorded backend fixture and the golden edit-distance report.
//
//   make_minidata <output-dir>
//
// The model side is played by SyntheticBackend below. Every exchange is
// captured with RecordingBackend so later runs replay it through mock:.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "anticipate/backend.hpp"
#include "anticipate/cli.hpp"
#include "anticipate/config.hpp"
#include "anticipate/pipeline.hpp"
#include "anticipate/reports.hpp"
#include "anticipate/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace anticipate;

namespace {

const std::vector<std::string> kVerbs = {"take", "put",  "open", "close",   "turn", "turn on",
                                         "turn off", "wash", "cut", "measure", "pick up", "hold"};
const std::vector<std::string> kNouns = {"tape",  "tape measure", "knife", "board", "cup",   "door",
                                         "tap",   "light",        "drawer", "plate", "bowl", "sponge",
                                         "pan",   "lid",          "bottle", "spoon"};

using Step = std::pair<std::string, std::string>;

const std::vector<std::vector<Step>> kRoutines = {
    {{"take", "tape measure"}, {"measure", "board"}, {"put", "tape measure"}, {"take", "knife"}, {"cut", "board"},
     {"put", "knife"}},
    {{"open", "drawer"}, {"take", "spoon"}, {"close", "drawer"}, {"wash", "spoon"}, {"put", "spoon"}},
    {{"turn on", "tap"}, {"wash", "cup"}, {"wash", "plate"}, {"turn off", "tap"}, {"put", "plate"}},
    {{"open", "door"}, {"turn on", "light"}, {"close", "door"}},
    {{"take", "pan"}, {"put", "lid"}, {"hold", "pan"}, {"turn", "pan"}, {"put", "pan"}},
    {{"pick up", "bottle"}, {"open", "bottle"}, {"hold", "cup"}, {"close", "bottle"}, {"put", "bottle"}},
    {{"take", "tape"}, {"cut", "tape"}, {"put", "tape"}, {"take", "bowl"}, {"wash", "bowl"}},
};

json make_video(const std::string& id, std::size_t length, std::optional<std::size_t> observed, bool narrate,
                SplitMix64& rng) {
  json segments = json::array();
  double t = 0.0;
  while (segments.size() < length) {
    const auto& routine = kRoutines[rng.next_below(kRoutines.size())];
    for (const auto& [verb, noun] : routine) {
      if (segments.size() == length) break;
      Step step{verb, noun};
      if (rng.next_unit() < 0.1) step.second = kNouns[rng.next_below(kNouns.size())];
      const double start = t + 0.5 * rng.next_unit();
      const double end = start + 2.0 + std::floor(rng.next_unit() * 8.0) / 2.0;
      t = end;
      json seg{{"start_s", start}, {"end_s", end}, {"verb", step.first}, {"noun", step.second}};
      if (narrate) seg["narration"] = step.first + " the " + step.second;
      segments.push_back(std::move(seg));
    }
  }
  json v{{"video_id", id}, {"segments", segments}};
  if (observed) v["observed_count"] = *observed;
  return v;
}

std::vector<double> hashed_embedding(const std::string& text) {
  std::vector<double> v(16, 0.0);
  v[15] = 1.0;
  std::string word;
  auto flush = [&] {
    if (word.empty()) return;
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : word) h = (h ^ c) * 1099511628211ull;
    v[h % 15] += 1.0;
    word.clear();
  };
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      word.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : v) x = std::round(x / norm * 1e6) / 1e6;
  return v;
}

std::vector<Step> parse_pairs(const std::string& line) {
  static const std::regex pair_re(R"(\(([^,()]+), ([^()]+)\))");
  std::vector<Step> out;
  for (auto it = std::sregex_iterator(line.begin(), line.end(), pair_re); it != std::sregex_iterator(); ++it) {
    out.emplace_back((*it)[1].str(), (*it)[2].str());
  }
  return out;
}

std::string line_after(const std::string& text, std::size_t pos) {
  const auto end = text.find('\n', pos);
  return text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
}

// Stands in for the recognizer, captioner, embedder and language model.
class SyntheticBackend : public Backend {
 public:
  SyntheticBackend(const std::vector<VideoRecord>& videos, const Taxonomy& tax) : tax_(tax) {
    for (const auto& v : videos) videos_[v.video_id] = v;
  }

  std::vector<BackendResponse> dispatch(std::span<const RequestBody> batch) override {
    std::vector<BackendResponse> out;
    for (const auto& req : batch) out.push_back({next_id(), std::visit([&](const auto& r) { return answer(r); }, req)});
    return out;
  }

 private:
  ResponseBody answer(const RecognizeRequest& r) const {
    const VideoRecord& v = videos_.at(r.video_id);
    WindowDistributions w;
    w.window_start = r.window_start;
    for (std::size_t slot = 0; slot < r.window; ++slot) {
      const ActionLabel gt = *v.segments.at(r.window_start + slot).gt_action;
      w.verb_dists.push_back(peaked(tax_.verbs().size(), gt.verb_id, r.window_start + slot));
      w.noun_dists.push_back(peaked(tax_.nouns().size(), gt.noun_id, r.window_start + 3 * slot + 1));
    }
    return w;
  }

  // Most mass on the truth; every fifth call the runner-up is a confuser close behind.
  static std::vector<double> peaked(std::size_t size, std::size_t truth, std::size_t salt) {
    const std::size_t confuser = (truth + 1) % size;
    const double top = salt % 5 == 0 ? 0.4 : 0.6;
    const double second = salt % 5 == 0 ? 0.35 : 0.2;
    std::vector<double> d(size, (1.0 - top - second) / static_cast<double>(size - 2));
    d[truth] = top;
    d[confuser] = second;
    return d;
  }

  ResponseBody answer(const CaptionRequest& r) const {
    const VideoRecord& v = videos_.at(r.video_id);
    const Segment* hit = &v.segments.front();
    for (const auto& s : v.segments) {
      if (s.start_s <= r.timestamp_s) hit = &s;
    }
    const ActionLabel a = *hit->gt_action;
    std::string text = "a person is going to " + tax_.verbs()[a.verb_id] + " the " + tax_.nouns()[a.noun_id];
    if (r.conditional_text.rfind("Question:", 0) == 0) text = "to " + tax_.verbs()[a.verb_id];
    return CaptionResult{text};
  }

  ResponseBody answer(const EmbedRequest& r) const { return EmbeddingResult{hashed_embedding(r.text)}; }

  // Continues the query by following the exemplar whose history matches its
  // last action, then roughens the text the way real completions are rough.
  ResponseBody answer(const CompleteRequest& r) const {
    const std::string& p = r.prompt;
    const std::string past_label(kPastActionsLabel);
    const std::string future_label(kFutureActionsLabel);
    const auto query_past = p.rfind(past_label);
    const auto past = parse_pairs(line_after(p, query_past));

    std::vector<Step> continuation;
    std::size_t pos = 0;
    while (continuation.empty() && (pos = p.find(past_label, pos)) < query_past) {
      auto ex_past = parse_pairs(line_after(p, pos));
      const auto fpos = p.find(future_label, pos);
      const auto ex_future = parse_pairs(line_after(p, fpos));
      ex_past.insert(ex_past.end(), ex_future.begin(), ex_future.end());
      for (std::size_t i = 0; i + 1 < ex_past.size() && !past.empty(); ++i) {
        if (ex_past[i] == past.back()) {
          continuation.assign(ex_past.begin() + static_cast<std::ptrdiff_t>(i) + 1, ex_past.end());
          break;
        }
      }
      pos = fpos;
    }
    if (continuation.empty()) continuation = past;

    std::size_t target = 20;
    if (r.sampling_seed % 5 == 3) target = 17;
    if (r.sampling_seed % 5 == 4) target = 23;
    std::vector<std::string> items;
    for (std::size_t i = 0; i < target; ++i) {
      const Step& s = continuation[i % continuation.size()];
      items.push_back("(" + s.first + ", " + s.second + ")");
    }
    if (r.sampling_seed % 5 == 1 && items.size() > 4) items[3] = "(___, ___)";
    if (r.sampling_seed % 5 == 2 && items.size() > 6) {
      items[5] = continuation[5 % continuation.size()].second;
      items[6] = "(stir, soup)";
    }
    std::string text = " ";
    for (std::size_t i = 0; i < items.size(); ++i) text += (i ? ", " : "") + items[i];
    text += ".";
    if (r.sampling_seed % 2 == 1) text += " Narrations: a person is done.\nPast actions: (take, cup)";
    return CompletionResult{text};
  }

  ResponseBody answer(const auto&) const { return BackendFailure{ErrorCode::BackendError, "unsupported", ""}; }

  const Taxonomy& tax_;
  std::map<std::string, VideoRecord> videos_;
};

void write_json(const fs::path& path, const json& doc) { write_text_file(path, render_document(doc)); }

int run_cli(std::vector<std::string> args) {
  std::vector<const char*> argv{"anticipate"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int rc = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  std::cerr << err.str();
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: make_minidata <output-dir>\n";
    return 1;
  }
  const fs::path dir = argv[1];
  fs::create_directories(dir);
  SplitMix64 rng(20240501);

  write_json(dir / "taxonomy.json", json{{"verbs", kVerbs}, {"nouns", kNouns}});

  json train{{"split", "train"}, {"videos", json::array()}};
  for (int i = 0; i < 8; ++i) train["videos"].push_back(make_video("train_" + std::to_string(i), 56, {}, true, rng));
  write_json(dir / "train.json", train);

  json eval{{"split", "eval"}, {"videos", json::array()}};
  for (int i = 0; i < 4; ++i) eval["videos"].push_back(make_video("eval_" + std::to_string(i), 28, 8, false, rng));
  write_json(dir / "eval.json", eval);

  const Taxonomy tax = load_taxonomy(dir / "taxonomy.json");

  // Verbs that occur in at least a tenth of the training segments form the frequent split.
  std::vector<std::size_t> counts(kVerbs.size(), 0);
  std::size_t total = 0;
  for (const auto& v : train["videos"]) {
    for (const auto& s : v["segments"]) {
      ++counts[*tax.verb_id(s["verb"].get<std::string>())];
      ++total;
    }
  }
  json freq = json::array(), rare = json::array();
  for (std::size_t i = 0; i < counts.size(); ++i) (counts[i] * 10 >= total ? freq : rare).push_back(i);

  json config{{"taxonomy", "taxonomy.json"},
              {"exemplars", "train.json"},
              {"embeddings", "embeddings.txt"},
              {"Z", 20},
              {"K", 5},
              {"seed", 7},
              {"selection", {{"kind", "mmr"}, {"lambda", 0.5}, {"m", 3}}},
              {"backend", "mock:fixture.json"},
              {"evaluation", {{"freq_verbs", freq}, {"rare_verbs", rare}}}};
  write_json(dir / "config.json", config);

  const PipelineConfig cfg = load_config(dir / "config.json");
  const Dataset eval_set = ingest_dataset(dir / "eval.json", tax, cfg.exemplar_windowing());
  const Dataset train_set = ingest_dataset(dir / "train.json", tax, cfg.exemplar_windowing());
  std::vector<VideoRecord> all = eval_set.videos;
  all.insert(all.end(), train_set.videos.begin(), train_set.videos.end());

  auto synth = std::make_shared<SyntheticBackend>(all, tax);
  const fs::path fixture = dir / "fixture.json";
  fs::remove(fixture);
  {
    auto recorder = std::make_shared<RecordingBackend>(synth, fixture);
    Resources res = load_resources(cfg, true, false);
    EmbeddingStore store;
    for (const auto& ex : res.exemplars) {
      const auto text = exemplar_embedding_text(ex, tax, cfg.prompt);
      store.add(ex.exemplar_id, expect<EmbeddingResult>(recorder->call(EmbedRequest{text})).values);
    }
    store.save(dir / "embeddings.txt");
    res = load_resources(cfg);

    predict_all(eval_set.videos, cfg, res, *recorder);
    MapSplits splits;
    for (std::size_t i = 0; i < kVerbs.size(); ++i) splits.all.push_back(i);
    evaluate_map(
        eval_set.videos, [&](const VideoRecord& v) { return predict_video(v, cfg, res, *recorder).predictions; },
        splits, kVerbs.size());
    recorder->flush();
  }

  const std::string cfg_path = (dir / "config.json").string();
  const std::string preds = (dir / "golden_predictions.json").string();
  int rc = run_cli({"predict", "--config", cfg_path, "--data", (dir / "eval.json").string(), "--out", preds});
  if (rc == 0) {
    rc = run_cli({"eval-ed", "--config", cfg_path, "--pred", preds, "--gt", (dir / "eval.json").string(), "--format",
                  "json", "--out", (dir / "golden_ed_report.json").string()});
  }
  if (rc != 0) {
    std::cerr << "replay through the recorded fixture failed\n";
    return rc;
  }
  std::cout << "wrote " << dir.string() << '\n';
  return 0;
}
