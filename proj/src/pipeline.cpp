#include "anticipate/pipeline.hpp"

#include <atomic>
#include <exception>
#include <thread>

#include "anticipate/baselines.hpp"
#include "anticipate/captioning.hpp"
#include "anticipate/error.hpp"
#include "anticipate/parsing.hpp"
#include "anticipate/recognition.hpp"

namespace anticipate {

const ExemplarRecord& Resources::exemplar(const std::string& id) const {
  auto it = exemplar_index.find(id);
  if (it == exemplar_index.end()) throw Error(ErrorCode::UnknownLabel, "unknown exemplar " + id);
  return exemplars[it->second];
}

Resources load_resources(const PipelineConfig& cfg, bool with_exemplars, bool with_embeddings) {
  if (cfg.taxonomy.empty()) throw Error(ErrorCode::InvalidConfig, "no taxonomy configured");
  Resources res;
  res.taxonomy = load_taxonomy(cfg.resolve(cfg.taxonomy));
  if (with_exemplars && !cfg.exemplars.empty()) {
    Dataset train = ingest_dataset(cfg.resolve(cfg.exemplars), res.taxonomy, cfg.exemplar_windowing());
    res.exemplars = std::move(train.exemplars);
    for (std::size_t i = 0; i < res.exemplars.size(); ++i) res.exemplar_index.emplace(res.exemplars[i].exemplar_id, i);
  }
  if (with_embeddings && !cfg.embeddings.empty()) {
    res.store = EmbeddingStore::load(cfg.resolve(cfg.embeddings));
    for (const auto& [id, vec] : res.store.entries()) {
      if (auto it = res.exemplar_index.find(id); it != res.exemplar_index.end()) {
        res.exemplars[it->second].embedding = vec;
      } else if (with_exemplars) {
        throw Error(ErrorCode::UnknownLabel, "embedding for unknown exemplar " + id);
      }
    }
  }
  return res;
}

PastContext observe_past(const VideoRecord& video, const PipelineConfig& cfg, const Taxonomy& tax, Backend& backend) {
  if (video.observed_count == 0) throw Error(ErrorCode::EmptyPast, "video " + video.video_id + " has no observed segments");
  PastContext ctx;
  if (cfg.past_source == PastSource::Oracle) {
    ctx.actions = video.observed_actions();
    return ctx;
  }
  const auto starts = build_windows(video.observed_count, cfg.recognition.window);
  std::vector<RequestBody> batch;
  for (std::size_t start : starts) batch.emplace_back(RecognizeRequest{video.video_id, start, cfg.recognition.window});
  const auto responses = backend.dispatch(batch);
  std::vector<WindowDistributions> windows;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    WindowDistributions win = expect<WindowDistributions>(responses[i]);
    if (win.window_start != starts[i]) {
      throw Error(ErrorCode::MalformedMessage, "recognize response for window " + std::to_string(starts[i]) +
                                                   " echoes window " + std::to_string(win.window_start));
    }
    for (const auto& d : win.verb_dists) {
      if (d.size() != tax.verbs().size()) throw Error(ErrorCode::InvalidDistribution, "verb distribution size");
    }
    for (const auto& d : win.noun_dists) {
      if (d.size() != tax.nouns().size()) throw Error(ErrorCode::InvalidDistribution, "noun distribution size");
    }
    windows.push_back(std::move(win));
  }
  ctx.actions = recognize_sequence(windows, video.observed_count, cfg.recognition);
  ctx.noun_distribution = mean_noun_distribution(windows);
  return ctx;
}

std::vector<std::string> caption_video(const VideoRecord& video, const PipelineConfig& cfg, Backend& backend) {
  const auto specs = make_caption_requests(video, cfg.caption_mode, cfg.caption_prefix, cfg.questions);
  std::vector<RequestBody> batch;
  for (const auto& s : specs) batch.emplace_back(CaptionRequest{s.video_id, s.timestamp_s, s.conditional_text});
  const auto responses = backend.dispatch(batch);
  std::vector<std::string> captions;
  for (const auto& r : responses) captions.push_back(expect<CaptionResult>(r).text);
  return attach_narrations(video, captions);
}

PromptRecord build_query(const VideoRecord& video, const PastContext& past, const PipelineConfig& cfg,
                         const Taxonomy& tax, Backend& backend) {
  PromptRecord query;
  query.past_actions = past.actions;
  if (cfg.prompt.include_captions) query.narrations = caption_video(video, cfg, backend);
  if (cfg.prompt.include_noun_list) {
    query.candidate_nouns = past.noun_distribution ? top5_nouns(*past.noun_distribution, tax).nouns
                                                   : frequent_nouns(past.actions, tax);
  }
  return query;
}

std::vector<double> embed_text(const std::string& text, Backend& backend) {
  return expect<EmbeddingResult>(backend.call(EmbedRequest{text})).values;
}

std::string exemplar_embedding_text(const ExemplarRecord& exemplar, const Taxonomy& tax, const PromptOptions& options) {
  return render_block(to_prompt_record(exemplar, tax), tax, options, false);
}

VideoPrediction predict_video(const VideoRecord& video, const PipelineConfig& cfg, const Resources& res,
                              Backend& backend) {
  const Taxonomy& tax = res.taxonomy;
  const PastContext past = observe_past(video, cfg, tax, backend);
  const PromptRecord query = build_query(video, past, cfg, tax, backend);

  PromptOptions options = cfg.prompt;
  options.instruction = instruction_for(cfg.prompt.instruction, cfg.horizon);
  const std::string query_text = render_block(query, tax, options, false);

  const std::size_t m = cfg.selection.per_prompt;
  std::vector<double> query_embedding;
  if (cfg.selection.kind != SelectionKind::Random) query_embedding = embed_text(query_text, backend);
  const auto ranked = select_exemplars(cfg.selection, query_embedding, res.store, cfg.candidates * m);
  const auto groups = partition_for_prompts(ranked, cfg.candidates, m);

  VideoPrediction out;
  std::vector<RequestBody> batch;
  for (std::size_t k = 0; k < groups.size(); ++k) {
    std::vector<ExemplarRecord> group;
    for (const auto& id : groups[k]) group.push_back(res.exemplar(id));
    RenderedPrompt prompt = compose_prompt(group, query, tax, options, k);
    batch.emplace_back(CompleteRequest{prompt.text, options.max_output_tokens, cfg.seed ^ static_cast<std::uint64_t>(k)});
    out.prompts.push_back(std::move(prompt.text));
  }
  const auto responses = backend.dispatch(batch);

  const ParseContext ctx{&tax, past.actions.back(), cfg.horizon};
  const ActionSequence fallback = predict_repeat(past.actions, cfg.horizon, 1).sequences.front();
  out.predictions.video_id = video.video_id;
  for (std::size_t k = 0; k < responses.size(); ++k) {
    if (const auto* completion = std::get_if<CompletionResult>(&responses[k].body)) {
      out.predictions.sequences.push_back(parse_output(completion->text, ctx));
      continue;
    }
    std::string reason = "unexpected payload";
    if (const auto* failure = std::get_if<BackendFailure>(&responses[k].body)) {
      reason = std::string(to_string(failure->code)) + ": " + failure->message;
    }
    out.warnings.push_back("video " + video.video_id + " prompt " + std::to_string(k) +
                           " fell back to the repeat baseline (" + reason + ")");
    out.predictions.sequences.push_back(fallback);
  }
  out.predictions.validate(cfg.horizon, &tax);
  return out;
}

template <typename Result>
std::vector<Result> for_each_video(const std::vector<VideoRecord>& videos, std::size_t workers,
                                   const std::function<Result(const VideoRecord&)>& fn) {
  std::vector<std::optional<Result>> slots(videos.size());
  std::vector<std::exception_ptr> errors(videos.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < videos.size(); i = next++) {
      try {
        slots[i] = fn(videos[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(std::max<std::size_t>(workers, 1), std::max<std::size_t>(videos.size(), 1));
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<Result> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

template std::vector<VideoPrediction> for_each_video<VideoPrediction>(
    const std::vector<VideoRecord>&, std::size_t, const std::function<VideoPrediction(const VideoRecord&)>&);
template std::vector<PredictionSet> for_each_video<PredictionSet>(
    const std::vector<VideoRecord>&, std::size_t, const std::function<PredictionSet(const VideoRecord&)>&);

std::vector<VideoPrediction> predict_all(const std::vector<VideoRecord>& videos, const PipelineConfig& cfg,
                                         const Resources& res, Backend& backend) {
  return for_each_video<VideoPrediction>(
      videos, cfg.workers, [&](const VideoRecord& v) { return predict_video(v, cfg, res, backend); });
}

EdReport evaluate_lta(const std::vector<VideoRecord>& videos, const std::vector<PredictionSet>& predictions,
                      std::size_t horizon, DlVariant variant) {
  std::map<std::string, const PredictionSet*> by_id;
  for (const auto& p : predictions) by_id[p.video_id] = &p;
  std::vector<VideoEd> rows;
  for (const auto& video : videos) {
    auto it = by_id.find(video.video_id);
    if (it == by_id.end()) throw Error(ErrorCode::MissingPrediction, "no prediction for video " + video.video_id);
    const ActionSequence gt = video.future_actions(horizon);
    if (gt.size() != horizon) {
      throw Error(ErrorCode::LengthMismatch, "video " + video.video_id + " has " + std::to_string(gt.size()) +
                                                 " future actions, expected " + std::to_string(horizon));
    }
    rows.push_back(ed_report(*it->second, gt, variant));
  }
  return aggregate_ed(std::move(rows));
}

MapReport evaluate_map(const std::vector<VideoRecord>& videos, const VideoPredictor& predictor,
                       const MapSplits& splits, std::size_t verb_count) {
  std::map<int, RatioInputs> by_ratio;
  for (int ratio : kObservedRatios) {
    RatioInputs& inputs = by_ratio[ratio];
    for (const auto& video : videos) {
      ObservedPrefix prefix = observed_prefix_by_ratio(video, ratio);
      VideoRecord truncated = video;
      truncated.observed_count = prefix.observed.size();
      inputs.scores.push_back(verb_scores(predictor(truncated), verb_count));
      inputs.remaining_verbs.push_back(std::move(prefix.remaining_verbs));
    }
  }
  return map_report(by_ratio, splits);
}

}  // namespace anticipate
