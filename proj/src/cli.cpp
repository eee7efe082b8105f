#include "anticipate/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "anticipate/backend.hpp"
#include "anticipate/baselines.hpp"
#include "anticipate/config.hpp"
#include "anticipate/dataset.hpp"
#include "anticipate/error.hpp"
#include "anticipate/pipeline.hpp"
#include "anticipate/reports.hpp"

namespace anticipate::cli {

namespace {

using nlohmann::json;

struct Options {
  std::string config;
  std::string format = "text";
  std::string out;
  int verbosity = 0;

  std::optional<std::string> backend;
  std::optional<std::string> record;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::size_t> horizon;
  std::optional<std::size_t> candidates;
  std::optional<std::size_t> window;
  std::optional<std::size_t> samples;
  std::optional<double> lambda;
  std::optional<std::size_t> per_prompt;
  std::optional<std::string> selection;
  std::optional<std::size_t> max_tokens;
  std::optional<std::string> past;
  std::optional<std::string> captions;
  std::optional<std::string> noun_list;
  std::optional<std::string> caption_mode;
  std::optional<std::int64_t> timeout_ms;

  std::string data;
  std::string pred;
  std::string gt;
  std::string kind;
  std::string predictor = "pipeline";

  mutable bool backend_from_config = false;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "Pipeline config file (JSON)")->required();
  sub->add_option("--format", o.format, "Report and diagnostic format")->check(CLI::IsMember({"text", "json"}));
  sub->add_option("--backend", o.backend, "exec:<cmd> | tcp:<host:port> | mock:<fixture>");
  sub->add_option("--record", o.record, "Record every backend exchange into this fixture file");
  sub->add_option("--seed", o.seed, "Base seed");
  sub->add_option("--workers", o.workers, "Videos processed in parallel");
  sub->add_option("--timeout-ms", o.timeout_ms, "Per-request backend timeout");
  sub->add_option("-Z,--horizon", o.horizon, "Future actions per sequence");
  sub->add_option("-K,--candidates", o.candidates, "Candidate sequences per video");
  sub->add_option("--window", o.window, "Recognition window length n");
  sub->add_option("--samples", o.samples, "Recognition samples per slot");
  sub->add_option("--lambda", o.lambda, "MMR trade-off");
  sub->add_option("--exemplars-per-prompt", o.per_prompt, "Exemplars per prompt m");
  sub->add_option("--selection", o.selection, "random | similarity | mmr")
      ->check(CLI::IsMember({"random", "similarity", "mmr"}));
  sub->add_option("--max-tokens", o.max_tokens, "Completion token limit");
  sub->add_option("--past", o.past, "recognized | oracle")->check(CLI::IsMember({"recognized", "oracle"}));
  sub->add_option("--captions", o.captions, "on | off")->check(CLI::IsMember({"on", "off"}));
  sub->add_option("--noun-list", o.noun_list, "on | off")->check(CLI::IsMember({"on", "off"}));
  sub->add_option("--caption-mode", o.caption_mode, "prefix | question:<topic>");
  sub->add_flag("-v,--verbose", o.verbosity, "More diagnostics on stderr");
}

PipelineConfig effective_config(const Options& o) {
  PipelineConfig cfg = load_config(o.config);
  json patch = cfg.to_json();
  if (o.seed) patch["seed"] = *o.seed;
  if (o.workers) patch["workers"] = *o.workers;
  if (o.timeout_ms) patch["timeout_ms"] = *o.timeout_ms;
  if (o.horizon) patch["Z"] = *o.horizon;
  if (o.candidates) patch["K"] = *o.candidates;
  if (o.window) patch["recognition"]["n"] = *o.window;
  if (o.samples) patch["recognition"]["samples"] = *o.samples;
  if (o.lambda) patch["selection"]["lambda"] = *o.lambda;
  if (o.per_prompt) patch["selection"]["m"] = *o.per_prompt;
  if (o.selection) patch["selection"]["kind"] = *o.selection;
  if (o.max_tokens) patch["prompt"]["max_output_tokens"] = *o.max_tokens;
  if (o.past) patch["past_source"] = *o.past;
  if (o.captions) patch["prompt"]["include_captions"] = *o.captions == "on";
  if (o.noun_list) patch["prompt"]["include_noun_list"] = *o.noun_list == "on";
  if (o.caption_mode) patch["captions"]["mode"] = *o.caption_mode;
  o.backend_from_config = !o.backend && !cfg.backend.empty();
  if (o.backend) {
    patch["backend"] = *o.backend;
  } else if (cfg.backend.empty()) {
    if (const char* env = std::getenv("ANTICIPATE_BACKEND")) patch["backend"] = env;
  }
  return config_from_json(patch, cfg.base_dir);
}

std::shared_ptr<Backend> open_backend(const PipelineConfig& cfg, const Options& o) {
  if (cfg.backend.empty()) {
    throw Error(ErrorCode::InvalidConfig, "no backend: pass --backend, set \"backend\" or ANTICIPATE_BACKEND");
  }
  std::string spec = cfg.backend;
  // A fixture named in the config file is relative to that file, like every other path in it.
  if (o.backend_from_config && spec.starts_with("mock:")) spec = "mock:" + cfg.resolve(spec.substr(5)).string();
  std::shared_ptr<Backend> backend = make_backend(spec, cfg.timeout);
  if (o.record) backend = std::make_shared<RecordingBackend>(backend, *o.record);
  return backend;
}

// Stands in when the run needs no model calls; any request fails with FixtureMiss.
std::shared_ptr<Backend> offline_backend() { return std::make_shared<MockBackend>(std::vector<FixtureRecord>{}); }

void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out.empty()) {
    out << text;
  } else {
    write_text_file(o.out, text);
  }
}

std::string with_config_header(const PipelineConfig& cfg, const std::string& body) {
  return "# config: " + cfg.to_json().dump() + "\n" + body;
}

json actions_json(const ActionSequence& seq, const Taxonomy& tax) {
  json out = json::array();
  for (const auto& a : seq) out.push_back(json::array({tax.verbs()[a.verb_id], tax.nouns()[a.noun_id]}));
  return out;
}

void report_warnings(const std::vector<VideoPrediction>& results, std::ostream& err) {
  for (const auto& r : results) {
    for (const auto& w : r.warnings) err << "warning: " << w << '\n';
  }
}

int cmd_ingest(const Options& o, std::ostream& out) {
  const PipelineConfig cfg = effective_config(o);
  const Taxonomy tax = load_taxonomy(cfg.resolve(cfg.taxonomy));
  const Dataset ds = ingest_dataset(o.data, tax, cfg.exemplar_windowing());
  std::size_t segments = 0, observed = 0, labelled = 0;
  for (const auto& v : ds.videos) {
    segments += v.segments.size();
    observed += v.observed_count;
    for (const auto& s : v.segments) labelled += s.gt_action ? 1 : 0;
  }
  json stats{{"split", ds.split},
             {"videos", ds.videos.size()},
             {"segments", segments},
             {"labelled_segments", labelled},
             {"observed_segments", observed},
             {"exemplars", ds.exemplars.size()},
             {"verbs", tax.verbs().size()},
             {"nouns", tax.nouns().size()}};
  if (o.format == "json") {
    emit(o, out, render_document(json{{"config", cfg.to_json()}, {"stats", stats}}));
  } else {
    std::ostringstream text;
    for (const auto& [k, v] : stats.items()) text << k << '\t' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
    emit(o, out, with_config_header(cfg, text.str()));
  }
  return kExitOk;
}

int cmd_recognize(const Options& o, std::ostream& out) {
  const PipelineConfig cfg = effective_config(o);
  const Taxonomy tax = load_taxonomy(cfg.resolve(cfg.taxonomy));
  const Dataset ds = ingest_dataset(o.data, tax, cfg.exemplar_windowing());
  auto backend = cfg.past_source == PastSource::Recognized ? open_backend(cfg, o) : offline_backend();
  const auto pasts = for_each_video<PredictionSet>(ds.videos, cfg.workers, [&](const VideoRecord& v) {
    PredictionSet p;
    p.video_id = v.video_id;
    p.sequences.push_back(observe_past(v, cfg, tax, *backend).actions);
    return p;
  });
  json rows = json::array();
  for (const auto& p : pasts) rows.push_back(json{{"video_id", p.video_id}, {"actions", actions_json(p.sequences[0], tax)}});
  emit(o, out, render_document(json{{"config", cfg.to_json()}, {"past_actions", rows}}));
  return kExitOk;
}

int cmd_exemplars(const Options& o, std::ostream& out) {
  const PipelineConfig cfg = effective_config(o);
  const Resources res = load_resources(cfg, true, false);
  auto backend = open_backend(cfg, o);
  std::vector<RequestBody> batch;
  for (const auto& ex : res.exemplars) batch.emplace_back(EmbedRequest{exemplar_embedding_text(ex, res.taxonomy, cfg.prompt)});
  const auto responses = backend->dispatch(batch);
  EmbeddingStore store;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    store.add(res.exemplars[i].exemplar_id, expect<EmbeddingResult>(responses[i]).values);
  }
  const std::string target = o.out.empty() ? cfg.resolve(cfg.embeddings).string() : o.out;
  if (target.empty()) throw Error(ErrorCode::InvalidConfig, "no embeddings output path");
  store.save(target);
  out << "wrote " << store.size() << " embeddings of dimension " << store.dimension() << " to " << target << '\n';
  return kExitOk;
}

int cmd_predict(const Options& o, std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = effective_config(o);
  const Resources res = load_resources(cfg);
  const Dataset ds = ingest_dataset(o.data, res.taxonomy, cfg.exemplar_windowing());
  auto backend = open_backend(cfg, o);
  const auto results = predict_all(ds.videos, cfg, res, *backend);
  report_warnings(results, err);
  std::vector<PredictionSet> preds;
  for (const auto& r : results) preds.push_back(r.predictions);
  emit(o, out, render_document(predictions_to_json(preds, res.taxonomy, cfg.to_json())));
  return kExitOk;
}

int cmd_baseline(const Options& o, std::ostream& out) {
  const PipelineConfig cfg = effective_config(o);
  const bool retrieve = o.kind == "retrieve";
  const Resources res = load_resources(cfg, retrieve, retrieve);
  const Dataset ds = ingest_dataset(o.data, res.taxonomy, cfg.exemplar_windowing());
  auto backend =
      retrieve || cfg.past_source == PastSource::Recognized ? open_backend(cfg, o) : offline_backend();
  const auto preds = for_each_video<PredictionSet>(ds.videos, cfg.workers, [&](const VideoRecord& v) {
    const PastContext past = observe_past(v, cfg, res.taxonomy, *backend);
    PredictionSet p;
    if (o.kind == "last") {
      p = predict_last(past.actions, cfg.horizon, cfg.candidates);
    } else if (o.kind == "repeat") {
      p = predict_repeat(past.actions, cfg.horizon, cfg.candidates);
    } else {
      const PromptRecord query = build_query(v, past, cfg, res.taxonomy, *backend);
      const auto embedding = embed_text(render_block(query, res.taxonomy, cfg.prompt, false), *backend);
      p = predict_retrieve(embedding, res.store, res.exemplars, cfg.horizon, cfg.candidates);
    }
    p.video_id = v.video_id;
    return p;
  });
  emit(o, out, render_document(predictions_to_json(preds, res.taxonomy, cfg.to_json())));
  return kExitOk;
}

int cmd_eval_ed(const Options& o, std::ostream& out) {
  const PipelineConfig cfg = effective_config(o);
  const Taxonomy tax = load_taxonomy(cfg.resolve(cfg.taxonomy));
  const Dataset ds = ingest_dataset(o.gt, tax, cfg.exemplar_windowing());
  const auto preds = read_predictions(o.pred, tax);
  const EdReport report = evaluate_lta(ds.videos, preds, cfg.horizon, cfg.dl_variant);
  if (o.format == "json") {
    emit(o, out, render_document(ed_report_to_json(report, cfg.to_json())));
  } else {
    emit(o, out, with_config_header(cfg, ed_report_to_text(report)));
  }
  return kExitOk;
}

int cmd_eval_map(const Options& o, std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = effective_config(o);
  const bool needs_pool = o.predictor == "pipeline";
  const Resources res = load_resources(cfg, needs_pool, needs_pool);
  const Dataset ds = ingest_dataset(o.data, res.taxonomy, cfg.exemplar_windowing());
  const bool online = needs_pool || (o.predictor != "oracle" && cfg.past_source == PastSource::Recognized);
  auto backend = online ? open_backend(cfg, o) : offline_backend();
  MapSplits splits;
  for (std::size_t i = 0; i < res.taxonomy.verbs().size(); ++i) splits.all.push_back(i);
  splits.freq = cfg.freq_verbs;
  splits.rare = cfg.rare_verbs;

  VideoPredictor predictor = [&](const VideoRecord& v) -> PredictionSet {
    if (o.predictor == "oracle") {
      // Perfect set predictor: every remaining verb appears, nothing else does.
      ActionSequence seq;
      for (std::size_t i = v.observed_count; i < v.segments.size(); ++i) {
        if (v.segments[i].gt_action) seq.push_back(*v.segments[i].gt_action);
      }
      PredictionSet p{v.video_id, {seq.empty() ? v.observed_actions() : seq}};
      return p;
    }
    if (o.predictor == "pipeline") {
      VideoPrediction r = predict_video(v, cfg, res, *backend);
      for (const auto& w : r.warnings) err << "warning: " << w << '\n';
      return r.predictions;
    }
    const PastContext past = observe_past(v, cfg, res.taxonomy, *backend);
    return o.predictor == "last" ? predict_last(past.actions, cfg.horizon, cfg.candidates)
                                 : predict_repeat(past.actions, cfg.horizon, cfg.candidates);
  };
  const MapReport report = evaluate_map(ds.videos, predictor, splits, res.taxonomy.verbs().size());
  if (o.format == "json") {
    emit(o, out, render_document(map_report_to_json(report, cfg.to_json())));
  } else {
    emit(o, out, with_config_header(cfg, map_report_to_text(report)));
  }
  return kExitOk;
}

int cmd_serve(const std::string& spec, std::istream& in, std::ostream& out) {
  auto backend = make_backend(spec);
  serve(*backend, in, out);
  return kExitOk;
}

void diagnose(std::ostream& err, const std::string& format, std::string_view code, const std::string& message) {
  if (format == "json") {
    err << json{{"error", std::string(code)}, {"message", message}}.dump() << '\n';
  } else {
    err << "error: " << message << '\n';
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Long-term action anticipation toolkit", "anticipate"};
  app.require_subcommand(1);
  Options o;

  auto* ingest = app.add_subcommand("ingest", "Validate an annotation file against the taxonomy and print stats");
  add_common(ingest, o);
  ingest->add_option("--data", o.data, "Annotation file")->required();

  auto* recognize = app.add_subcommand("recognize", "Recognize past actions of every video");
  add_common(recognize, o);
  recognize->add_option("--data", o.data, "Annotation file")->required();
  recognize->add_option("--out", o.out, "Output file (default stdout)");

  auto* exemplars = app.add_subcommand("exemplars", "Embed the exemplar pool through the backend");
  add_common(exemplars, o);
  exemplars->add_option("--out", o.out, "Embedding file (default: config \"embeddings\")");

  auto* predict = app.add_subcommand("predict", "Predict K future sequences per video");
  add_common(predict, o);
  predict->add_option("--data", o.data, "Annotation file")->required();
  predict->add_option("--out", o.out, "Output file (default stdout)");

  auto* eval_ed = app.add_subcommand("eval-ed", "Edit-distance evaluation of a prediction file");
  add_common(eval_ed, o);
  eval_ed->add_option("--pred", o.pred, "Prediction file")->required();
  eval_ed->add_option("--gt", o.gt, "Annotation file with ground truth")->required();
  eval_ed->add_option("--out", o.out, "Output file (default stdout)");

  auto* eval_map = app.add_subcommand("eval-map", "Verb mAP over observed ratios 25/50/75");
  add_common(eval_map, o);
  eval_map->add_option("--data", o.data, "Annotation file")->required();
  eval_map->add_option("--predictor", o.predictor, "pipeline | last | repeat | oracle")
      ->check(CLI::IsMember({"pipeline", "last", "repeat", "oracle"}));
  eval_map->add_option("--out", o.out, "Output file (default stdout)");

  auto* baseline = app.add_subcommand("baseline", "Non-learned predictors");
  add_common(baseline, o);
  baseline->add_option("--kind", o.kind, "last | repeat | retrieve")
      ->required()
      ->check(CLI::IsMember({"last", "repeat", "retrieve"}));
  baseline->add_option("--data", o.data, "Annotation file")->required();
  baseline->add_option("--out", o.out, "Output file (default stdout)");

  std::string serve_spec;
  auto* serve_cmd = app.add_subcommand("serve", "Answer protocol requests on stdin/stdout from another backend");
  serve_cmd->add_option("--backend", serve_spec, "Backend to forward to, e.g. mock:<fixture>")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    diagnose(err, o.format, "UsageError", e.what());
    err << app.help();
    return kExitValidation;
  }

  try {
    if (*ingest) return cmd_ingest(o, out);
    if (*recognize) return cmd_recognize(o, out);
    if (*exemplars) return cmd_exemplars(o, out);
    if (*predict) return cmd_predict(o, out, err);
    if (*eval_ed) return cmd_eval_ed(o, out);
    if (*eval_map) return cmd_eval_map(o, out, err);
    if (*baseline) return cmd_baseline(o, out);
    if (*serve_cmd) return cmd_serve(serve_spec, std::cin, out);
  } catch (const Error& e) {
    diagnose(err, o.format, to_string(e.code()), e.what());
    return is_backend_error(e.code()) ? kExitBackend : kExitValidation;
  } catch (const std::exception& e) {
    diagnose(err, o.format, "InternalError", e.what());
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace anticipate::cli
