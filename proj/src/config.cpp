#include "anticipate/config.hpp"

#include <fstream>
#include <set>

#include "anticipate/error.hpp"

namespace anticipate {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (allowed.count(key) == 0) throw Error(ErrorCode::InvalidConfig, "unknown key \"" + key + "\" in " + where);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::InvalidConfig, std::string("bad type for \"") + key + "\" in " + where);
  }
}

const json& section(const json& doc, const char* key) {
  static const json empty = json::object();
  if (!doc.contains(key)) return empty;
  if (!doc.at(key).is_object()) throw Error(ErrorCode::InvalidConfig, std::string("\"") + key + "\" must be an object");
  return doc.at(key);
}

std::string caption_mode_name(const CaptionMode& mode) {
  if (mode.kind == CaptionMode::Kind::Prefix) return "prefix";
  return "question:" + std::string(to_string(mode.topic));
}

CaptionMode parse_caption_mode(const std::string& name) {
  if (name == "prefix") return CaptionMode{};
  if (name.rfind("question:", 0) == 0) {
    if (auto topic = parse_caption_topic(name.substr(9))) return CaptionMode{CaptionMode::Kind::Question, *topic};
  }
  throw Error(ErrorCode::InvalidConfig, "caption mode must be \"prefix\" or \"question:<topic>\", got \"" + name + "\"");
}

}  // namespace

void PipelineConfig::finalize() {
  if (horizon == 0) throw Error(ErrorCode::InvalidConfig, "Z must be >= 1");
  if (candidates == 0) throw Error(ErrorCode::InvalidConfig, "K must be >= 1");
  if (recognition.window == 0 || recognition.samples == 0) {
    throw Error(ErrorCode::InvalidConfig, "recognition n and samples must be >= 1");
  }
  if (!(selection.lambda >= 0.0 && selection.lambda <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "selection lambda must lie in [0, 1]");
  }
  if (selection.per_prompt == 0) throw Error(ErrorCode::InvalidConfig, "selection m must be >= 1");
  if (exemplar_past == 0) throw Error(ErrorCode::InvalidConfig, "exemplar past length must be >= 1");
  if (workers == 0) workers = 1;
  try {
    prompt.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  recognition.seed = seed;
  selection.seed = seed;
}

std::filesystem::path PipelineConfig::resolve(const std::string& path) const {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

json PipelineConfig::to_json() const {
  json questions_json = json::object();
  for (const auto& [topic, text] : questions) questions_json[std::string(to_string(topic))] = text;
  return json{
      {"taxonomy", taxonomy},
      {"exemplars", exemplars},
      {"embeddings", embeddings},
      {"Z", horizon},
      {"K", candidates},
      {"seed", seed},
      {"past_source", past_source == PastSource::Oracle ? "oracle" : "recognized"},
      {"recognition", {{"n", recognition.window}, {"samples", recognition.samples}}},
      {"selection",
       {{"kind", std::string(to_string(selection.kind))}, {"lambda", selection.lambda}, {"m", selection.per_prompt}}},
      {"prompt",
       {{"include_captions", prompt.include_captions},
        {"include_noun_list", prompt.include_noun_list},
        {"instruction", prompt.instruction},
        {"max_output_tokens", prompt.max_output_tokens}}},
      {"captions", {{"mode", caption_mode_name(caption_mode)}, {"prefix", caption_prefix}, {"questions", questions_json}}},
      {"exemplar_windowing",
       {{"mode", windowing == ExemplarWindowing::Mode::Sliding ? "sliding" : "per_video"}, {"past", exemplar_past}}},
      {"backend", backend},
      {"timeout_ms", timeout.count()},
      {"workers", workers},
      {"evaluation",
       {{"freq_verbs", freq_verbs},
        {"rare_verbs", rare_verbs},
        {"dl_variant", dl_variant == DlVariant::Osa ? "osa" : "unrestricted"}}},
  };
}

PipelineConfig config_from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  reject_unknown(doc,
                 {"taxonomy", "exemplars", "embeddings", "Z", "K", "seed", "past_source", "recognition", "selection",
                  "prompt", "captions", "exemplar_windowing", "backend", "timeout_ms", "workers", "evaluation"},
                 "config");
  PipelineConfig cfg;
  cfg.base_dir = base_dir;
  read(doc, "taxonomy", cfg.taxonomy, "config");
  read(doc, "exemplars", cfg.exemplars, "config");
  read(doc, "embeddings", cfg.embeddings, "config");
  read(doc, "Z", cfg.horizon, "config");
  read(doc, "K", cfg.candidates, "config");
  read(doc, "seed", cfg.seed, "config");
  read(doc, "backend", cfg.backend, "config");
  read(doc, "workers", cfg.workers, "config");
  std::int64_t timeout_ms = cfg.timeout.count();
  read(doc, "timeout_ms", timeout_ms, "config");
  cfg.timeout = std::chrono::milliseconds(timeout_ms);

  std::string past = "recognized";
  read(doc, "past_source", past, "config");
  if (past == "oracle") {
    cfg.past_source = PastSource::Oracle;
  } else if (past != "recognized") {
    throw Error(ErrorCode::InvalidConfig, "past_source must be \"recognized\" or \"oracle\"");
  }

  const json& rec = section(doc, "recognition");
  reject_unknown(rec, {"n", "samples"}, "recognition");
  read(rec, "n", cfg.recognition.window, "recognition");
  read(rec, "samples", cfg.recognition.samples, "recognition");

  const json& sel = section(doc, "selection");
  reject_unknown(sel, {"kind", "lambda", "m"}, "selection");
  std::string kind = std::string(to_string(cfg.selection.kind));
  read(sel, "kind", kind, "selection");
  cfg.selection.kind = parse_selection_kind(kind);
  read(sel, "lambda", cfg.selection.lambda, "selection");
  read(sel, "m", cfg.selection.per_prompt, "selection");

  const json& prompt = section(doc, "prompt");
  reject_unknown(prompt, {"include_captions", "include_noun_list", "instruction", "max_output_tokens"}, "prompt");
  read(prompt, "include_captions", cfg.prompt.include_captions, "prompt");
  read(prompt, "include_noun_list", cfg.prompt.include_noun_list, "prompt");
  read(prompt, "instruction", cfg.prompt.instruction, "prompt");
  read(prompt, "max_output_tokens", cfg.prompt.max_output_tokens, "prompt");

  const json& cap = section(doc, "captions");
  reject_unknown(cap, {"mode", "prefix", "questions"}, "captions");
  std::string mode = "prefix";
  read(cap, "mode", mode, "captions");
  cfg.caption_mode = parse_caption_mode(mode);
  read(cap, "prefix", cfg.caption_prefix, "captions");
  if (cap.contains("questions")) {
    const json& qs = section(cap, "questions");
    for (const auto& [name, text] : qs.items()) {
      auto topic = parse_caption_topic(name);
      if (!topic || !text.is_string()) throw Error(ErrorCode::InvalidConfig, "bad caption question \"" + name + "\"");
      cfg.questions[*topic] = text.get<std::string>();
    }
  }

  const json& win = section(doc, "exemplar_windowing");
  reject_unknown(win, {"mode", "past"}, "exemplar_windowing");
  std::string wmode = "sliding";
  read(win, "mode", wmode, "exemplar_windowing");
  if (wmode == "per_video") {
    cfg.windowing = ExemplarWindowing::Mode::PerVideo;
  } else if (wmode != "sliding") {
    throw Error(ErrorCode::InvalidConfig, "exemplar_windowing.mode must be \"sliding\" or \"per_video\"");
  }
  read(win, "past", cfg.exemplar_past, "exemplar_windowing");

  const json& ev = section(doc, "evaluation");
  reject_unknown(ev, {"freq_verbs", "rare_verbs", "dl_variant"}, "evaluation");
  read(ev, "freq_verbs", cfg.freq_verbs, "evaluation");
  read(ev, "rare_verbs", cfg.rare_verbs, "evaluation");
  std::string variant = "osa";
  read(ev, "dl_variant", variant, "evaluation");
  if (variant == "unrestricted") {
    cfg.dl_variant = DlVariant::Unrestricted;
  } else if (variant != "osa") {
    throw Error(ErrorCode::InvalidConfig, "dl_variant must be \"osa\" or \"unrestricted\"");
  }

  cfg.finalize();
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open config " + path.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorCode::InvalidConfig, path.string() + ": not valid JSON");
  return config_from_json(doc, path.parent_path());
}

}  // namespace anticipate
