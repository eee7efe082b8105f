#include "anticipate/backend.hpp"

#include <fstream>
#include <iostream>

namespace anticipate {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedMessage, what); }

const json& field(const json& j, const char* key) {
  if (!j.contains(key)) malformed(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

std::string string_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) malformed(std::string("field \"") + key + "\" is not a string");
  return v.get<std::string>();
}

std::uint64_t uint_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    malformed(std::string("field \"") + key + "\" is not a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

double number_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) malformed(std::string("field \"") + key + "\" is not a number");
  return v.get<double>();
}

std::vector<double> vector_of(const json& v, const char* what) {
  if (!v.is_array()) malformed(std::string(what) + " is not an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (!x.is_number()) malformed(std::string(what) + " holds a non-number");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<std::vector<double>> matrix_of(const json& v, const char* what) {
  if (!v.is_array()) malformed(std::string(what) + " is not an array");
  std::vector<std::vector<double>> out;
  for (const auto& row : v) out.push_back(vector_of(row, what));
  return out;
}

std::string compact(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

std::string_view strip_newline(std::string_view line) {
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);
  return line;
}

json parse_line(std::string_view line) {
  if (line.size() > kMaxFrameBytes) {
    throw Error(ErrorCode::FrameTooLarge, std::to_string(line.size()) + " bytes");
  }
  json j = json::parse(strip_newline(line), nullptr, false);
  if (j.is_discarded() || !j.is_object()) malformed("not a JSON object");
  return j;
}

std::string finish_frame(const json& j) {
  std::string line = compact(j);
  line.push_back('\n');
  if (line.size() > kMaxFrameBytes) throw Error(ErrorCode::FrameTooLarge, std::to_string(line.size()) + " bytes");
  return line;
}

ErrorCode failure_code_from_wire(const std::string& code) {
  for (ErrorCode c : {ErrorCode::Timeout, ErrorCode::TransportClosed, ErrorCode::FixtureMiss}) {
    if (to_string(c) == code) return c;
  }
  return ErrorCode::BackendError;
}

std::string complete_hash_key(const CompleteRequest& req) {
  json j = {{"kind", "complete"}, {"prompt_hash", prompt_hash(req.prompt)}, {"sampling_seed", req.sampling_seed}};
  return compact(j);
}

}  // namespace

std::string_view kind_name(const RequestBody& body) {
  return std::visit(overloaded{[](const RecognizeRequest&) { return std::string_view("recognize"); },
                               [](const CaptionRequest&) { return std::string_view("caption"); },
                               [](const CompleteRequest&) { return std::string_view("complete"); },
                               [](const EmbedRequest&) { return std::string_view("embed"); }},
                    body);
}

json request_to_json(const RequestBody& body) {
  return std::visit(
      overloaded{
          [](const RecognizeRequest& r) {
            return json{{"kind", "recognize"}, {"video_id", r.video_id}, {"window_start", r.window_start},
                        {"n", r.window}};
          },
          [](const CaptionRequest& r) {
            return json{{"kind", "caption"}, {"video_id", r.video_id}, {"timestamp_s", r.timestamp_s},
                        {"conditional_text", r.conditional_text}};
          },
          [](const CompleteRequest& r) {
            return json{{"kind", "complete"}, {"prompt", r.prompt}, {"max_output_tokens", r.max_output_tokens},
                        {"sampling_seed", r.sampling_seed}};
          },
          [](const EmbedRequest& r) { return json{{"kind", "embed"}, {"text", r.text}}; }},
      body);
}

RequestBody request_from_json(const json& j) {
  if (!j.is_object()) malformed("request is not an object");
  const std::string kind = string_field(j, "kind");
  if (kind == "recognize") {
    return RecognizeRequest{string_field(j, "video_id"), uint_field(j, "window_start"), uint_field(j, "n")};
  }
  if (kind == "caption") {
    return CaptionRequest{string_field(j, "video_id"), number_field(j, "timestamp_s"),
                          string_field(j, "conditional_text")};
  }
  if (kind == "complete") {
    return CompleteRequest{string_field(j, "prompt"), uint_field(j, "max_output_tokens"),
                           uint_field(j, "sampling_seed")};
  }
  if (kind == "embed") return EmbedRequest{string_field(j, "text")};
  throw Error(ErrorCode::UnknownKind, "\"" + kind + "\"");
}

json response_payload_to_json(const ResponseBody& body) {
  return std::visit(
      overloaded{
          [](const WindowDistributions& w) {
            return json{{"ok", true},
                        {"window_start", w.window_start},
                        {"verb_dists", w.verb_dists},
                        {"noun_dists", w.noun_dists}};
          },
          [](const CaptionResult& c) { return json{{"ok", true}, {"caption", c.text}}; },
          [](const CompletionResult& c) { return json{{"ok", true}, {"completion", c.text}}; },
          [](const EmbeddingResult& e) { return json{{"ok", true}, {"embedding", e.values}}; },
          [](const BackendFailure& f) {
            const std::string code = f.remote_code.empty() ? std::string(to_string(f.code)) : f.remote_code;
            return json{{"ok", false}, {"error", {{"code", code}, {"message", f.message}}}};
          }},
      body);
}

ResponseBody response_payload_from_json(const json& j) {
  if (!j.is_object()) malformed("response is not an object");
  const json& ok = field(j, "ok");
  if (!ok.is_boolean()) malformed("field \"ok\" is not a boolean");
  if (!ok.get<bool>()) {
    const json& err = field(j, "error");
    if (!err.is_object()) malformed("field \"error\" is not an object");
    const std::string code = string_field(err, "code");
    const std::string message = err.contains("message") && err["message"].is_string() ? err["message"].get<std::string>() : "";
    const ErrorCode mapped = failure_code_from_wire(code);
    return BackendFailure{mapped, mapped == ErrorCode::BackendError ? code : "", message};
  }
  if (j.contains("verb_dists")) {
    return WindowDistributions{uint_field(j, "window_start"), matrix_of(j["verb_dists"], "verb_dists"),
                               matrix_of(field(j, "noun_dists"), "noun_dists")};
  }
  if (j.contains("caption")) return CaptionResult{string_field(j, "caption")};
  if (j.contains("completion")) return CompletionResult{string_field(j, "completion")};
  if (j.contains("embedding")) return EmbeddingResult{vector_of(j["embedding"], "embedding")};
  malformed("response carries no known payload");
}

std::string frame_request(const BackendRequest& request) {
  json j = request_to_json(request.body);
  j["id"] = request.id;
  return finish_frame(j);
}

std::string frame_response(const BackendResponse& response) {
  json j = response_payload_to_json(response.body);
  j["id"] = response.id;
  return finish_frame(j);
}

BackendRequest parse_request(std::string_view line) {
  const json j = parse_line(line);
  BackendRequest req;
  req.id = uint_field(j, "id");
  req.body = request_from_json(j);
  return req;
}

BackendResponse parse_response(std::string_view line) {
  const json j = parse_line(line);
  BackendResponse resp;
  resp.id = uint_field(j, "id");
  resp.body = response_payload_from_json(j);
  return resp;
}

std::string canonical_key(const RequestBody& body) { return compact(request_to_json(body)); }

std::string prompt_hash(std::string_view prompt) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : prompt) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kHex[h & 0xF];
    h >>= 4;
  }
  return out;
}

std::vector<FixtureRecord> load_fixture(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MalformedFile, "cannot open fixture " + path.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_array()) {
    throw Error(ErrorCode::MalformedFile, path.string() + ": fixture must be a JSON array");
  }
  std::vector<FixtureRecord> out;
  for (const auto& rec : doc) {
    if (!rec.is_object() || !rec.contains("request") || !rec.contains("response")) {
      throw Error(ErrorCode::MalformedFile, path.string() + ": record needs \"request\" and \"response\"");
    }
    try {
      out.push_back(FixtureRecord{rec["request"], response_payload_from_json(rec["response"])});
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedFile, path.string() + ": " + e.what());
    }
  }
  return out;
}

void save_fixture(const std::filesystem::path& path, const std::vector<FixtureRecord>& records) {
  json doc = json::array();
  for (const auto& rec : records) {
    doc.push_back(json{{"request", rec.request}, {"response", response_payload_to_json(rec.response)}});
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::MalformedFile, "cannot write fixture " + path.string());
  out << doc.dump(1, ' ', false, json::error_handler_t::replace) << '\n';
}

MockBackend::MockBackend(const std::vector<FixtureRecord>& records) {
  for (const auto& rec : records) {
    std::string key;
    const json& req = rec.request;
    if (req.is_object() && req.value("kind", "") == "complete" && req.contains("prompt_hash")) {
      try {
        key = compact(json{{"kind", "complete"},
                           {"prompt_hash", string_field(req, "prompt_hash")},
                           {"sampling_seed", uint_field(req, "sampling_seed")}});
      } catch (const Error& e) {
        throw Error(ErrorCode::MalformedFile, std::string("fixture request: ") + e.what());
      }
    } else {
      try {
        key = canonical_key(request_from_json(req));
      } catch (const Error& e) {
        throw Error(ErrorCode::MalformedFile, std::string("fixture request: ") + e.what());
      }
    }
    table_[key] = rec.response;
  }
}

ResponseBody MockBackend::lookup(const RequestBody& request) const {
  const std::string key = canonical_key(request);
  if (auto it = table_.find(key); it != table_.end()) return it->second;
  if (const auto* complete = std::get_if<CompleteRequest>(&request)) {
    if (auto it = table_.find(complete_hash_key(*complete)); it != table_.end()) return it->second;
  }
  std::string shown = key.size() > 240 ? key.substr(0, 240) + "..." : key;
  throw Error(ErrorCode::FixtureMiss, shown);
}

std::vector<BackendResponse> MockBackend::dispatch(std::span<const RequestBody> batch) {
  std::vector<BackendResponse> out;
  out.reserve(batch.size());
  for (const auto& req : batch) {
    BackendResponse resp{next_id(), {}};
    try {
      resp.body = lookup(req);
    } catch (const Error& e) {
      resp.body = BackendFailure{e.code(), "", e.what()};
    }
    out.push_back(std::move(resp));
  }
  return out;
}

RecordingBackend::~RecordingBackend() {
  try {
    flush();
  } catch (...) {
  }
}

std::vector<BackendResponse> RecordingBackend::dispatch(std::span<const RequestBody> batch) {
  auto responses = inner_->dispatch(batch);
  std::lock_guard lock(mutex_);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (!responses[i].ok()) continue;
    records_[canonical_key(batch[i])] = FixtureRecord{request_to_json(batch[i]), responses[i].body};
  }
  return responses;
}

void RecordingBackend::flush() {
  std::lock_guard lock(mutex_);
  std::vector<FixtureRecord> records;
  records.reserve(records_.size());
  for (const auto& [_, rec] : records_) records.push_back(rec);
  save_fixture(output_, records);
}

std::shared_ptr<Backend> make_backend(const std::string& spec, std::chrono::milliseconds timeout) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw Error(ErrorCode::InvalidConfig, "backend \"" + spec + "\" must be exec:<cmd>, tcp:<host:port> or mock:<file>");
  }
  const std::string scheme = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  if (scheme == "mock") return std::make_shared<MockBackend>(std::filesystem::path(rest));
  if (scheme == "exec") return StreamBackend::spawn(rest, timeout);
  if (scheme == "tcp") {
    const auto port_sep = rest.rfind(':');
    if (port_sep == std::string::npos) throw Error(ErrorCode::InvalidConfig, "tcp backend needs host:port");
    int port = 0;
    try {
      port = std::stoi(rest.substr(port_sep + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidConfig, "bad tcp port in \"" + spec + "\"");
    }
    if (port <= 0 || port > 65535) throw Error(ErrorCode::InvalidConfig, "bad tcp port in \"" + spec + "\"");
    return StreamBackend::connect(rest.substr(0, port_sep), static_cast<std::uint16_t>(port), timeout);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown backend scheme \"" + scheme + "\"");
}

void serve(Backend& backend, std::istream& in, std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    BackendResponse resp;
    try {
      BackendRequest req = parse_request(line);
      resp = backend.call(req.body);
      resp.id = req.id;
    } catch (const Error& e) {
      resp = BackendResponse{0, BackendFailure{ErrorCode::BackendError, std::string(to_string(e.code())), e.what()}};
    }
    out << frame_response(resp) << std::flush;
  }
}

}  // namespace anticipate
