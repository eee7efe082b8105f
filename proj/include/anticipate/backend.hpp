#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "anticipate/error.hpp"
#include "anticipate/recognition.hpp"

namespace anticipate {

// Wire protocol: one compact JSON value per '\n'-terminated UTF-8 line, keys
// in sorted order (nlohmann's canonical dump), floats as shortest round-trip
// decimals.
//   request  {"id":<int>,"kind":"recognize"|"caption"|"complete"|"embed",...}
//   response {"id":<int>,"ok":true,<payload>} | {"id":<int>,"ok":false,"error":{"code","message"}}

inline constexpr std::size_t kMaxFrameBytes = 16u << 20;

struct RecognizeRequest {
  std::string video_id;
  std::size_t window_start = 0;
  std::size_t window = 0;  // "n" on the wire
};

struct CaptionRequest {
  std::string video_id;
  double timestamp_s = 0.0;
  std::string conditional_text;
};

struct CompleteRequest {
  std::string prompt;
  std::size_t max_output_tokens = 80;
  std::uint64_t sampling_seed = 0;
};

struct EmbedRequest {
  std::string text;
};

using RequestBody = std::variant<RecognizeRequest, CaptionRequest, CompleteRequest, EmbedRequest>;

struct BackendRequest {
  std::uint64_t id = 0;
  RequestBody body;
};

struct CaptionResult {
  std::string text;
};

struct CompletionResult {
  std::string text;
};

struct EmbeddingResult {
  std::vector<double> values;
};

/// Remote error payloads carry BackendError plus the backend's own code;
/// transport failures use Timeout / TransportClosed / FixtureMiss.
struct BackendFailure {
  ErrorCode code = ErrorCode::BackendError;
  std::string remote_code;
  std::string message;
};

using ResponseBody = std::variant<WindowDistributions, CaptionResult, CompletionResult, EmbeddingResult, BackendFailure>;

struct BackendResponse {
  std::uint64_t id = 0;
  ResponseBody body;

  [[nodiscard]] bool ok() const noexcept { return !std::holds_alternative<BackendFailure>(body); }
};

std::string_view kind_name(const RequestBody& body);

nlohmann::json request_to_json(const RequestBody& body);
nlohmann::json response_payload_to_json(const ResponseBody& body);
RequestBody request_from_json(const nlohmann::json& j);
ResponseBody response_payload_from_json(const nlohmann::json& j);

/// Serialized line including the trailing '\n'. Throws FrameTooLarge.
std::string frame_request(const BackendRequest& request);
std::string frame_response(const BackendResponse& response);

/// Throw MalformedMessage / UnknownKind / FrameTooLarge.
BackendRequest parse_request(std::string_view line);
BackendResponse parse_response(std::string_view line);

/// Request with the id stripped, canonically serialized; the mock's lookup key.
std::string canonical_key(const RequestBody& body);

/// FNV-1a 64, lowercase hex. Used to key completions by prompt.
std::string prompt_hash(std::string_view prompt);

/// Payload of `response` as T, or throws the failure it carries.
template <typename T>
const T& expect(const BackendResponse& response) {
  if (const auto* failure = std::get_if<BackendFailure>(&response.body)) {
    std::string msg = "request " + std::to_string(response.id);
    if (!failure->remote_code.empty()) msg += " [" + failure->remote_code + "]";
    throw Error(failure->code, msg + ": " + failure->message);
  }
  if (const auto* value = std::get_if<T>(&response.body)) return *value;
  throw Error(ErrorCode::MalformedMessage, "response " + std::to_string(response.id) + " has the wrong payload type");
}

/// Blocking, ordered batch interface over any model backend. Implementations are thread-safe.
class Backend {
 public:
  virtual ~Backend() = default;

  /// Responses come back in request order; per-request failures are returned
  /// as BackendFailure payloads rather than thrown.
  virtual std::vector<BackendResponse> dispatch(std::span<const RequestBody> batch) = 0;

  BackendResponse call(const RequestBody& request) { return dispatch(std::span(&request, 1)).front(); }

 protected:
  std::uint64_t next_id() noexcept { return next_id_.fetch_add(1) + 1; }

 private:
  std::atomic<std::uint64_t> next_id_{0};
};

/// `request` is the id-less request object; a Complete request may instead be
/// keyed as {"kind":"complete","prompt_hash":...,"sampling_seed":...}.
struct FixtureRecord {
  nlohmann::json request;
  ResponseBody response;
};

std::vector<FixtureRecord> load_fixture(const std::filesystem::path& path);
void save_fixture(const std::filesystem::path& path, const std::vector<FixtureRecord>& records);

/// Deterministic replay of recorded responses.
class MockBackend : public Backend {
 public:
  explicit MockBackend(const std::vector<FixtureRecord>& records);
  explicit MockBackend(const std::filesystem::path& fixture) : MockBackend(load_fixture(fixture)) {}

  /// Exact canonical key first; Complete requests then fall back to
  /// {"kind":"complete","prompt_hash":...,"sampling_seed":...}. Throws FixtureMiss.
  [[nodiscard]] ResponseBody lookup(const RequestBody& request) const;

  std::vector<BackendResponse> dispatch(std::span<const RequestBody> batch) override;

 private:
  std::map<std::string, ResponseBody> table_;
};

/// Forwards to `inner` and keeps every successful exchange for save_fixture.
class RecordingBackend : public Backend {
 public:
  RecordingBackend(std::shared_ptr<Backend> inner, std::filesystem::path output)
      : inner_(std::move(inner)), output_(std::move(output)) {}
  ~RecordingBackend() override;

  std::vector<BackendResponse> dispatch(std::span<const RequestBody> batch) override;
  void flush();

 private:
  std::shared_ptr<Backend> inner_;
  std::filesystem::path output_;
  std::mutex mutex_;
  std::map<std::string, FixtureRecord> records_;
};

/// Line protocol over a bidirectional byte stream (child stdio or TCP).
/// Multiple requests are in flight per batch; responses are matched by id.
class StreamBackend : public Backend {
 public:
  ~StreamBackend() override;

  /// Runs `command` through /bin/sh and talks over its stdin/stdout.
  static std::unique_ptr<StreamBackend> spawn(const std::string& command, std::chrono::milliseconds timeout);
  /// Throws TransportClosed if the connection cannot be made.
  static std::unique_ptr<StreamBackend> connect(const std::string& host, std::uint16_t port,
                                                std::chrono::milliseconds timeout);

  std::vector<BackendResponse> dispatch(std::span<const RequestBody> batch) override;

 private:
  StreamBackend(int read_fd, int write_fd, int child_pid, std::chrono::milliseconds timeout);

  enum class ReadStatus { Line, Timeout, Closed };
  ReadStatus read_line(std::string& line, std::chrono::steady_clock::time_point deadline);
  bool write_all(std::string_view data);

  int read_fd_;
  int write_fd_;
  int child_pid_;
  std::chrono::milliseconds timeout_;
  bool closed_ = false;
  std::string buffer_;
  std::vector<std::uint64_t> abandoned_;
  std::mutex mutex_;
};

/// "exec:<cmd>", "tcp:<host>:<port>" or "mock:<fixture>".
std::shared_ptr<Backend> make_backend(const std::string& spec,
                                      std::chrono::milliseconds timeout = std::chrono::seconds(60));

/// Answers request lines from `in` with `backend`, one at a time, until EOF.
/// Malformed lines get an error response with id 0.
void serve(Backend& backend, std::istream& in, std::ostream& out);

}  // namespace anticipate
