#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace anticipate {

enum class ErrorCode {
  MalformedFile,
  DuplicateEntry,
  IdOutOfRange,
  UnknownLabel,
  NonMonotoneSegments,
  EmptyVideo,
  InvalidDistribution,
  EmptyPool,
  LengthMismatch,
  PoolTooSmall,
  ZeroVector,
  DimensionMismatch,
  InsufficientExemplars,
  MissingFutureActions,
  InvalidOptions,
  EmptySequence,
  EmptyPast,
  EmptySplit,
  MissingPrediction,
  InvalidConfig,
  // Backend / transport failures. Everything from here down maps to exit code 2.
  FrameTooLarge,
  MalformedMessage,
  UnknownKind,
  FixtureMiss,
  Timeout,
  TransportClosed,
  BackendError,
};

std::string_view to_string(ErrorCode code);

/// True for codes raised by the backend protocol or its transports.
bool is_backend_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace anticipate
