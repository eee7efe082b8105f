#include "anticipate/error.hpp"

namespace anticipate {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedFile: return "MalformedFile";
    case ErrorCode::DuplicateEntry: return "DuplicateEntry";
    case ErrorCode::IdOutOfRange: return "IdOutOfRange";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::NonMonotoneSegments: return "NonMonotoneSegments";
    case ErrorCode::EmptyVideo: return "EmptyVideo";
    case ErrorCode::InvalidDistribution: return "InvalidDistribution";
    case ErrorCode::EmptyPool: return "EmptyPool";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::PoolTooSmall: return "PoolTooSmall";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InsufficientExemplars: return "InsufficientExemplars";
    case ErrorCode::MissingFutureActions: return "MissingFutureActions";
    case ErrorCode::InvalidOptions: return "InvalidOptions";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::EmptyPast: return "EmptyPast";
    case ErrorCode::EmptySplit: return "EmptySplit";
    case ErrorCode::MissingPrediction: return "MissingPrediction";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::FrameTooLarge: return "FrameTooLarge";
    case ErrorCode::MalformedMessage: return "MalformedMessage";
    case ErrorCode::UnknownKind: return "UnknownKind";
    case ErrorCode::FixtureMiss: return "FixtureMiss";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::TransportClosed: return "TransportClosed";
    case ErrorCode::BackendError: return "BackendError";
  }
  return "Unknown";
}

bool is_backend_error(ErrorCode code) { return code >= ErrorCode::FrameTooLarge; }

}  // namespace anticipate
