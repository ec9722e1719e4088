#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mindmeld {

enum class ErrorCode {
  kFrozenMap,
  kEmptyMiniNetwork,
  kMalformedSnapshot,
  kTickRegression,
  kEmptyMap,
  kEmptySelfMap,
  kEmptySelection,
  kInvalidConfig,
  kDuplicateAgentId,
  kInvalidSeed,
  kUnknownSpeaker,
  kUnknownAgent,
  kNoOuterMap,
  kInvalidPair,
  kTooFewParticipants,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kFrozenMap: return "FrozenMap";
    case ErrorCode::kEmptyMiniNetwork: return "EmptyMiniNetwork";
    case ErrorCode::kMalformedSnapshot: return "MalformedSnapshot";
    case ErrorCode::kTickRegression: return "TickRegression";
    case ErrorCode::kEmptyMap: return "EmptyMap";
    case ErrorCode::kEmptySelfMap: return "EmptySelfMap";
    case ErrorCode::kEmptySelection: return "EmptySelection";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kDuplicateAgentId: return "DuplicateAgentId";
    case ErrorCode::kInvalidSeed: return "InvalidSeed";
    case ErrorCode::kUnknownSpeaker: return "UnknownSpeaker";
    case ErrorCode::kUnknownAgent: return "UnknownAgent";
    case ErrorCode::kNoOuterMap: return "NoOuterMap";
    case ErrorCode::kInvalidPair: return "InvalidPair";
    case ErrorCode::kTooFewParticipants: return "TooFewParticipants";
  }
  return "Unknown";
}

/// Every failure raised by the engine carries one of the codes above so that
/// front ends (CLI exit codes, HTTP statuses) can map it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// Malformed input documents, as opposed to well-formed input that breaks an invariant.
  bool is_parse_error() const noexcept {
    return code_ == ErrorCode::kMalformedSnapshot || code_ == ErrorCode::kInvalidConfig;
  }

 private:
  ErrorCode code_;
};

}  // namespace mindmeld
