#pragma once

#include <stdexcept>
#include <string>

namespace citeval {

enum class ErrorKind {
  EmptyInput,
  StrictParse,
  InvariantViolation,
  IndexOutOfRange,
  LevelMismatch,
  NotApplicable,
  OverlappingMarks,
  MarkOutOfBounds,
  PoolTooSmall,
  UnresolvableCitation,
  NoUnits,
  Transport,
  HttpStatus,
  Timeout,
  AuthMissing,
  ContextOverflow,
  Io,
  Schema,
  GoldParse,
  Config,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::StrictParse: return "StrictParse";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::LevelMismatch: return "LevelMismatch";
    case ErrorKind::NotApplicable: return "NotApplicable";
    case ErrorKind::OverlappingMarks: return "OverlappingMarks";
    case ErrorKind::MarkOutOfBounds: return "MarkOutOfBounds";
    case ErrorKind::PoolTooSmall: return "PoolTooSmall";
    case ErrorKind::UnresolvableCitation: return "UnresolvableCitation";
    case ErrorKind::NoUnits: return "NoUnits";
    case ErrorKind::Transport: return "Transport";
    case ErrorKind::HttpStatus: return "HttpStatus";
    case ErrorKind::Timeout: return "Timeout";
    case ErrorKind::AuthMissing: return "AuthMissing";
    case ErrorKind::ContextOverflow: return "ContextOverflow";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Schema: return "Schema";
    case ErrorKind::GoldParse: return "GoldParse";
    case ErrorKind::Config: return "Config";
  }
  return "Unknown";
}

// Single exception type for the whole toolkit. `detail` carries the numeric
// payload some kinds need (HTTP status, input line number, passage index).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, long detail = 0)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        detail_(detail) {}

  ErrorKind kind() const { return kind_; }
  long detail() const { return detail_; }

 private:
  ErrorKind kind_;
  long detail_;
};

}  // namespace citeval
