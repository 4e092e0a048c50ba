#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace toricq {

/// Machine-readable error categories. The CLI maps these onto exit codes.
enum class ErrorCode {
  config,         // basis mismatch, malformed input, missing multiplication table
  load,           // polytope fails its load checks (empty, unbounded, redundant)
  domain,         // point outside C^d_Delta, non-closed support passed where closed required
  undecided_sign, // certified sign could not exclude zero
  nonconvergence, // flow hit its iteration cap or exponent guard
  internal,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::config: return "config";
    case ErrorCode::load: return "load";
    case ErrorCode::domain: return "domain";
    case ErrorCode::undecided_sign: return "undecided_sign";
    case ErrorCode::nonconvergence: return "nonconvergence";
    case ErrorCode::internal: return "internal";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorCode::config, w) {}
};
struct LoadError : Error {
  explicit LoadError(const std::string& w) : Error(ErrorCode::load, w) {}
};
struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error(ErrorCode::domain, w) {}
};
struct UndecidedSignError : Error {
  explicit UndecidedSignError(const std::string& w)
      : Error(ErrorCode::undecided_sign, w) {}
};
/// Carries the last iterate (serialized by the caller) so the failure is reportable.
struct NonconvergenceError : Error {
  explicit NonconvergenceError(const std::string& w, std::string last_iterate = {})
      : Error(ErrorCode::nonconvergence, w), last_iterate_(std::move(last_iterate)) {}
  const std::string& last_iterate() const noexcept { return last_iterate_; }

 private:
  std::string last_iterate_;
};
struct InternalError : Error {
  explicit InternalError(const std::string& w) : Error(ErrorCode::internal, w) {}
};

}  // namespace toricq
