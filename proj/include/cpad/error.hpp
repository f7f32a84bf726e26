#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cpad {

enum class ErrorCode {
  InvalidEncoding,
  SyntaxError,
  EmptyPolicy,
  NonMonotonePolicy,
  NotAuthorized,
  MissingDummyAttribute,
  DuplicateAttribute,
  UnknownAttribute,
  PolicyMissingDummy,
  DummyNotUnique,
  BadSignature,
  BadFogSignature,
  UnknownFname,
  NoPendingRequest,
  PendingRequestExists,
  AuthenticationFailure,
  NotFound,
  ScenarioError,
  Io,
};

/// Stable kebab-case name, used in CLI diagnostics and trace notes.
std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Policy text rejected by the parser; carries the byte offset of the problem.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, const std::string& what)
      : Error(ErrorCode::SyntaxError, "at byte " + std::to_string(offset) + ": " + what),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Failure inside a simulated scenario, tagged with the script step that caused it.
class ScenarioError : public Error {
 public:
  ScenarioError(std::size_t step, const std::string& what)
      : Error(ErrorCode::ScenarioError, "step " + std::to_string(step) + ": " + what),
        step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace cpad
