#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace subseas {

enum class ErrorCode {
  InvalidArgument,
  Parse,
  DuplicateKey,
  UnknownGridPoint,
  UndefinedSkill,
  UncoveredMonthDay,
  EmptyWindow,
  ZeroWeights,
  LagViolation,
  MissingSource,
  NoEvaluableDates,
  Degenerate,
  Config,
  Io,
};

/// Stable lowercase identifier used in CLI error lines, e.g. "undefined_skill".
std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (and the CLI) can react without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace subseas
