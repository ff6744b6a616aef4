#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace polyglot {

enum class ErrorCode {
  UnsupportedSize,
  NotACavityHost,
  InapplicableRecipe,
  GuestTooLarge,
  FixupOverflow,
  AlreadyAugmented,
  MissingLabel,
  UnreadableFile,
  DegenerateLabels,
  DimensionMismatch,
  CorruptModel,
  IoFailure,
  CoverageMismatch,
  ModelLayoutMismatch,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Every recoverable failure in the library surfaces as this exception; the
/// code is what callers (and the CLI exit-code mapping) switch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace polyglot
