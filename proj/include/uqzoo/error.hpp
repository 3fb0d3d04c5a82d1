#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace uqzoo {

enum class ErrorCode {
  MalformedJson,
  SchemaViolation,
  InconsistentRecord,
  DuplicateId,
  IoError,
  MissingField,
  ZeroProbability,
  ZeroNormEmbedding,
  ShapeMismatch,
  LayerOutOfRange,
  UnknownMethod,
  InvalidParam,
  DegenerateInput,
  EmptyDataset,
};

std::string_view error_code_name(ErrorCode code) noexcept;

/// Every failure raised by the engine carries one of the codes above so
/// callers can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace uqzoo
