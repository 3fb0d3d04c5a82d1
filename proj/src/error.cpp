#include "uqzoo/error.hpp"

namespace uqzoo {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedJson: return "MalformedJson";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::InconsistentRecord: return "InconsistentRecord";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::ZeroProbability: return "ZeroProbability";
    case ErrorCode::ZeroNormEmbedding: return "ZeroNormEmbedding";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::LayerOutOfRange: return "LayerOutOfRange";
    case ErrorCode::UnknownMethod: return "UnknownMethod";
    case ErrorCode::InvalidParam: return "InvalidParam";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
  }
  return "Unknown";
}

}  // namespace uqzoo
