#include "xfid/error.hpp"

namespace xfid {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::SampleTooLarge: return "SampleTooLarge";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteEmbedding: return "NonFiniteEmbedding";
    case ErrorCode::CorruptHeader: return "CorruptHeader";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::ZeroRow: return "ZeroRow";
    case ErrorCode::MisalignedIds: return "MisalignedIds";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::FoldClassCollapse: return "FoldClassCollapse";
    case ErrorCode::MissingFolds: return "MissingFolds";
    case ErrorCode::ExhaustedRetries: return "ExhaustedRetries";
    case ErrorCode::ProviderRefusal: return "ProviderRefusal";
    case ErrorCode::EmptyBundle: return "EmptyBundle";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail),
      code_(code),
      detail_(detail) {}

bool Error::is_transport() const noexcept {
  return code_ == ErrorCode::BackendUnavailable ||
         code_ == ErrorCode::ExhaustedRetries;
}

}  // namespace xfid
