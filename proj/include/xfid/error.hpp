#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace xfid {

enum class ErrorCode {
  // corpus
  MissingField,
  DuplicateId,
  MalformedRecord,
  SampleTooLarge,
  EmptyCorpus,
  // embeddings
  BackendUnavailable,
  DimensionMismatch,
  NonFiniteEmbedding,
  CorruptHeader,
  TruncatedPayload,
  ZeroRow,
  // metrics
  MisalignedIds,
  EmptyInput,
  DegenerateInput,
  // parity
  TooFewSamples,
  SingleClass,
  Diverged,
  ZeroVariance,
  FoldClassCollapse,
  MissingFolds,
  // orchestration
  ExhaustedRetries,
  ProviderRefusal,
  // reporting / cli
  EmptyBundle,
  ConfigError,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the toolkit. `what()` reads "<Code>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

  /// Failures caused by a remote service rather than by local input.
  bool is_transport() const noexcept;

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace xfid
