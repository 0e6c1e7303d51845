#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "xfid/chat_provider.hpp"
#include "xfid/corpus.hpp"
#include "xfid/embedding.hpp"
#include "xfid/logistic.hpp"
#include "xfid/orchestrator.hpp"
#include "xfid/report.hpp"

namespace xfid {

enum class EmbeddingBackendKind { http, table };

/// Effective pipeline settings. Relative paths in the file are resolved
/// against the directory holding it.
struct PipelineConfig {
  std::filesystem::path base_dir;

  // [run]
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";
  std::string corpus_name = "corpus";

  // [corpus]
  std::filesystem::path corpus_path;
  CorpusFormat corpus_format = CorpusFormat::jsonl;

  // [sample]
  std::size_t sample_size = 200;

  // [embedding]
  EmbeddingBackendKind embedding_backend = EmbeddingBackendKind::table;
  BackendConfig embedding;
  std::filesystem::path embedding_table;

  // [provider]
  ProviderConfig provider;
  double translate_temperature = 0.3;
  std::filesystem::path prompt_dir;

  // [policy]
  RequestPolicy policy;

  // [parity]
  int k = 10;
  LogisticOptions logistic;
  double parity_threshold = 0.02;

  // [thresholds]
  Thresholds thresholds;

  /// Canonical JSON of every setting that can influence outputs. The output
  /// directory and secrets are excluded.
  std::string canonical() const;
  /// Hex SHA-256 of canonical().
  std::string hash() const;
  FileProvenance provenance() const { return {hash(), seed}; }
};

/// Parses TOML text. Throws ConfigError naming the offending field
/// ("parity.k: expected an integer"), including for unknown keys.
PipelineConfig parse_config(std::string_view toml_text, const std::filesystem::path& base_dir);

/// Reads and parses a config file; a missing file is a ConfigError.
PipelineConfig load_config(const std::filesystem::path& path);

/// Checks referenced paths exist. Throws ConfigError with the field path.
void validate_paths(const PipelineConfig& cfg);

/// Lowercase hex SHA-256 of arbitrary bytes.
std::string sha256_hex(std::string_view bytes);

}  // namespace xfid
