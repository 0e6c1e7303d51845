#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace xfid {

/// Row-aligned embeddings: one row per post id, float32 storage, row-major.
/// Construction validates the invariants (|ids| = rows, unique ids, finite
/// values); instances are immutable afterwards.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;

  /// Throws DimensionMismatch if data.size() != ids.size() * dim,
  /// MalformedRecord on duplicate ids, NonFiniteEmbedding on NaN/Inf.
  EmbeddingMatrix(std::vector<std::string> ids, std::size_t dim, std::vector<float> data);

  std::size_t rows() const { return ids_.size(); }
  std::size_t dim() const { return dim_; }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<float>& data() const { return data_; }

  std::span<const float> row(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }

  /// Subset of rows, in the given order.
  EmbeddingMatrix select(std::span<const std::size_t> rows) const;

  bool operator==(const EmbeddingMatrix&) const = default;

 private:
  std::vector<std::string> ids_;
  std::size_t dim_ = 0;
  std::vector<float> data_;
};

/// Connection settings for an embedding service.
struct BackendConfig {
  std::string endpoint;  // full URL of the POST endpoint
  std::size_t batch_size = 32;
  std::chrono::milliseconds timeout{30000};
  std::string token_env;  // name of the env var holding the bearer token
  std::size_t max_concurrent = 4;
};

/// Anything that turns texts into vectors. Implementations must be callable
/// from several threads at once.
class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;

  /// One vector per text, same order. Throws BackendUnavailable on transport
  /// failure.
  virtual std::vector<std::vector<float>> embed(std::span<const std::string> texts) = 0;
};

/// HTTP backend: POST {"texts": [...]} -> {"embeddings": [[...], ...]} with an
/// optional `Authorization: Bearer <token>` taken from cfg.token_env.
class HttpEmbeddingBackend final : public EmbeddingBackend {
 public:
  explicit HttpEmbeddingBackend(BackendConfig cfg);
  std::vector<std::vector<float>> embed(std::span<const std::string> texts) override;

 private:
  BackendConfig cfg_;
  std::string origin_;
  std::string path_;
  std::string token_;
};

/// Precomputed lookup table: a JSONL file of {"text": str, "embedding": [...]}.
/// Used for offline runs and the bundled fixture.
class TableEmbeddingBackend final : public EmbeddingBackend {
 public:
  explicit TableEmbeddingBackend(const std::filesystem::path& path);
  std::vector<std::vector<float>> embed(std::span<const std::string> texts) override;

  std::size_t size() const { return table_.size(); }

 private:
  std::unordered_map<std::string, std::vector<float>> table_;
};

/// Embeds texts in batches of cfg.batch_size, with up to cfg.max_concurrent
/// batches in flight. Row i embeds texts[i] and is labelled ids[i].
/// Throws EmptyInput, BackendUnavailable, DimensionMismatch (detail names the
/// batch index) or NonFiniteEmbedding (detail names the row).
EmbeddingMatrix fetch_embeddings(EmbeddingBackend& backend, const BackendConfig& cfg,
                                 std::span<const std::string> texts,
                                 std::vector<std::string> ids);

/// Binary format: 16-byte magic "XFIDEMB1" (NUL padded), u32 n, u32 d, n ids
/// as u16-length-prefixed UTF-8, then n*d float32, all little-endian.
void save_matrix(const EmbeddingMatrix& m, const std::filesystem::path& path);
void write_matrix(const EmbeddingMatrix& m, std::ostream& out);

/// Throws CorruptHeader or TruncatedPayload.
EmbeddingMatrix load_matrix(const std::filesystem::path& path);
EmbeddingMatrix read_matrix(std::istream& in);

/// Unit-norm rows. Throws ZeroRow naming the first zero row.
EmbeddingMatrix l2_normalize(const EmbeddingMatrix& m);

}  // namespace xfid
