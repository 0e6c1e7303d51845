#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "xfid/chat_provider.hpp"
#include "xfid/corpus.hpp"
#include "xfid/error.hpp"
#include "xfid/prompts.hpp"

namespace xfid {

struct RequestPolicy {
  std::size_t max_in_flight = 20;
  int max_retries = 3;  // attempts = 1 + max_retries for transient failures
  std::chrono::milliseconds initial_backoff{1000};
  double multiplier = 2.0;
  double jitter = 0.2;  // +-20% of the nominal delay
  std::chrono::milliseconds max_backoff{60000};
  std::chrono::milliseconds timeout{60000};

  /// Throws ConfigError when a field is out of range.
  void validate() const;

  /// Delay before retry number `retry` (1-based) for the given item. The
  /// jitter is drawn from a generator seeded by (item, retry), so schedules
  /// are reproducible.
  std::chrono::milliseconds backoff(int retry, std::string_view item) const;
};

struct JournalEntry {
  std::string id;
  int attempt = 0;
  std::string status;  // ok | retry | exhausted | refusal | fatal | unparseable
  std::string output;
};

/// Append-only JSONL log of provider attempts keyed by post id. Opening an
/// existing file loads it so completed items can be skipped on resume.
/// append() is thread-safe and flushes every line.
class Journal {
 public:
  explicit Journal(const std::filesystem::path& path,
                   const std::optional<FileProvenance>& provenance = std::nullopt);

  /// Output of the last "ok" entry for id, if any.
  std::optional<std::string> completed(const std::string& id) const;
  void append(const JournalEntry& entry);

  std::vector<JournalEntry> entries() const;

 private:
  mutable std::mutex mutex_;
  std::ofstream out_;
  std::vector<JournalEntry> entries_;
  std::map<std::string, std::string, std::less<>> completed_;
};

std::vector<JournalEntry> read_journal(const std::filesystem::path& path);

struct BatchStats {
  std::size_t calls = 0;    // provider requests issued
  std::size_t retries = 0;  // requests that repeated an earlier one
  std::size_t skipped = 0;  // items satisfied from the journal or input
  std::size_t peak_in_flight = 0;
};

/// Result of one item after retries.
struct CallOutcome {
  ReplyStatus status = ReplyStatus::fatal;  // transient here means retries ran out
  std::string text;
  std::string error;
  int attempts = 0;
};

/// Shared request engine: runs fn(i) for i in [0, n) on
/// min(max_in_flight, n) workers and tracks provider concurrency.
class RequestPool {
 public:
  RequestPool(ChatProvider& provider, const RequestPolicy& policy, Journal* journal);

  /// One logical request with transient-failure retries and backoff. Every
  /// attempt is journalled; `attempt_base` offsets the attempt numbers when a
  /// caller re-issues an item (e.g. after an unparseable reply).
  CallOutcome call(const std::string& id, const ChatRequest& request, int attempt_base = 0);

  void run(std::size_t n, const std::function<void(std::size_t)>& fn);

  Journal* journal() const { return journal_; }
  BatchStats stats() const;
  void note_skipped() { skipped_.fetch_add(1); }

 private:
  ChatProvider& provider_;
  RequestPolicy policy_;
  Journal* journal_;
  std::atomic<std::size_t> in_flight_{0};
  std::atomic<std::size_t> peak_{0};
  std::atomic<std::size_t> calls_{0};
  std::atomic<std::size_t> retries_{0};
  std::atomic<std::size_t> skipped_{0};
};

/// A per-item failure that did not abort the batch.
struct ItemFailure {
  std::string id;
  ErrorCode code = ErrorCode::ExhaustedRetries;  // or ProviderRefusal, BackendUnavailable
  std::string detail;
};

struct TranslateOptions {
  double temperature = 0.3;
  Journal* journal = nullptr;  // enables resume when set
};

struct TranslateResult {
  CorpusSlice slice;  // input order; text_tgt set for every success
  std::vector<ItemFailure> failures;
  BatchStats stats;
};

/// Translates every post lacking text_tgt with the given platform template.
/// Posts whose id already has an ok journal entry take that output without a
/// provider call. Throws ConfigError when a post's platform does not match the
/// template; per-post transport failures and refusals are recorded instead.
TranslateResult translate_batch(const CorpusSlice& posts, const PromptTemplate& prompt,
                                ChatProvider& provider, const RequestPolicy& policy,
                                const TranslateOptions& options = {});

}  // namespace xfid
