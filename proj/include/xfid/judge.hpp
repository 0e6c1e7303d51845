#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xfid/corpus.hpp"
#include "xfid/orchestrator.hpp"

namespace xfid {

enum class JudgeCategory { clean, minor, error };

std::string_view name(JudgeCategory c);
std::optional<JudgeCategory> parse_category(std::string_view text);

enum class JudgeDimension { tone = 0, slang, formatting, proper_nouns };
inline constexpr std::array<JudgeDimension, 4> kJudgeDimensions{
    JudgeDimension::tone, JudgeDimension::slang, JudgeDimension::formatting,
    JudgeDimension::proper_nouns};
std::string_view name(JudgeDimension d);

struct JudgeVerdict {
  std::string post_id;
  int score = 0;
  JudgeCategory category = JudgeCategory::error;
  std::array<int, 4> dimensions{};  // indexed by JudgeDimension
  std::string notes;

  bool operator==(const JudgeVerdict&) const = default;
};

/// Strict parse of a judge reply: after trimming (and removing one optional
/// ```json fence) the text must be exactly one JSON object with integer score
/// 0-10, category clean|minor|error, dimensions {tone, slang, formatting,
/// proper_nouns} each an integer 0-10, and string notes. No other keys.
std::optional<JudgeVerdict> parse_verdict(std::string_view reply, std::string post_id);

/// Verdict standing in for a post the judge could not assess.
JudgeVerdict error_verdict(std::string post_id, std::string notes);

std::string verdict_to_json(const JudgeVerdict& v);
/// Throws MalformedRecord.
JudgeVerdict verdict_from_json(std::string_view line);

/// "SOURCE:\n<src>\n\nTRANSLATION:\n<tgt>"
std::string judge_user_message(const Post& post);

struct JudgeOptions {
  double temperature = 0.0;
  Journal* journal = nullptr;
};

struct JudgeResult {
  std::vector<JudgeVerdict> verdicts;  // input order
  std::vector<ItemFailure> failures;
  BatchStats stats;
};

/// One verdict per post. An unparseable reply is re-requested once and then
/// recorded as category error with notes "unparseable". Transport failures and
/// refusals become error verdicts and are also listed in failures.
/// Throws MissingField when a post has no text_tgt.
JudgeResult judge_batch(const CorpusSlice& pairs, const PromptTemplate& prompt,
                        ChatProvider& provider, const RequestPolicy& policy,
                        const JudgeOptions& options = {});

struct JudgeAudit {
  std::string subcorpus;
  std::size_t n = 0;
  std::size_t clean = 0;
  std::size_t minor = 0;
  std::size_t error = 0;
  double mean_score = 0.0;

  /// Tenths of a percent, half-up (930 = 93.0%).
  std::int64_t clean_tenths() const;
  std::int64_t minor_tenths() const;
  std::int64_t error_tenths() const;
};

/// Per-subcorpus audits in order of first appearance. Throws EmptyInput, or
/// MisalignedIds when subcorpus_of cannot place a verdict.
std::vector<JudgeAudit> aggregate_audit(
    const std::vector<JudgeVerdict>& verdicts,
    const std::function<std::optional<std::string>(const std::string& post_id)>& subcorpus_of);

/// All verdicts pooled under one label. Throws EmptyInput.
JudgeAudit pooled_audit(const std::vector<JudgeVerdict>& verdicts, std::string label);

}  // namespace xfid
