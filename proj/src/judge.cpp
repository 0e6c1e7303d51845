#include "xfid/judge.hpp"

#include <algorithm>
#include <map>

#include <nlohmann/json.hpp>

#include "xfid/error.hpp"
#include "xfid/text_format.hpp"

namespace xfid {

using json = nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

std::string_view strip_fence(std::string_view s) {
  if (!s.starts_with("```")) return s;
  auto nl = s.find('\n');
  if (nl == std::string_view::npos || !s.ends_with("```") || s.size() < nl + 4) return s;
  const std::string_view tag = trim(s.substr(3, nl - 3));
  if (!tag.empty() && tag != "json") return s;
  return trim(s.substr(nl + 1, s.size() - 3 - (nl + 1)));
}

std::optional<int> bounded_int(const json& j) {
  if (!j.is_number_integer()) return std::nullopt;
  const auto v = j.get<std::int64_t>();
  if (v < 0 || v > 10) return std::nullopt;
  return static_cast<int>(v);
}

JudgeVerdict from_object(const json& j, std::string post_id) {
  JudgeVerdict v;
  v.post_id = std::move(post_id);
  v.score = j.at("score").get<int>();
  v.category = *parse_category(j.at("category").get<std::string>());
  for (JudgeDimension d : kJudgeDimensions) {
    v.dimensions[static_cast<std::size_t>(d)] = j.at("dimensions").at(std::string(name(d))).get<int>();
  }
  v.notes = j.at("notes").get<std::string>();
  return v;
}

bool valid_object(const json& j) {
  if (!j.is_object() || j.size() != 4) return false;
  for (const char* key : {"score", "category", "dimensions", "notes"}) {
    if (!j.contains(key)) return false;
  }
  if (!bounded_int(j["score"])) return false;
  if (!j["category"].is_string() || !parse_category(j["category"].get<std::string>())) return false;
  if (!j["notes"].is_string()) return false;
  const json& dims = j["dimensions"];
  if (!dims.is_object() || dims.size() != kJudgeDimensions.size()) return false;
  for (JudgeDimension d : kJudgeDimensions) {
    auto it = dims.find(std::string(name(d)));
    if (it == dims.end() || !bounded_int(*it)) return false;
  }
  return true;
}

}  // namespace

std::string_view name(JudgeCategory c) {
  switch (c) {
    case JudgeCategory::clean: return "clean";
    case JudgeCategory::minor: return "minor";
    case JudgeCategory::error: return "error";
  }
  return "error";
}

std::optional<JudgeCategory> parse_category(std::string_view text) {
  if (text == "clean") return JudgeCategory::clean;
  if (text == "minor") return JudgeCategory::minor;
  if (text == "error") return JudgeCategory::error;
  return std::nullopt;
}

std::string_view name(JudgeDimension d) {
  switch (d) {
    case JudgeDimension::tone: return "tone";
    case JudgeDimension::slang: return "slang";
    case JudgeDimension::formatting: return "formatting";
    case JudgeDimension::proper_nouns: return "proper_nouns";
  }
  return "tone";
}

std::optional<JudgeVerdict> parse_verdict(std::string_view reply, std::string post_id) {
  const std::string_view body = strip_fence(trim(reply));
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception&) {
    return std::nullopt;
  }
  if (!valid_object(j)) return std::nullopt;
  return from_object(j, std::move(post_id));
}

JudgeVerdict error_verdict(std::string post_id, std::string notes) {
  JudgeVerdict v;
  v.post_id = std::move(post_id);
  v.category = JudgeCategory::error;
  v.notes = std::move(notes);
  return v;
}

std::string verdict_to_json(const JudgeVerdict& v) {
  json dims = json::object();
  for (JudgeDimension d : kJudgeDimensions) dims[std::string(name(d))] = v.dimensions[static_cast<std::size_t>(d)];
  json j = json::object();
  j["post_id"] = v.post_id;
  j["score"] = v.score;
  j["category"] = std::string(name(v.category));
  j["dimensions"] = dims;
  j["notes"] = v.notes;
  return j.dump();
}

JudgeVerdict verdict_from_json(std::string_view line) {
  try {
    json j = json::parse(line);
    std::string id = j.at("post_id").get<std::string>();
    j.erase("post_id");
    if (!valid_object(j)) throw Error(ErrorCode::MalformedRecord, "invalid verdict for " + id);
    return from_object(j, std::move(id));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("verdict: ") + e.what());
  }
}

std::string judge_user_message(const Post& post) {
  return "SOURCE:\n" + post.text_src + "\n\nTRANSLATION:\n" + post.text_tgt.value_or("");
}

JudgeResult judge_batch(const CorpusSlice& pairs, const PromptTemplate& prompt,
                        ChatProvider& provider, const RequestPolicy& policy,
                        const JudgeOptions& options) {
  for (const Post& p : pairs.posts) {
    if (!p.text_tgt) throw Error(ErrorCode::MissingField, "text_tgt missing for post " + p.id);
  }
  JudgeResult result;
  result.verdicts.resize(pairs.size());
  std::vector<std::optional<ItemFailure>> failures(pairs.size());
  RequestPool pool(provider, policy, options.journal);

  pool.run(pairs.size(), [&](std::size_t i) {
    const Post& post = pairs.posts[i];
    if (options.journal) {
      if (auto done = options.journal->completed(post.id)) {
        if (auto v = parse_verdict(*done, post.id)) {
          result.verdicts[i] = std::move(*v);
          pool.note_skipped();
          return;
        }
      }
    }
    const ChatRequest request{prompt.system_text, judge_user_message(post), options.temperature};
    int attempts = 0;
    for (int round = 0; round < 2; ++round) {
      const CallOutcome outcome = pool.call(post.id, request, attempts);
      attempts += outcome.attempts;
      if (outcome.status == ReplyStatus::ok) {
        if (auto v = parse_verdict(outcome.text, post.id)) {
          result.verdicts[i] = std::move(*v);
          return;
        }
        if (options.journal) options.journal->append({post.id, attempts, "unparseable", outcome.text});
        continue;
      }
      ItemFailure failure{post.id, ErrorCode::BackendUnavailable, outcome.error};
      std::string note = "provider error";
      if (outcome.status == ReplyStatus::transient) {
        failure.code = ErrorCode::ExhaustedRetries;
        note = "exhausted retries";
      } else if (outcome.status == ReplyStatus::refusal) {
        failure.code = ErrorCode::ProviderRefusal;
        note = "refusal";
      }
      failures[i] = std::move(failure);
      result.verdicts[i] = error_verdict(post.id, note);
      return;
    }
    result.verdicts[i] = error_verdict(post.id, "unparseable");
  });

  for (auto& f : failures) {
    if (f) result.failures.push_back(std::move(*f));
  }
  result.stats = pool.stats();
  return result;
}

std::int64_t JudgeAudit::clean_tenths() const { return percent_tenths(clean, n); }
std::int64_t JudgeAudit::minor_tenths() const { return percent_tenths(minor, n); }
std::int64_t JudgeAudit::error_tenths() const { return percent_tenths(error, n); }

namespace {

void add(JudgeAudit& audit, const JudgeVerdict& v, std::int64_t& score_sum) {
  ++audit.n;
  switch (v.category) {
    case JudgeCategory::clean: ++audit.clean; break;
    case JudgeCategory::minor: ++audit.minor; break;
    case JudgeCategory::error: ++audit.error; break;
  }
  score_sum += v.score;
}

}  // namespace

std::vector<JudgeAudit> aggregate_audit(
    const std::vector<JudgeVerdict>& verdicts,
    const std::function<std::optional<std::string>(const std::string&)>& subcorpus_of) {
  if (verdicts.empty()) throw Error(ErrorCode::EmptyInput, "no verdicts to aggregate");
  std::vector<JudgeAudit> audits;
  std::vector<std::int64_t> sums;
  std::map<std::string, std::size_t> slot;
  for (const JudgeVerdict& v : verdicts) {
    auto sub = subcorpus_of(v.post_id);
    if (!sub) throw Error(ErrorCode::MisalignedIds, "verdict for unknown post " + v.post_id);
    auto [it, inserted] = slot.emplace(*sub, audits.size());
    if (inserted) {
      audits.push_back(JudgeAudit{*sub});
      sums.push_back(0);
    }
    add(audits[it->second], v, sums[it->second]);
  }
  for (std::size_t i = 0; i < audits.size(); ++i) {
    audits[i].mean_score = static_cast<double>(sums[i]) / static_cast<double>(audits[i].n);
  }
  return audits;
}

JudgeAudit pooled_audit(const std::vector<JudgeVerdict>& verdicts, std::string label) {
  if (verdicts.empty()) throw Error(ErrorCode::EmptyInput, "no verdicts to aggregate");
  JudgeAudit audit{std::move(label)};
  std::int64_t sum = 0;
  for (const JudgeVerdict& v : verdicts) add(audit, v, sum);
  audit.mean_score = static_cast<double>(sum) / static_cast<double>(audit.n);
  return audit;
}

}  // namespace xfid
