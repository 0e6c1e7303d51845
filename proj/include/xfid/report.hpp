#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "xfid/corpus.hpp"
#include "xfid/judge.hpp"
#include "xfid/parity.hpp"
#include "xfid/similarity.hpp"

namespace xfid {

struct PrevalenceRow {
  std::string subcorpus;
  Prevalence prevalence;
};

struct CosineRow {
  std::string subcorpus;
  SimilaritySummary summary;
};

struct CkaRow {
  std::string subcorpus;
  CkaResult result;
};

struct ParitySection {
  std::string subcorpus;
  std::vector<ParityRow> rows;
};

struct Thresholds {
  double cosine = 0.80;  // minimum mean cosine
  double gap = 0.05;     // maximum parity gap
  double clean = 90.0;   // minimum judge clean percentage
};

enum class VerdictLevel { pass, warn, fail };
std::string_view name(VerdictLevel level);

struct Verdict {
  VerdictLevel level = VerdictLevel::warn;
  std::vector<std::string> reasons;  // one per breached family
  Thresholds thresholds;
  std::optional<double> mean_cosine;
  std::optional<double> max_gap;
  std::optional<double> clean_pct;
};

/// Everything the report renders. Absent families are simply empty.
struct ReportBundle {
  std::string corpus;
  std::vector<PrevalenceRow> prevalence;
  std::vector<CosineRow> cosine;
  std::optional<SimilaritySummary> cosine_overall;
  std::vector<CkaRow> cka;
  std::optional<CkaResult> cka_overall;
  std::vector<ParitySection> parity;
  std::vector<JudgeAudit> judge;
  std::optional<JudgeAudit> judge_overall;
  std::optional<FileProvenance> provenance;
  std::optional<Verdict> verdict;

  bool has_cosine() const { return !cosine.empty() || cosine_overall.has_value(); }
  bool has_parity() const { return !parity.empty(); }
  bool has_judge() const { return !judge.empty() || judge_overall.has_value(); }
};

/// Per-subcorpus summaries plus an Overall row computed from the pooled
/// values (never from the subcorpus means).
struct CosineTable {
  std::vector<CosineRow> rows;
  SimilaritySummary overall;
};
CosineTable cosine_table(const std::vector<std::pair<std::string, std::vector<double>>>& values);

enum class ReportFormat { markdown, csv };

struct Document {
  std::string name;  // <table>_<corpus>.<ext>
  std::string content;
};

/// One document per present table (prevalence, judge, cosine, cka, parity)
/// plus the verdict when set. Byte-stable for a given bundle.
/// Throws EmptyBundle when nothing is present.
std::vector<Document> render(const ReportBundle& bundle, ReportFormat format);

/// pass when mean cosine >= thresholds.cosine, every parity gap <=
/// thresholds.gap and judge clean% >= thresholds.clean; warn when one family
/// is breached; fail when two or more are. Families absent from the bundle
/// are not judged; a bundle with none of them yields warn.
Verdict verdict(const ReportBundle& bundle, const Thresholds& thresholds = {});

/// Writes each document into dir (created if needed).
void write_documents(const std::vector<Document>& docs, const std::filesystem::path& dir);

}  // namespace xfid
