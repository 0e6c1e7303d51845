#include "xfid/report.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>

#include "xfid/csv.hpp"
#include "xfid/error.hpp"
#include "xfid/text_format.hpp"

namespace xfid {

namespace {

constexpr std::string_view kDegenerateNote =
    "* zero variance across folds: the t statistic is undefined and p is reported as 0.5";

std::string threshold_label(double threshold) {
  std::string s = format_fixed(threshold, 2);
  if (s.starts_with("0.")) s.erase(0, 1);
  return s;
}

std::string file_name(std::string_view table, const std::string& corpus, ReportFormat format) {
  return fmt::format("{}_{}.{}", table, corpus.empty() ? "corpus" : corpus,
                     format == ReportFormat::markdown ? "md" : "csv");
}

/// Accumulates either a markdown table or CSV rows.
class Table {
 public:
  Table(ReportFormat format, std::vector<std::string> header, std::vector<bool> numeric)
      : format_(format), numeric_(std::move(numeric)) {
    add(std::move(header));
    if (format_ == ReportFormat::markdown) {
      std::string rule = "|";
      for (bool n : numeric_) rule += n ? "---:|" : "---|";
      out_ += rule + "\n";
    }
  }

  void add(std::vector<std::string> cells) {
    if (format_ == ReportFormat::csv) {
      out_ += csv::join_row(cells) + "\n";
      return;
    }
    out_ += "|";
    for (const auto& c : cells) out_ += " " + c + " |";
    out_ += "\n";
  }

  const std::string& str() const { return out_; }

 private:
  ReportFormat format_;
  std::vector<bool> numeric_;
  std::string out_;
};

std::string provenance_line(const ReportBundle& b, ReportFormat format) {
  if (!b.provenance) return {};
  if (format == ReportFormat::csv) {
    return fmt::format("# config_hash={} seed={}\n", b.provenance->config_hash, b.provenance->seed);
  }
  return fmt::format("\nconfig_hash `{}`, seed {}\n", b.provenance->config_hash, b.provenance->seed);
}

std::string wrap(const ReportBundle& b, ReportFormat format, std::string_view title,
                 const std::string& body, const std::string& notes = {}) {
  if (format == ReportFormat::csv) return provenance_line(b, format) + body;
  std::string out = fmt::format("# {}\n\n{}", title, body);
  if (!notes.empty()) out += "\n" + notes + "\n";
  return out + provenance_line(b, format);
}

Document prevalence_doc(const ReportBundle& b, ReportFormat f) {
  std::vector<std::string> header{"Subcorpus", "N"};
  for (Foundation fd : kFoundations) header.emplace_back(abbrev(fd));
  Table t(f, header, {false, true, true, true, true, true, true});
  for (const auto& row : b.prevalence) {
    std::vector<std::string> cells{row.subcorpus, f == ReportFormat::csv ? std::to_string(row.prevalence.n)
                                                                          : format_count(row.prevalence.n)};
    for (Foundation fd : kFoundations) cells.push_back(row.prevalence.display(fd));
    t.add(std::move(cells));
  }
  return {file_name("prevalence", b.corpus, f), wrap(b, f, "Foundation prevalence (% of total texts)", t.str())};
}

std::vector<std::string> cosine_cells(const std::string& label, const SimilaritySummary& s, ReportFormat f) {
  return {label, f == ReportFormat::csv ? std::to_string(s.n) : format_count(s.n), format_fixed(s.mean, 3),
          format_fixed(s.std, 3), format_fixed(s.p05, 3), format_fixed(s.p95, 3)};
}

Document cosine_doc(const ReportBundle& b, ReportFormat f) {
  Table t(f, {"Subcorpus", "N", "Mean", "Std", "P05", "P95"}, {false, true, true, true, true, true});
  for (const auto& row : b.cosine) t.add(cosine_cells(row.subcorpus, row.summary, f));
  if (b.cosine_overall) t.add(cosine_cells("Overall", *b.cosine_overall, f));
  return {file_name("cosine", b.corpus, f), wrap(b, f, "Cross-lingual cosine similarity", t.str())};
}

std::vector<std::string> cka_cells(const std::string& label, const CkaResult& r, ReportFormat f) {
  return {label, f == ReportFormat::csv ? std::to_string(r.n) : format_count(r.n), std::to_string(r.d_src),
          std::to_string(r.d_tgt), format_fixed(r.value, 3)};
}

Document cka_doc(const ReportBundle& b, ReportFormat f) {
  Table t(f, {"Subcorpus", "N", "d_src", "d_tgt", "CKA"}, {false, true, true, true, true});
  for (const auto& row : b.cka) t.add(cka_cells(row.subcorpus, row.result, f));
  if (b.cka_overall) t.add(cka_cells("Overall", *b.cka_overall, f));
  return {file_name("cka", b.corpus, f), wrap(b, f, "Linear CKA", t.str())};
}

Document parity_doc(const ReportBundle& b, ReportFormat f) {
  bool any_degenerate = false;
  if (f == ReportFormat::csv) {
    Table t(f,
            {"subcorpus", "foundation", "en_auc", "pl_auc", "gap", "p_gt0", "p_lt_thresh", "threshold",
             "degenerate"},
            {});
    for (const auto& section : b.parity) {
      for (const auto& r : section.rows) {
        t.add({section.subcorpus, std::string(display_name(r.foundation)), format_fixed(r.en_auc, 3),
               format_fixed(r.pl_auc, 3), format_signed(r.gap, 3), format_fixed(r.p_gt0, 3),
               format_fixed(r.p_lt_thresh, 3), format_fixed(r.threshold, 2), r.degenerate ? "1" : "0"});
      }
    }
    return {file_name("parity", b.corpus, f), wrap(b, f, "", t.str())};
  }

  std::string body;
  for (const auto& section : b.parity) {
    std::string thr = section.rows.empty() ? ".02" : threshold_label(section.rows.front().threshold);
    Table t(f, {"Foundation", "EN AUC", "PL AUC", "Gap", "p>0", "p<" + thr},
            {false, true, true, true, true, true});
    for (const auto& r : section.rows) {
      const std::string mark = r.degenerate ? "*" : "";
      any_degenerate = any_degenerate || r.degenerate;
      t.add({std::string(display_name(r.foundation)), format_fixed(r.en_auc, 3), format_fixed(r.pl_auc, 3),
             format_signed(r.gap, 3), format_fixed(r.p_gt0, 3) + mark, format_fixed(r.p_lt_thresh, 3) + mark});
    }
    if (!body.empty()) body += "\n";
    body += fmt::format("## {}\n\n{}", section.subcorpus, t.str());
  }
  return {file_name("parity", b.corpus, f),
          wrap(b, f, "Classifier parity (EN vs PL)", body, any_degenerate ? std::string(kDegenerateNote) : "")};
}

std::vector<std::string> judge_cells(const JudgeAudit& a, ReportFormat f) {
  return {a.subcorpus, f == ReportFormat::csv ? std::to_string(a.n) : format_count(a.n),
          format_tenths(a.clean_tenths()), format_tenths(a.minor_tenths()), format_tenths(a.error_tenths()),
          format_fixed(a.mean_score, 1)};
}

Document judge_doc(const ReportBundle& b, ReportFormat f) {
  Table t(f, {"Subcorpus", "N", "Clean %", "Minor %", "Error %", "Mean score"},
          {false, true, true, true, true, true});
  for (const auto& a : b.judge) t.add(judge_cells(a, f));
  if (b.judge_overall) t.add(judge_cells(*b.judge_overall, f));
  return {file_name("judge", b.corpus, f), wrap(b, f, "Translation audit (LLM judge)", t.str())};
}

Document verdict_doc(const ReportBundle& b, ReportFormat f) {
  const Verdict& v = *b.verdict;
  const Thresholds& th = v.thresholds;
  struct Check {
    std::string metric;
    std::string value;
    std::string threshold;
    std::string status;
  };
  std::vector<Check> checks;
  if (v.mean_cosine) {
    checks.push_back({"mean cosine", format_fixed(*v.mean_cosine, 3), ">= " + format_fixed(th.cosine, 2),
                      *v.mean_cosine >= th.cosine ? "ok" : "breach"});
  }
  if (v.max_gap) {
    checks.push_back({"max parity gap", format_signed(*v.max_gap, 3), "<= " + format_fixed(th.gap, 2),
                      *v.max_gap <= th.gap ? "ok" : "breach"});
  }
  if (v.clean_pct) {
    checks.push_back({"judge clean %", format_fixed(*v.clean_pct, 1), ">= " + format_fixed(th.clean, 1),
                      *v.clean_pct >= th.clean ? "ok" : "breach"});
  }

  if (f == ReportFormat::csv) {
    Table t(f, {"metric", "value", "threshold", "status"}, {});
    for (const auto& c : checks) t.add({c.metric, c.value, c.threshold, c.status});
    t.add({"verdict", std::string(name(v.level)), "", ""});
    return {file_name("verdict", b.corpus, f), wrap(b, f, "", t.str())};
  }
  Table t(f, {"Metric", "Value", "Threshold", "Status"}, {false, true, false, false});
  for (const auto& c : checks) t.add({c.metric, c.value, c.threshold, c.status});
  std::string body = fmt::format("**{}**\n\n{}", name(v.level), t.str());
  if (!v.reasons.empty()) {
    body += "\n";
    for (const auto& r : v.reasons) body += "- " + r + "\n";
  }
  return {file_name("verdict", b.corpus, f), wrap(b, f, "Translation quality verdict", body)};
}

}  // namespace

std::string_view name(VerdictLevel level) {
  switch (level) {
    case VerdictLevel::pass: return "pass";
    case VerdictLevel::warn: return "warn";
    case VerdictLevel::fail: return "fail";
  }
  return "warn";
}

CosineTable cosine_table(const std::vector<std::pair<std::string, std::vector<double>>>& values) {
  CosineTable table;
  std::vector<double> pooled;
  for (const auto& [sub, v] : values) {
    table.rows.push_back({sub, summarize(v)});
    pooled.insert(pooled.end(), v.begin(), v.end());
  }
  table.overall = summarize(pooled);
  return table;
}

std::vector<Document> render(const ReportBundle& b, ReportFormat format) {
  std::vector<Document> docs;
  if (!b.prevalence.empty()) docs.push_back(prevalence_doc(b, format));
  if (b.has_judge()) docs.push_back(judge_doc(b, format));
  if (b.has_cosine()) docs.push_back(cosine_doc(b, format));
  if (!b.cka.empty() || b.cka_overall) docs.push_back(cka_doc(b, format));
  if (b.has_parity()) docs.push_back(parity_doc(b, format));
  if (b.verdict) docs.push_back(verdict_doc(b, format));
  if (docs.empty()) throw Error(ErrorCode::EmptyBundle, "report bundle has no tables");
  return docs;
}

Verdict verdict(const ReportBundle& b, const Thresholds& th) {
  Verdict v;
  v.thresholds = th;

  if (b.cosine_overall) {
    v.mean_cosine = b.cosine_overall->mean;
  } else if (!b.cosine.empty()) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& row : b.cosine) {
      sum += row.summary.mean * static_cast<double>(row.summary.n);
      n += row.summary.n;
    }
    if (n > 0) v.mean_cosine = sum / static_cast<double>(n);
  }
  for (const auto& section : b.parity) {
    for (const auto& r : section.rows) v.max_gap = std::max(v.max_gap.value_or(r.gap), r.gap);
  }
  if (b.judge_overall) {
    v.clean_pct = 100.0 * static_cast<double>(b.judge_overall->clean) / static_cast<double>(b.judge_overall->n);
  } else if (!b.judge.empty()) {
    std::size_t clean = 0;
    std::size_t n = 0;
    for (const auto& a : b.judge) {
      clean += a.clean;
      n += a.n;
    }
    if (n > 0) v.clean_pct = 100.0 * static_cast<double>(clean) / static_cast<double>(n);
  }

  if (v.mean_cosine && *v.mean_cosine < th.cosine) {
    v.reasons.push_back("cosine below " + format_fixed(th.cosine, 2));
  }
  if (v.max_gap && *v.max_gap > th.gap) {
    v.reasons.push_back("parity gap above " + format_fixed(th.gap, 2));
  }
  if (v.clean_pct && *v.clean_pct < th.clean) {
    v.reasons.push_back("judge clean below " + format_fixed(th.clean, 1) + "%");
  }

  if (!v.mean_cosine && !v.max_gap && !v.clean_pct) {
    v.level = VerdictLevel::warn;
    v.reasons.push_back("no metric family present");
  } else if (v.reasons.empty()) {
    v.level = VerdictLevel::pass;
  } else {
    v.level = v.reasons.size() == 1 ? VerdictLevel::warn : VerdictLevel::fail;
  }
  return v;
}

void write_documents(const std::vector<Document>& docs, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& d : docs) {
    std::ofstream out(dir / d.name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + (dir / d.name).string());
    out << d.content;
    if (!out) throw Error(ErrorCode::Io, "write failed for " + (dir / d.name).string());
  }
}

}  // namespace xfid
