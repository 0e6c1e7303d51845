#include "xfid/parity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>

#include "xfid/auc.hpp"
#include "xfid/csv.hpp"
#include "xfid/error.hpp"
#include "xfid/folds.hpp"
#include "xfid/rng.hpp"
#include "xfid/ttest.hpp"

namespace xfid {

namespace {

std::vector<bool> pick(const std::vector<bool>& labels, const std::vector<std::size_t>& rows) {
  std::vector<bool> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(labels[r]);
  return out;
}

bool has_both_classes(const std::vector<bool>& y) {
  const auto pos = std::count(y.begin(), y.end(), true);
  return pos > 0 && pos < static_cast<long>(y.size());
}

double held_out_auc(const EmbeddingMatrix& m, const std::vector<std::size_t>& train,
                    const std::vector<std::size_t>& test, const std::vector<bool>& y_train,
                    const std::vector<bool>& y_test, const LogisticOptions& options) {
  const LogisticHead head = train_logistic(design_matrix(m, train), y_train, options);
  const Eigen::VectorXd scores = head.decision(design_matrix(m, test));
  return roc_auc(std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())),
                 y_test);
}

}  // namespace

FoundationLabels labels_for(const CorpusSlice& slice, const EmbeddingMatrix& m) {
  std::unordered_map<std::string_view, const Post*> by_id;
  for (const Post& p : slice.posts) by_id.emplace(p.id, &p);
  FoundationLabels out;
  for (Foundation f : kFoundations) out[f].reserve(m.rows());
  for (const auto& id : m.ids()) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw Error(ErrorCode::MisalignedIds, "embedding id " + id + " not in corpus");
    for (Foundation f : kFoundations) out[f].push_back(it->second->label(f));
  }
  return out;
}

ParityRow parity_from_folds(Foundation foundation, std::vector<FoldAuc> per_fold,
                            double threshold) {
  ParityRow row;
  row.foundation = foundation;
  row.threshold = threshold;
  row.per_fold = std::move(per_fold);
  const double k = static_cast<double>(row.per_fold.size());

  std::vector<double> diffs;
  diffs.reserve(row.per_fold.size());
  for (const FoldAuc& f : row.per_fold) {
    row.en_auc += f.en;
    row.pl_auc += f.pl;
    diffs.push_back(f.en - f.pl);
  }
  row.en_auc /= k;
  row.pl_auc /= k;
  double sum = 0.0;
  for (double d : diffs) sum += d;
  row.gap = sum / k;

  try {
    row.p_gt0 = paired_t_onesided(diffs, 0.0, Alternative::greater).p_value;
    row.p_lt_thresh = paired_t_onesided(diffs, threshold, Alternative::less).p_value;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ZeroVariance) throw;
    row.p_gt0 = 0.5;
    row.p_lt_thresh = 0.5;
    row.degenerate = true;
  }
  return row;
}

std::vector<ParityRow> run_parity(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt,
                                  const FoundationLabels& labels, const ParityOptions& options) {
  if (src.ids() != tgt.ids()) {
    throw Error(ErrorCode::MisalignedIds, "source and target embeddings are not row-aligned");
  }
  std::vector<ParityRow> rows;
  for (const auto& [foundation, y] : labels) {
    if (y.size() != src.rows()) {
      throw Error(ErrorCode::DimensionMismatch,
                  std::string(name(foundation)) + ": " + std::to_string(y.size()) +
                      " labels for " + std::to_string(src.rows()) + " rows");
    }
    const FoldAssignment folds =
        stratified_kfold(y, options.k, mix_seed(options.seed, index_of(foundation)));

    std::vector<FoldAuc> per_fold;
    for (int fold = 0; fold < options.k; ++fold) {
      const auto train = folds.train_rows(fold);
      const auto test = folds.test_rows(fold);
      const auto y_train = pick(y, train);
      const auto y_test = pick(y, test);
      if (!has_both_classes(y_train) || !has_both_classes(y_test)) {
        throw Error(ErrorCode::FoldClassCollapse,
                    std::string(name(foundation)) + " fold " + std::to_string(fold));
      }
      FoldAuc auc;
      auc.en = held_out_auc(src, train, test, y_train, y_test, options.logistic);
      auc.pl = held_out_auc(tgt, train, test, y_train, y_test, options.logistic);
      per_fold.push_back(auc);
    }
    rows.push_back(parity_from_folds(foundation, std::move(per_fold), options.threshold));
  }
  return rows;
}

std::vector<ExternalFoldMetrics> read_external_folds(std::istream& in, int k) {
  csv::Reader reader(in);
  auto header = reader.next();
  const std::vector<std::string> expected{"foundation", "fold", "en_auc", "pl_auc"};
  if (!header || header->fields != expected) {
    throw Error(ErrorCode::MalformedRecord, "header must be foundation,fold,en_auc,pl_auc");
  }

  struct Entry {
    long fold;
    FoldAuc auc;
  };
  std::map<Foundation, std::vector<Entry>> grouped;
  auto number = [](const std::string& text, std::size_t line, const char* what) {
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      throw Error(ErrorCode::MalformedRecord,
                  "line " + std::to_string(line) + ": bad " + what + " '" + text + "'");
    }
  };
  while (auto rec = reader.next()) {
    if (rec->fields.size() != 4) {
      throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(rec->line) + ": expected 4 fields");
    }
    auto f = parse_foundation(rec->fields[0]);
    if (!f) {
      throw Error(ErrorCode::MalformedRecord,
                  "line " + std::to_string(rec->line) + ": unknown foundation " + rec->fields[0]);
    }
    const double fold = number(rec->fields[1], rec->line, "fold");
    if (fold != std::floor(fold) || fold < 0) {
      throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(rec->line) + ": bad fold");
    }
    FoldAuc auc{number(rec->fields[2], rec->line, "en_auc"), number(rec->fields[3], rec->line, "pl_auc")};
    if (auc.en < 0 || auc.en > 1 || auc.pl < 0 || auc.pl > 1) {
      throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(rec->line) + ": AUC outside [0,1]");
    }
    grouped[*f].push_back({static_cast<long>(fold), auc});
  }

  std::vector<ExternalFoldMetrics> out;
  for (auto& [foundation, entries] : grouped) {
    // 1-based when no fold 0 is present
    const bool has_zero = std::any_of(entries.begin(), entries.end(),
                                      [](const Entry& e) { return e.fold == 0; });
    const long base = has_zero ? 0 : 1;

    std::vector<std::optional<FoldAuc>> slots(static_cast<std::size_t>(k));
    for (const Entry& e : entries) {
      const long idx = e.fold - base;
      if (idx < 0 || idx >= k) {
        throw Error(ErrorCode::MalformedRecord, std::string(name(foundation)) + ": fold " +
                                                    std::to_string(e.fold) + " outside 1.." +
                                                    std::to_string(k));
      }
      if (slots[idx]) {
        throw Error(ErrorCode::MalformedRecord,
                    std::string(name(foundation)) + ": fold " + std::to_string(e.fold) + " repeated");
      }
      slots[idx] = e.auc;
    }
    ExternalFoldMetrics metrics;
    metrics.foundation = foundation;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (!slots[i]) {
        throw Error(ErrorCode::MissingFolds, std::string(name(foundation)) + ": fold " +
                                                 std::to_string(static_cast<long>(i) + base) +
                                                 " absent");
      }
      metrics.per_fold.push_back(*slots[i]);
    }
    out.push_back(std::move(metrics));
  }
  return out;
}

std::vector<ExternalFoldMetrics> import_external_folds(const std::filesystem::path& path, int k) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return read_external_folds(in, k);
}

}  // namespace xfid
