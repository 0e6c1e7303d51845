#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "xfid/corpus.hpp"
#include "xfid/embedding.hpp"
#include "xfid/logistic.hpp"

namespace xfid {

struct ParityOptions {
  int k = 10;
  std::uint64_t seed = 0;
  LogisticOptions logistic;
  double threshold = 0.02;
};

/// Held-out AUC of the source-language and target-language heads on one fold.
struct FoldAuc {
  double en = 0.0;
  double pl = 0.0;
  bool operator==(const FoldAuc&) const = default;
};

/// One foundation's parity result. en_auc / pl_auc are means over folds and
/// gap is the mean of per-fold (en - pl). When every fold difference is equal
/// the t statistic is undefined: both p-values are then 0.5 and `degenerate`
/// is set.
struct ParityRow {
  Foundation foundation = Foundation::care;
  double en_auc = 0.0;
  double pl_auc = 0.0;
  double gap = 0.0;
  double p_gt0 = 0.5;
  double p_lt_thresh = 0.5;
  double threshold = 0.02;
  bool degenerate = false;
  std::vector<FoldAuc> per_fold;
};

using FoundationLabels = std::map<Foundation, std::vector<bool>>;

/// Per-foundation labels aligned to the rows of `m` via post ids.
/// Throws MisalignedIds when a row id is absent from the slice.
FoundationLabels labels_for(const CorpusSlice& slice, const EmbeddingMatrix& m);

/// Applies both one-sided tests to stored per-fold AUCs.
ParityRow parity_from_folds(Foundation foundation, std::vector<FoldAuc> per_fold,
                            double threshold);

/// Classifier parity: for each foundation, one stratified fold assignment
/// shared by both languages; per fold, identical heads are trained on the
/// source and target embeddings and scored on the held-out rows.
/// Throws MisalignedIds, FoldClassCollapse (a training split or held-out fold
/// lacks a class) and the component errors.
std::vector<ParityRow> run_parity(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt,
                                  const FoundationLabels& labels, const ParityOptions& options);

/// Per-fold metrics produced outside this toolkit (e.g. a fine-tuned model).
struct ExternalFoldMetrics {
  Foundation foundation = Foundation::care;
  std::vector<FoldAuc> per_fold;  // indexed by fold
};

/// Reads a CSV with header foundation,fold,en_auc,pl_auc. Fold numbers may be
/// 0-based or 1-based; every foundation must list all k folds exactly once.
/// Throws MalformedRecord or MissingFolds.
std::vector<ExternalFoldMetrics> import_external_folds(const std::filesystem::path& path, int k = 10);
std::vector<ExternalFoldMetrics> read_external_folds(std::istream& in, int k = 10);

}  // namespace xfid
