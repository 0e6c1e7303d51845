#pragma once

#include <span>
#include <vector>

namespace xfid {

/// ROC-AUC in Mann-Whitney rank form with midranks for ties:
///   (sum of positive ranks - m(m+1)/2) / (m * n_neg)
/// so a tied positive/negative pair contributes one half.
/// Throws DimensionMismatch or SingleClass.
double roc_auc(std::span<const double> scores, const std::vector<bool>& labels);

}  // namespace xfid
