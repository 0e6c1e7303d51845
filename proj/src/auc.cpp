#include "xfid/auc.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "xfid/error.hpp"

namespace xfid {

double roc_auc(std::span<const double> scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(scores.size()) + " scores for " +
                                                  std::to_string(labels.size()) + " labels");
  }
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    // 1-based ranks i+1 .. j share the midrank
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]]) {
        positive_rank_sum += midrank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) {
    throw Error(ErrorCode::SingleClass, "AUC needs both classes");
  }
  const double m = static_cast<double>(positives);
  return (positive_rank_sum - m * (m + 1.0) / 2.0) / (m * static_cast<double>(negatives));
}

}  // namespace xfid
