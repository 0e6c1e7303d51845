#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace xfid {

/// Fold index per sample (row order of the labels it was built from).
struct FoldAssignment {
  int k = 0;
  std::vector<int> fold_of;

  std::vector<std::size_t> test_rows(int fold) const;
  std::vector<std::size_t> train_rows(int fold) const;

  bool operator==(const FoldAssignment&) const = default;
};

/// Stratified k-fold split. Positives and negatives are each shuffled with a
/// seeded permutation and dealt round-robin, negatives continuing where the
/// positives stopped so fold sizes also stay within 1 of each other.
/// Deterministic in (labels, k, seed).
/// Throws TooFewSamples (k < 2 or k > n) or SingleClass.
FoldAssignment stratified_kfold(const std::vector<bool>& labels, int k, std::uint64_t seed);

}  // namespace xfid
