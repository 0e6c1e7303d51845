#include "xfid/folds.hpp"

#include <string>

#include "xfid/error.hpp"
#include "xfid/rng.hpp"

namespace xfid {

std::vector<std::size_t> FoldAssignment::test_rows(int fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == fold) rows.push_back(i);
  }
  return rows;
}

std::vector<std::size_t> FoldAssignment::train_rows(int fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] != fold) rows.push_back(i);
  }
  return rows;
}

FoldAssignment stratified_kfold(const std::vector<bool>& labels, int k, std::uint64_t seed) {
  if (k < 2 || static_cast<std::size_t>(k) > labels.size()) {
    throw Error(ErrorCode::TooFewSamples, "k=" + std::to_string(k) + " with " +
                                              std::to_string(labels.size()) + " samples");
  }
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty()) {
    throw Error(ErrorCode::SingleClass, pos.empty() ? "no positive labels" : "no negative labels");
  }

  FoldAssignment out;
  out.k = k;
  out.fold_of.assign(labels.size(), -1);
  const auto pos_order = seeded_permutation(pos.size(), mix_seed(seed, 1));
  const auto neg_order = seeded_permutation(neg.size(), mix_seed(seed, 2));
  for (std::size_t i = 0; i < pos.size(); ++i) {
    out.fold_of[pos[pos_order[i]]] = static_cast<int>(i % k);
  }
  const std::size_t offset = pos.size() % k;
  for (std::size_t i = 0; i < neg.size(); ++i) {
    out.fold_of[neg[neg_order[i]]] = static_cast<int>((offset + i) % k);
  }
  return out;
}

}  // namespace xfid
