#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "xfid/embedding.hpp"

namespace xfid {

/// N / mean / sample std / P05 / P95 of a list of per-pair values.
struct SimilaritySummary {
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;  // n-1 denominator; 0 when n == 1
  double p05 = 0.0;
  double p95 = 0.0;
};

struct CkaResult {
  double value = 0.0;
  std::size_t n = 0;
  std::size_t d_src = 0;
  std::size_t d_tgt = 0;
};

/// Cosine of each aligned row pair, accumulated in double.
/// Throws MisalignedIds, DimensionMismatch or ZeroRow.
std::vector<double> pairwise_cosine(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt);

/// Percentile at quantile q in [0, 1] by linear interpolation between order
/// statistics at rank q*(n-1). `sorted` must be ascending and non-empty.
double percentile_sorted(std::span<const double> sorted, double q);

/// Throws EmptyInput.
SimilaritySummary summarize(std::span<const double> values);

/// Linear CKA in feature-space form on column-centred matrices:
///   ||Y^T X||_F^2 / (||X^T X||_F * ||Y^T Y||_F)
/// O(n * d^2), so it scales to tens of thousands of rows. Dimensions may
/// differ between src and tgt.
/// Throws MisalignedIds or DegenerateInput (n < 2, or a centred matrix is all
/// zeros).
CkaResult linear_cka(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt);

}  // namespace xfid
