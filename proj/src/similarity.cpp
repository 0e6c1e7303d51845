#include "xfid/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "xfid/error.hpp"

namespace xfid {

namespace {

void require_aligned(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt) {
  if (src.ids() != tgt.ids()) {
    throw Error(ErrorCode::MisalignedIds,
                "source has " + std::to_string(src.rows()) + " rows, target " +
                    std::to_string(tgt.rows()) + "; ids must match in order");
  }
}

Eigen::MatrixXd centered(const EmbeddingMatrix& m) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.dim()));
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (std::size_t c = 0; c < m.dim(); ++c) x(r, c) = row[c];
  }
  x.rowwise() -= x.colwise().mean();
  return x;
}

}  // namespace

std::vector<double> pairwise_cosine(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt) {
  require_aligned(src, tgt);
  if (src.dim() != tgt.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(src.dim()) + " vs " + std::to_string(tgt.dim()));
  }
  std::vector<double> out(src.rows());
  for (std::size_t r = 0; r < src.rows(); ++r) {
    auto a = src.row(r);
    auto b = tgt.row(r);
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
      dot += static_cast<double>(a[c]) * b[c];
      na += static_cast<double>(a[c]) * a[c];
      nb += static_cast<double>(b[c]) * b[c];
    }
    if (na == 0.0 || nb == 0.0) {
      throw Error(ErrorCode::ZeroRow, "row " + std::to_string(r) + " (" + src.ids()[r] + ")");
    }
    out[r] = std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
  }
  return out;
}

double percentile_sorted(std::span<const double> sorted, double q) {
  const double rank = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

SimilaritySummary summarize(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "summarize of empty list");
  SimilaritySummary s;
  s.n = values.size();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  s.p05 = percentile_sorted(sorted, 0.05);
  s.p95 = percentile_sorted(sorted, 0.95);
  return s;
}

CkaResult linear_cka(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt) {
  require_aligned(src, tgt);
  if (src.rows() < 2) throw Error(ErrorCode::DegenerateInput, "CKA needs at least 2 rows");

  const Eigen::MatrixXd x = centered(src);
  const Eigen::MatrixXd y = centered(tgt);
  if (x.isZero(0.0)) throw Error(ErrorCode::DegenerateInput, "centred source matrix is zero");
  if (y.isZero(0.0)) throw Error(ErrorCode::DegenerateInput, "centred target matrix is zero");

  const Eigen::MatrixXd cross = y.transpose() * x;
  const Eigen::MatrixXd xx = x.transpose() * x;
  const Eigen::MatrixXd yy = y.transpose() * y;

  CkaResult out;
  out.n = src.rows();
  out.d_src = src.dim();
  out.d_tgt = tgt.dim();
  out.value = cross.squaredNorm() / (xx.norm() * yy.norm());
  return out;
}

}  // namespace xfid
