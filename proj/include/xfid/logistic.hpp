#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "xfid/embedding.hpp"

namespace xfid {

struct LogisticOptions {
  double l2_lambda = 1e-4;
  int max_iters = 500;
  double tol = 1e-6;
};

/// Linear head on frozen features: p(y=1 | x) = sigmoid(w.x + b).
struct LogisticHead {
  Eigen::VectorXd weights;
  double bias = 0.0;
  double l2_lambda = 0.0;
  int iterations = 0;      // accepted descent steps
  bool converged = false;  // gradient inf-norm fell below tol
  std::vector<double> loss_trace;  // objective at start and after each accepted step

  /// w.x + b for each row of x.
  Eigen::VectorXd decision(const Eigen::MatrixXd& x) const;
  double probability(std::span<const double> x) const;
};

/// Mean logistic loss plus (l2_lambda / 2) * ||w||^2 (bias unpenalized) and
/// its gradient.
struct LogisticObjective {
  double loss = 0.0;
  Eigen::VectorXd grad_w;
  double grad_b = 0.0;
};

LogisticObjective logistic_objective(const Eigen::MatrixXd& x, const std::vector<bool>& y,
                                     const Eigen::VectorXd& w, double b, double l2_lambda);

/// Full-batch gradient descent with Armijo backtracking from w = 0, b = 0.
/// Each iteration first tries twice the previous step, then halves until the
/// sufficient-decrease condition holds, so the recorded loss never increases.
/// Throws SingleClass, EmptyInput or Diverged (non-finite objective).
LogisticHead train_logistic(const Eigen::MatrixXd& x, const std::vector<bool>& y,
                            const LogisticOptions& options = {});

/// Rows of an embedding matrix as a double design matrix.
Eigen::MatrixXd design_matrix(const EmbeddingMatrix& m, std::span<const std::size_t> rows);
Eigen::MatrixXd design_matrix(const EmbeddingMatrix& m);

}  // namespace xfid
