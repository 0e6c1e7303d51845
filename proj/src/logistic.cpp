#include "xfid/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "xfid/error.hpp"

namespace xfid {

namespace {

// log(1 + e^z) without overflow.
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::fabs(z))); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double objective_from_margins(const Eigen::VectorXd& z, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& w, double l2_lambda) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) total += softplus(z[i]) - y[i] * z[i];
  return total / static_cast<double>(z.size()) + 0.5 * l2_lambda * w.squaredNorm();
}

Eigen::VectorXd as_vector(const std::vector<bool>& y) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) v[i] = y[i] ? 1.0 : 0.0;
  return v;
}

}  // namespace

Eigen::VectorXd LogisticHead::decision(const Eigen::MatrixXd& x) const {
  return (x * weights).array() + bias;
}

double LogisticHead::probability(std::span<const double> x) const {
  double z = bias;
  for (std::size_t i = 0; i < x.size(); ++i) z += weights[static_cast<Eigen::Index>(i)] * x[i];
  return sigmoid(z);
}

LogisticObjective logistic_objective(const Eigen::MatrixXd& x, const std::vector<bool>& y,
                                     const Eigen::VectorXd& w, double b, double l2_lambda) {
  const Eigen::VectorXd yv = as_vector(y);
  const Eigen::VectorXd z = (x * w).array() + b;
  Eigen::VectorXd residual(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) residual[i] = sigmoid(z[i]) - yv[i];
  const double n = static_cast<double>(x.rows());

  LogisticObjective out;
  out.loss = objective_from_margins(z, yv, w, l2_lambda);
  out.grad_w = x.transpose() * residual / n + l2_lambda * w;
  out.grad_b = residual.sum() / n;
  return out;
}

LogisticHead train_logistic(const Eigen::MatrixXd& x, const std::vector<bool>& y,
                            const LogisticOptions& options) {
  if (x.rows() == 0) throw Error(ErrorCode::EmptyInput, "no training rows");
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw Error(ErrorCode::DimensionMismatch, "feature rows and labels differ in length");
  }
  const auto positives = std::count(y.begin(), y.end(), true);
  if (positives == 0 || positives == static_cast<long>(y.size())) {
    throw Error(ErrorCode::SingleClass, "training labels contain one class");
  }

  constexpr double kArmijo = 1e-4;
  constexpr double kMinStep = 1e-20;
  constexpr double kMaxStep = 1e6;

  const Eigen::VectorXd yv = as_vector(y);
  const double n = static_cast<double>(x.rows());

  LogisticHead head;
  head.l2_lambda = options.l2_lambda;
  head.weights = Eigen::VectorXd::Zero(x.cols());
  head.bias = 0.0;

  Eigen::VectorXd z = Eigen::VectorXd::Zero(x.rows());
  double loss = objective_from_margins(z, yv, head.weights, options.l2_lambda);
  if (!std::isfinite(loss)) throw Error(ErrorCode::Diverged, "non-finite initial loss");
  head.loss_trace.push_back(loss);

  Eigen::VectorXd residual(x.rows());
  Eigen::VectorXd z_trial(x.rows());
  double step = 1.0;

  for (int iter = 0; iter < options.max_iters; ++iter) {
    for (Eigen::Index i = 0; i < z.size(); ++i) residual[i] = sigmoid(z[i]) - yv[i];
    const Eigen::VectorXd grad_w = x.transpose() * residual / n + options.l2_lambda * head.weights;
    const double grad_b = residual.sum() / n;

    const double grad_inf = std::max(grad_w.lpNorm<Eigen::Infinity>(), std::fabs(grad_b));
    if (grad_inf < options.tol) {
      head.converged = true;
      break;
    }
    const double grad_sq = grad_w.squaredNorm() + grad_b * grad_b;
    // Margins move along x.grad_w + grad_b, so each trial step costs O(n).
    const Eigen::VectorXd direction = (x * grad_w).array() + grad_b;

    step = std::min(step * 2.0, kMaxStep);
    bool accepted = false;
    double trial_loss = loss;
    while (step >= kMinStep) {
      z_trial = z - step * direction;
      trial_loss = objective_from_margins(z_trial, yv, head.weights - step * grad_w,
                                          options.l2_lambda);
      if (std::isfinite(trial_loss) && trial_loss <= loss - kArmijo * step * grad_sq) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no representable decrease left

    head.weights -= step * grad_w;
    head.bias -= step * grad_b;
    z.swap(z_trial);
    loss = trial_loss;
    head.loss_trace.push_back(loss);
    ++head.iterations;
  }

  if (!head.weights.allFinite() || !std::isfinite(head.bias)) {
    throw Error(ErrorCode::Diverged, "non-finite parameters after training");
  }
  return head;
}

Eigen::MatrixXd design_matrix(const EmbeddingMatrix& m, std::span<const std::size_t> rows) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(m.dim()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto src = m.row(rows[r]);
    for (std::size_t c = 0; c < m.dim(); ++c) x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = src[c];
  }
  return x;
}

Eigen::MatrixXd design_matrix(const EmbeddingMatrix& m) {
  std::vector<std::size_t> rows(m.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return design_matrix(m, rows);
}

}  // namespace xfid
