#pragma once

#include <span>

namespace xfid {

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

/// P(T <= t) for Student's t with df degrees of freedom, via
/// I_{df/(df+t^2)}(df/2, 1/2). Absolute error well below 1e-10.
double student_t_cdf(double t, int df);

enum class Alternative { greater, less };

struct TTestResult {
  double t_stat = 0.0;
  int df = 0;
  double p_value = 0.0;
  double mu0 = 0.0;
  Alternative direction = Alternative::greater;
};

/// One-sided one-sample t-test on paired differences:
///   t = (mean - mu0) / (s / sqrt(n)), df = n - 1
///   greater: p = 1 - cdf(t); less: p = cdf(t)
/// Throws TooFewSamples (n < 2) or ZeroVariance.
TTestResult paired_t_onesided(std::span<const double> diffs, double mu0, Alternative direction);

}  // namespace xfid
