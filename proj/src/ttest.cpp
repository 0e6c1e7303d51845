#include "xfid/ttest.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "xfid/error.hpp"

namespace xfid {

namespace {

// Continued fraction for I_x(a, b), modified Lentz. Valid (fast) for
// x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return h;
}

// I_x(a, b) given both x and y = 1 - x, so callers can pass a complement
// computed without cancellation.
double incomplete_beta(double a, double b, double x, double y) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log(y);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, y) / b;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
  return incomplete_beta(a, b, x, 1.0 - x);
}

double student_t_cdf(double t, int df) {
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double nu = static_cast<double>(df);
  const double t2 = t * t;
  const double x = nu / (nu + t2);
  const double y = t2 / (nu + t2);
  const double tail = 0.5 * incomplete_beta(0.5 * nu, 0.5, x, y);  // P(T > |t|)
  return t > 0 ? 1.0 - tail : tail;
}

TTestResult paired_t_onesided(std::span<const double> diffs, double mu0, Alternative direction) {
  const std::size_t n = diffs.size();
  if (n < 2) throw Error(ErrorCode::TooFewSamples, "paired t-test needs at least 2 differences");
  const double mean = std::accumulate(diffs.begin(), diffs.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double d : diffs) ss += (d - mean) * (d - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw Error(ErrorCode::ZeroVariance, "all differences are equal");

  TTestResult out;
  out.df = static_cast<int>(n - 1);
  out.mu0 = mu0;
  out.direction = direction;
  out.t_stat = (mean - mu0) / (sd / std::sqrt(static_cast<double>(n)));
  const double cdf = student_t_cdf(out.t_stat, out.df);
  out.p_value = direction == Alternative::greater ? 1.0 - cdf : cdf;
  return out;
}

}  // namespace xfid
