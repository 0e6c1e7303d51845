#include "xfid/text_format.hpp"

#include <cmath>
#include <cstdlib>

#include <fmt/format.h>

namespace xfid {

std::string format_count(std::size_t n) {
  std::string digits = std::to_string(n);
  std::string out;
  const std::size_t lead = digits.size() % 3;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i != 0 && (i + 3 - lead) % 3 == 0) out.push_back(',');
    out.push_back(digits[i]);
  }
  return out;
}

std::string format_fixed(double value, int decimals) {
  if (!std::isfinite(value)) return "nan";
  const double scale = std::pow(10.0, decimals);
  const double magnitude = std::fabs(value) * scale;
  const double rounded = std::floor(magnitude * (1.0 + 1e-12) + 0.5);
  const double signed_rounded = (value < 0 && rounded != 0.0) ? -rounded : rounded;
  return fmt::format("{:.{}f}", signed_rounded / scale, decimals);
}

std::string format_signed(double value, int decimals) {
  std::string body = format_fixed(value, decimals);
  if (body.front() == '-') return body;
  return "+" + body;
}

std::int64_t percent_tenths(std::size_t part, std::size_t whole) {
  if (whole == 0) return 0;
  const auto p = static_cast<std::int64_t>(part);
  const auto w = static_cast<std::int64_t>(whole);
  // round(1000 p / w) half-up == floor((2000 p + w) / (2 w))
  return (2000 * p + w) / (2 * w);
}

std::string format_tenths(std::int64_t tenths) {
  const bool negative = tenths < 0;
  const std::int64_t mag = std::llabs(tenths);
  return fmt::format("{}{}.{}", negative ? "-" : "", mag / 10, mag % 10);
}

}  // namespace xfid
