#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

// Number formatting shared by every table renderer. Precision follows the
// published tables: three decimals for cosine/CKA/AUC/p-values, one decimal
// for percentages and judge scores.

namespace xfid {

/// 51744 -> "51,744".
std::string format_count(std::size_t n);

/// Fixed-point with half-up rounding of the decimal value. A relative
/// tolerance absorbs binary representation error so 0.0125 -> "0.013".
std::string format_fixed(double value, int decimals);

/// Like format_fixed but always carries a sign: "+0.011", "-0.004", "+0.000".
std::string format_signed(double value, int decimals);

/// Exact half-up rounding of 100 * part / whole to one decimal, computed in
/// integer arithmetic. Returns tenths of a percent (e.g. 930 for 93.0%).
std::int64_t percent_tenths(std::size_t part, std::size_t whole);

/// Renders tenths produced by percent_tenths: 930 -> "93.0".
std::string format_tenths(std::int64_t tenths);

}  // namespace xfid
