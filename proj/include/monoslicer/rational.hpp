#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace monoslicer {

/// Exact rational used for every metric quotient. Decimal text is produced
/// only at report boundaries.
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  return Rational(num, den);
}

/// Round-half-up (toward +infinity on exact halves) to `places` decimals.
/// 7/27 -> "0.26", 1/8 -> "0.13", 25 -> "25.00".
std::string to_fixed(const Rational& value, int places = 2);

/// Canonical exact text: "3" or "7/27" (always lowest terms).
std::string to_exact(const Rational& value);

/// Accepts "1000", "2.5", "-0.125", "7/27". Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

bool is_integer(const Rational& value);

}  // namespace monoslicer
