#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace lsym {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Parses a decimal literal ("12", "0.25", "1e-3", "2.5E+2") exactly.
// Returns false on malformed input.
bool parse_decimal(std::string_view text, Rational& out);

std::string to_string(const Rational& r);
double to_double(const Rational& r);

inline bool is_integer(const Rational& r) {
  return boost::multiprecision::denominator(r) == 1;
}

// Exact integer power; exponent may be negative (base must then be nonzero).
Rational rational_pow(const Rational& base, long exponent);

// Shortest decimal text that round-trips `value`, parsed exactly.
Rational rational_from_double(double value);

}  // namespace lsym
