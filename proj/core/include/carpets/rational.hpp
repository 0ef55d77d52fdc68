#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace carpets {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Accepts "p/q", "p", and exact finite decimals like "0.3125" (optionally
// signed).  Throws ParseError on anything else or on a zero denominator.
Rational parse_rational(const std::string& text);

// Canonical "p/q" form, denominator always present ("0/1", "-3/4", ...).
std::string format_rational(const Rational& value);

// Floor division, exact for negative numerators too.  b must be positive.
BigInt floor_div(const BigInt& a, const BigInt& b);

// Natural log of a positive big integer / rational, accurate to long double
// precision regardless of magnitude.
long double log_bigint(const BigInt& value);
long double log_rational(const Rational& value);

double to_double(const Rational& value);

}  // namespace carpets
