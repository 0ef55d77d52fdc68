#include "carpets/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstddef>

#include "carpets/errors.hpp"

namespace carpets {

namespace {

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  std::string s = text;
  // trim surrounding whitespace
  std::size_t b = s.find_first_not_of(" \t\r\n");
  std::size_t e = s.find_last_not_of(" \t\r\n");
  if (b == std::string::npos) throw ParseError("empty rational literal");
  s = s.substr(b, e - b + 1);

  bool negative = false;
  if (s[0] == '+' || s[0] == '-') {
    negative = (s[0] == '-');
    s = s.substr(1);
  }
  if (s.empty()) throw ParseError("bare sign is not a rational: '" + text + "'");

  Rational out;
  if (auto slash = s.find('/'); slash != std::string::npos) {
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den))
      throw ParseError("malformed rational: '" + text + "'");
    BigInt p(num), q(den);
    if (q == 0) throw ParseError("zero denominator: '" + text + "'");
    out = Rational(p, q);
  } else if (auto dot = s.find('.'); dot != std::string::npos) {
    std::string whole = s.substr(0, dot), frac = s.substr(dot + 1);
    if (whole.empty()) whole = "0";
    if (!all_digits(whole) || !all_digits(frac))
      throw ParseError("malformed rational: '" + text + "'");
    BigInt den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    out = Rational(BigInt(whole) * den + BigInt(frac.empty() ? "0" : frac), den);
  } else {
    if (!all_digits(s)) throw ParseError("malformed rational: '" + text + "'");
    out = Rational(BigInt(s));
  }
  return negative ? Rational(-out) : out;
}

std::string format_rational(const Rational& value) {
  return numerator(value).str() + "/" + denominator(value).str();
}

BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b, r = a % b;
  if (r != 0 && a < 0) --q;
  return q;
}

long double log_bigint(const BigInt& value) {
  // Split off the top bits so the conversion to long double stays exact.
  std::size_t bits = msb(value) + 1;  // value > 0
  if (bits <= 62) return std::log(static_cast<long double>(value.convert_to<std::uint64_t>()));
  unsigned shift = static_cast<unsigned>(bits - 62);
  BigInt top = value >> shift;
  long double approx = std::log(static_cast<long double>(top.convert_to<std::uint64_t>())) +
                       shift * 0.6931471805599453094172321214581766L;
  return approx;
}

long double log_rational(const Rational& value) {
  return log_bigint(numerator(value)) - log_bigint(denominator(value));
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

}  // namespace carpets
