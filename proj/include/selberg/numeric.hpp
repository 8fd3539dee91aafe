#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "selberg/error.hpp"

namespace selberg {

using i64 = std::int64_t;
using i128 = __int128;
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline std::string to_string(const BigInt& v) { return v.str(); }

// "p/q" in lowest terms, or just "p" for integers.
inline std::string to_string(const Rational& v) {
  const BigInt& q = boost::multiprecision::denominator(v);
  if (q == 1) return boost::multiprecision::numerator(v).str();
  return boost::multiprecision::numerator(v).str() + "/" + q.str();
}

inline bool is_integer(const Rational& v) {
  return boost::multiprecision::denominator(v) == 1;
}

// Round-trips through 15 significant digits so every printed float is stable.
inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

inline double round15(double v) { return std::strtod(format_real(v).c_str(), nullptr); }

inline double to_double(const Rational& v) { return v.convert_to<double>(); }

// Parses "7", "-3", "6.5", "1e6", "2.5e-3" or "p/q" into an exact rational.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&] { throw DomainError("not a number: '" + std::string(text) + "'"); };
  if (text.empty()) fail();
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational num = parse_rational(text.substr(0, slash));
    Rational den = parse_rational(text.substr(slash + 1));
    if (den == 0) fail();
    return num / den;
  }
  std::size_t pos = 0;
  bool negative = false;
  if (text[pos] == '+' || text[pos] == '-') negative = text[pos++] == '-';
  BigInt mantissa = 0;
  i64 scale = 0;
  bool digits = false, point = false;
  for (; pos < text.size(); ++pos) {
    char ch = text[pos];
    if (ch >= '0' && ch <= '9') {
      mantissa = mantissa * 10 + (ch - '0');
      if (point) --scale;
      digits = true;
    } else if (ch == '.' && !point) {
      point = true;
    } else {
      break;
    }
  }
  if (!digits) fail();
  if (pos < text.size()) {
    if (text[pos] != 'e' && text[pos] != 'E') fail();
    ++pos;
    bool neg_exp = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) neg_exp = text[pos++] == '-';
    if (pos == text.size()) fail();
    i64 exponent = 0;
    for (; pos < text.size(); ++pos) {
      if (text[pos] < '0' || text[pos] > '9' || exponent > 100000) fail();
      exponent = exponent * 10 + (text[pos] - '0');
    }
    scale += neg_exp ? -exponent : exponent;
  }
  if (scale < -4000 || scale > 4000) fail();
  BigInt power = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(scale < 0 ? -scale : scale));
  Rational value = scale < 0 ? Rational(mantissa, power) : Rational(mantissa * power);
  return negative ? -value : value;
}

// Natural log of a positive big integer without converting it to a double first.
inline double log_big(const BigInt& v) {
  ensure(v > 0, "log of nonpositive integer");
  std::size_t bits = boost::multiprecision::msb(v) + 1;
  if (bits <= 1000) return std::log(v.convert_to<double>());
  std::size_t shift = bits - 64;
  BigInt top = v >> shift;
  return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

}  // namespace selberg
