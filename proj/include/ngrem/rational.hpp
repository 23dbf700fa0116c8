#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <charconv>
#include <string>
#include <string_view>

#include "ngrem/error.hpp"

namespace ngrem {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

namespace detail {

inline BigInt pow10(int e) {
  BigInt r = 1;
  for (int i = 0; i < e; ++i) r *= 10;
  return r;
}

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

// Parses [+-]digits[.digits][(e|E)[+-]digits] exactly.
inline Rational parse_decimal(std::string_view text, std::string_view whole) {
  bool negative = false;
  if (!text.empty() && (text.front() == '+' || text.front() == '-')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  int exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    auto exp_text = text.substr(e + 1);
    const char* first = exp_text.data();
    if (!exp_text.empty() && exp_text.front() == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, exp_text.data() + exp_text.size(), exponent);
    if (ec != std::errc{} || ptr != exp_text.data() + exp_text.size())
      throw Error(ErrorCode::ParseError, "bad exponent in number '" + std::string(whole) + "'");
    text = text.substr(0, e);
  }
  std::string digits;
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    auto int_part = text.substr(0, dot);
    auto frac_part = text.substr(dot + 1);
    if ((int_part.empty() && frac_part.empty()) || (!int_part.empty() && !all_digits(int_part)) ||
        (!frac_part.empty() && !all_digits(frac_part)))
      throw Error(ErrorCode::ParseError, "bad number '" + std::string(whole) + "'");
    digits = std::string(int_part) + std::string(frac_part);
    exponent -= static_cast<int>(frac_part.size());
  } else {
    if (!all_digits(text)) throw Error(ErrorCode::ParseError, "bad number '" + std::string(whole) + "'");
    digits = std::string(text);
  }
  // cpp_int reads a leading 0 as an octal prefix.
  const auto first_nonzero = digits.find_first_not_of('0');
  digits = first_nonzero == std::string::npos ? "0" : digits.substr(first_nonzero);
  Rational value{BigInt(digits)};
  if (exponent > 0) value *= pow10(exponent);
  if (exponent < 0) value /= pow10(-exponent);
  return negative ? Rational(-value) : value;
}

}  // namespace detail

// Accepts "p/q", plain integers and decimals with optional exponent.
inline Rational parse_rational(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) throw Error(ErrorCode::ParseError, "empty number");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational num = detail::parse_decimal(text.substr(0, slash), text);
    Rational den = detail::parse_decimal(text.substr(slash + 1), text);
    if (den == 0) throw Error(ErrorCode::ParseError, "zero denominator in '" + std::string(text) + "'");
    return num / den;
  }
  return detail::parse_decimal(text, text);
}

// The rational whose decimal expansion is the shortest round-trip form of x,
// so 0.1 becomes 1/10 rather than the binary value of the double.
inline Rational rational_from_double(double x) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc{}) throw Error(ErrorCode::ParseError, "cannot format number");
  return parse_rational(std::string_view(buf.data(), static_cast<std::size_t>(ptr - buf.data())));
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace ngrem
