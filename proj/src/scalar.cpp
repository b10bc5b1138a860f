#include "ftb/scalar.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "ftb/error.hpp"

namespace ftb {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_number(std::string_view text) {
  throw InputError("malformed number: '" + std::string(text) + "'");
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

// The integer parser reads a leading zero as an octal prefix.
boost::multiprecision::mpz_int decimal_integer(std::string_view digits) {
  const auto first = digits.find_first_not_of('0');
  if (first == std::string_view::npos) return 0;
  return boost::multiprecision::mpz_int(std::string(digits.substr(first)));
}

Rational pow10(long exponent) {
  boost::multiprecision::mpz_int p = 1;
  for (long i = 0; i < (exponent < 0 ? -exponent : exponent); ++i) p *= 10;
  return exponent < 0 ? Rational(boost::multiprecision::mpz_int(1), p) : Rational(p);
}

// Exact conversion of a decimal literal: [+-]digits[.digits][(e|E)[+-]digits].
Rational parse_decimal(std::string_view original) {
  std::string_view s = original;
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto epos = s.find_first_of("eE"); epos != std::string_view::npos) {
    std::string_view exp_part = s.substr(epos + 1);
    s = s.substr(0, epos);
    bool exp_negative = false;
    if (!exp_part.empty() && (exp_part.front() == '+' || exp_part.front() == '-')) {
      exp_negative = exp_part.front() == '-';
      exp_part.remove_prefix(1);
    }
    if (!all_digits(exp_part) || exp_part.size() > 6) bad_number(original);
    std::from_chars(exp_part.data(), exp_part.data() + exp_part.size(), exponent);
    if (exp_negative) exponent = -exponent;
  }
  std::string digits;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = s.substr(0, dot);
    std::string_view frac_part = s.substr(dot + 1);
    if (int_part.empty() && frac_part.empty()) bad_number(original);
    if ((!int_part.empty() && !all_digits(int_part)) ||
        (!frac_part.empty() && !all_digits(frac_part)))
      bad_number(original);
    digits = std::string(int_part) + std::string(frac_part);
    exponent -= static_cast<long>(frac_part.size());
  } else {
    if (!all_digits(s)) bad_number(original);
    digits = std::string(s);
  }
  Rational value{decimal_integer(digits)};
  value *= pow10(exponent);
  return negative ? Rational(-value) : value;
}

}  // namespace

template <>
Rational parse_scalar<Rational>(std::string_view text) {
  std::string_view s = trim(text);
  if (s.empty()) bad_number(text);
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::string_view num = trim(s.substr(0, slash));
    std::string_view den = trim(s.substr(slash + 1));
    std::string_view num_digits = num;
    if (!num_digits.empty() && (num_digits.front() == '-' || num_digits.front() == '+'))
      num_digits.remove_prefix(1);
    if (!all_digits(num_digits) || !all_digits(den)) bad_number(text);
    boost::multiprecision::mpz_int d = decimal_integer(den);
    if (d == 0) bad_number(text);
    boost::multiprecision::mpz_int n = decimal_integer(num_digits);
    if (!num.empty() && num.front() == '-') n = -n;
    return Rational(n, d);
  }
  return parse_decimal(s);
}

template <>
double parse_scalar<double>(std::string_view text) {
  std::string_view s = trim(text);
  if (s.empty()) bad_number(text);
  if (s.find('/') != std::string_view::npos) {
    return to_double(parse_scalar<Rational>(s));
  }
  // Validate the grammar with the exact parser so "nan"/"inf" are rejected.
  (void)parse_decimal(s);
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value))
    bad_number(text);
  return value;
}

std::string format_scalar(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string format_scalar(const Rational& v) {
  if (denominator(v) == 1) return numerator(v).str();
  return numerator(v).str() + "/" + denominator(v).str();
}

Rational rational_from_double(double v) {
  if (!std::isfinite(v)) throw InputError("non-finite number");
  return parse_decimal(format_scalar(v));
}

}  // namespace ftb
