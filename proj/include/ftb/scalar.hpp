#pragma once

// Numeric modes. Every algorithm in the library is templated on the scalar
// type and instantiated for `double` (tolerance-based comparisons) and
// `Rational` (exact GMP rationals, zero tolerance).

#include <boost/multiprecision/gmp.hpp>

#include <string>
#include <string_view>

namespace ftb {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static constexpr const char* name = "float";
  static double default_tolerance() { return 1e-9; }
};

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr const char* name = "exact";
  static Rational default_tolerance() { return Rational(0); }
};

template <class T>
T default_tolerance() {
  return ScalarTraits<T>::default_tolerance();
}

template <class T>
T positive_part(const T& v) {
  return v > T(0) ? v : T(0);
}

template <class T>
T clamp_unit(const T& v) {
  if (v < T(0)) return T(0);
  if (v > T(1)) return T(1);
  return v;
}

template <class T>
T abs_value(const T& v) {
  return v < T(0) ? T(-v) : v;
}

inline double to_double(double v) { return v; }
inline double to_double(const Rational& v) { return v.convert_to<double>(); }

/// Parses a decimal literal ("0.05", "-1.5e-3", "7") or, for exact mode, also a
/// fraction ("1/20"). Decimal literals are converted exactly in exact mode.
/// Throws InputError on malformed or non-finite input.
template <class T>
T parse_scalar(std::string_view text);

template <>
double parse_scalar<double>(std::string_view text);
template <>
Rational parse_scalar<Rational>(std::string_view text);

/// Rationals print as "p/q" (or "p" when integral); doubles use the shortest
/// representation that round-trips.
std::string format_scalar(double v);
std::string format_scalar(const Rational& v);

/// Converts a double to the exact rational value of its shortest round-trip
/// decimal representation (so 0.1 becomes 1/10, not the binary expansion).
Rational rational_from_double(double v);

template <class T>
T from_double(double v) {
  if constexpr (std::is_same_v<T, double>) {
    return v;
  } else {
    return rational_from_double(v);
  }
}

}  // namespace ftb
