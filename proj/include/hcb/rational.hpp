#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>

namespace hcb {

/// Exact rational number. All operator-level computations use this type.
using Rational = mpq_class;

/// Parses "p/q", "-7", "0.125" or "3e-2" into an exact rational.
/// Decimal input is converted digit-for-digit, so "0.3" is exactly 3/10.
Rational parse_rational(std::string_view text);

/// Canonical text form: "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& q);

inline double to_double(const Rational& q) { return q.get_d(); }

/// 2^e as an exact rational (e may be negative).
Rational pow2(long e);

/// b^e for non-negative e.
Rational ipow(const Rational& b, unsigned long e);

/// Smallest j such that q * base^j is an integer, if any.
std::optional<unsigned> denominator_exponent(const Rational& q, unsigned base);

template <class T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

/// Converts a rational to the working scalar (identity for Rational).
template <class T>
T scalar_from(const Rational& q) {
  if constexpr (is_exact_v<T>) {
    return q;
  } else {
    return static_cast<T>(q.get_d());
  }
}

}  // namespace hcb
