#include "hcb/rational.hpp"

#include <cctype>

#include "hcb/error.hpp"

namespace hcb {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::BoundaryPoint: return "BoundaryPoint";
    case ErrorCode::NotInK: return "NotInK";
    case ErrorCode::NonZeroMean: return "NonZeroMean";
    case ErrorCode::NonDyadicBreakpoints: return "NonDyadicBreakpoints";
    case ErrorCode::NotMAdic: return "NotMAdic";
    case ErrorCode::FiberAverageNonZero: return "FiberAverageNonZero";
    case ErrorCode::ZeroFunction: return "ZeroFunction";
    case ErrorCode::NotInSquareWaveSpan: return "NotInSquareWaveSpan";
    case ErrorCode::TruncationBudgetExceeded: return "TruncationBudgetExceeded";
    case ErrorCode::NotMeasurePreserving: return "NotMeasurePreserving";
    case ErrorCode::NonPositiveValue: return "NonPositiveValue";
    case ErrorCode::NotMonotone: return "NotMonotone";
  }
  return "Unknown";
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

Rational parse_decimal(std::string_view text) {
  bool negative = false;
  std::string_view s = text;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = s.substr(e + 1);
    bool exp_negative = false;
    if (!exp_part.empty() && (exp_part.front() == '-' || exp_part.front() == '+')) {
      exp_negative = exp_part.front() == '-';
      exp_part.remove_prefix(1);
    }
    if (!all_digits(exp_part) || exp_part.size() > 6) {
      throw Error(ErrorCode::ParseError, "bad exponent in '" + std::string(text) + "'");
    }
    exponent = std::stol(std::string(exp_part));
    if (exp_negative) exponent = -exponent;
    s = s.substr(0, e);
  }
  std::string digits;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = s.substr(0, dot);
    std::string_view frac_part = s.substr(dot + 1);
    if ((!int_part.empty() && !all_digits(int_part)) ||
        (!frac_part.empty() && !all_digits(frac_part)) || (int_part.empty() && frac_part.empty())) {
      throw Error(ErrorCode::ParseError, "bad decimal '" + std::string(text) + "'");
    }
    digits = std::string(int_part) + std::string(frac_part);
    exponent -= static_cast<long>(frac_part.size());
  } else {
    if (!all_digits(s)) throw Error(ErrorCode::ParseError, "bad number '" + std::string(text) + "'");
    digits = std::string(s);
  }
  Rational value(mpz_class(digits, 10));
  mpz_class ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  if (exponent >= 0) {
    value *= ten_pow;
  } else {
    value /= ten_pow;
  }
  value.canonicalize();
  return negative ? Rational(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) throw Error(ErrorCode::ParseError, "empty number");
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::string_view num = s.substr(0, slash);
    std::string_view den = s.substr(slash + 1);
    std::string_view num_digits = num;
    if (!num_digits.empty() && (num_digits.front() == '-' || num_digits.front() == '+')) {
      num_digits.remove_prefix(1);
    }
    if (!all_digits(num_digits) || !all_digits(den)) {
      throw Error(ErrorCode::ParseError, "bad fraction '" + std::string(text) + "'");
    }
    mpz_class d(std::string(den), 10);
    if (d == 0) throw Error(ErrorCode::ParseError, "zero denominator in '" + std::string(text) + "'");
    std::string n_str(num);
    if (!n_str.empty() && n_str.front() == '+') n_str.erase(0, 1);
    Rational q(mpz_class(n_str, 10), d);
    q.canonicalize();
    return q;
  }
  return parse_decimal(s);
}

std::string to_string(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_str();
}

Rational pow2(long e) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(e < 0 ? -e : e));
  if (e >= 0) return Rational(p);
  Rational q(1, p);
  q.canonicalize();
  return q;
}

Rational ipow(const Rational& b, unsigned long e) {
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), b.get_num_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), b.get_den_mpz_t(), e);
  Rational q(num, den);
  q.canonicalize();
  return q;
}

std::optional<unsigned> denominator_exponent(const Rational& q, unsigned base) {
  // Smallest j with den | base^j.
  mpz_class d = q.get_den();
  mpz_class b(base);
  unsigned e = 0;
  while (d != 1) {
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), b.get_mpz_t());
    if (g == 1) return std::nullopt;
    mpz_divexact(d.get_mpz_t(), d.get_mpz_t(), g.get_mpz_t());
    ++e;
  }
  return e;
}

}  // namespace hcb
