#include <doctest.h>

#include "hcb/error.hpp"
#include "hcb/rational.hpp"

using hcb::Rational;

TEST_CASE("parse_rational reads fractions, integers and decimals exactly") {
  CHECK(hcb::parse_rational("1/4") == Rational(1, 4));
  CHECK(hcb::parse_rational("-7") == Rational(-7));
  CHECK(hcb::parse_rational("0.3") == Rational(3, 10));
  CHECK(hcb::parse_rational("0.125") == Rational(1, 8));
  CHECK(hcb::parse_rational("3e-2") == Rational(3, 100));
  CHECK(hcb::parse_rational("6/8") == Rational(3, 4));
}

TEST_CASE("parse_rational rejects malformed text") {
  for (const char* bad : {"", "1/0", "abc", "1/2/3", "--1"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(hcb::parse_rational(bad), hcb::Error);
  }
}

TEST_CASE("to_string is canonical") {
  CHECK(hcb::to_string(Rational(2, 4)) == "1/2");
  CHECK(hcb::to_string(Rational(-3)) == "-3");
}

TEST_CASE("pow2 and denominator_exponent") {
  CHECK(hcb::pow2(-3) == Rational(1, 8));
  CHECK(hcb::pow2(4) == Rational(16));
  CHECK(hcb::denominator_exponent(Rational(3, 8), 2) == 3u);
  CHECK(hcb::denominator_exponent(Rational(5), 2) == 0u);
  CHECK_FALSE(hcb::denominator_exponent(Rational(1, 3), 2).has_value());
  CHECK(hcb::denominator_exponent(Rational(1, 9), 3) == 2u);
  CHECK(hcb::ipow(Rational(2, 3), 3) == Rational(8, 27));
}
