#include <doctest.h>

#include <cmath>

#include "hcb/baker_map.hpp"
#include "hcb/error.hpp"
#include "hcb/rng.hpp"

using hcb::BakerParams;
using hcb::Point3;
using hcb::Rational;
using hcb::SymbolKind;

namespace {

Rational q(const char* s) { return hcb::parse_rational(s); }

Point3<Rational> pt(const char* u, const char* c, const char* s) { return {q(u), q(c), q(s)}; }

const BakerParams kNeutral = BakerParams::neutral(2);

}  // namespace

TEST_CASE("constructor validates M, a and b") {
  CHECK_THROWS_AS(BakerParams(1, Rational(1, 4), Rational(1, 4)), hcb::Error);
  CHECK_THROWS_AS(BakerParams(2, Rational(0), Rational(1, 4)), hcb::Error);
  CHECK_THROWS_AS(BakerParams(2, Rational(1, 2), Rational(1, 4)), hcb::Error);
  CHECK_THROWS_AS(BakerParams(3, Rational(1, 6), Rational(1, 3)), hcb::Error);
  CHECK_NOTHROW(BakerParams(3, Rational(1, 6), Rational(1, 6)));
}

TEST_CASE("measure preservation and center type") {
  CHECK(kNeutral.is_measure_preserving());
  CHECK(kNeutral.center_type() == hcb::CenterType::MostlyNeutral);
  CHECK_FALSE(BakerParams(2, Rational(1, 5), Rational(1, 5)).is_measure_preserving());
  CHECK(BakerParams(2, Rational(3, 10), Rational(1, 5)).is_measure_preserving());
  CHECK(BakerParams(2, Rational(3, 10), Rational(1, 5)).center_type() == hcb::CenterType::MostlyContracting);
  CHECK(BakerParams(2, Rational(1, 5), Rational(3, 10)).center_type() == hcb::CenterType::MostlyExpanding);
  CHECK(kNeutral.alpha_weight() == Rational(1, 2));
  CHECK(hcb::center_type_name(hcb::CenterType::MostlyNeutral) == "mostly-neutral");
}

TEST_CASE("classify") {
  auto s = hcb::classify(kNeutral, pt("0.1", "0.3", "0.5"));
  CHECK(s == hcb::Symbol{SymbolKind::Alpha, 1});
  s = hcb::classify(kNeutral, pt("0.6", "0.3", "0.5"));
  CHECK(s == hcb::Symbol{SymbolKind::Beta, 1});
  s = hcb::classify(kNeutral, pt("1", "1", "1"));
  CHECK(s == hcb::Symbol{SymbolKind::Beta, 2});
  CHECK(hcb::symbol_name(s) == "beta2");
  s = hcb::classify(kNeutral, pt("0.25", "0", "0"));
  CHECK(s == hcb::Symbol{SymbolKind::Alpha, 2});
  s = hcb::classify(kNeutral, Point3<double>{0.6, 0.3, 0.5});
  CHECK(s == hcb::Symbol{SymbolKind::Beta, 1});
}

TEST_CASE("tau") {
  CHECK(hcb::apply_tau(kNeutral, q("0.1")) == q("0.4"));
  CHECK(hcb::apply_tau(kNeutral, Rational(0)) == 0);
  CHECK(hcb::apply_tau(kNeutral, q("0.6")) == q("0.2"));
  CHECK(hcb::apply_tau(kNeutral, 0.6) == doctest::Approx(0.2));
}

TEST_CASE("f on the cube and square") {
  CHECK(hcb::apply_f3(kNeutral, pt("0.1", "0.3", "0.5")) == pt("0.4", "0.15", "0.25"));
  CHECK(hcb::apply_f3(kNeutral, pt("0.6", "0.3", "0.5")) == pt("0.2", "0.6", "0.625"));
  CHECK(hcb::apply_f3(kNeutral, pt("0", "0", "0")) == pt("0", "0", "0"));
  const auto sq = hcb::apply_f2(kNeutral, hcb::Point2<Rational>{q("0.6"), q("0.3")});
  CHECK(sq == hcb::Point2<Rational>{q("0.2"), q("0.6")});
}

TEST_CASE("inverse") {
  CHECK(hcb::apply_f3_inverse(kNeutral, pt("0.4", "0.15", "0.25")) == pt("0.1", "0.3", "0.5"));
  CHECK(hcb::apply_f3_inverse(kNeutral, pt("0", "0", "0")) == pt("0", "0", "0"));
  CHECK(hcb::apply_f3_inverse(kNeutral, pt("0.2", "0.6", "0.625")) == pt("0.6", "0.3", "0.5"));
  // x_c = 1/2 separates the alpha images.
  CHECK_THROWS_AS(hcb::apply_f3_inverse(kNeutral, pt("0.3", "0.5", "0.3")), hcb::Error);
}

TEST_CASE("orbit") {
  const auto p = pt("0.1", "0.3", "0.5");
  const auto o0 = hcb::orbit(kNeutral, p, 0);
  REQUIRE(o0.size() == 1);
  CHECK(o0[0] == p);
  const auto o2 = hcb::orbit(kNeutral, p, 2);
  REQUIRE(o2.size() == 3);
  CHECK(o2[1] == pt("0.4", "0.15", "0.25"));
  // 0.4 lies in the second alpha strip, so x_c moves to 0.15/2 + 1/2.
  CHECK(o2[2] == pt("0.6", "0.575", "0.125"));
  const auto od = hcb::orbit(kNeutral, Point3<double>{0.1, 0.3, 0.5}, 2);
  CHECK(od[2].xc == doctest::Approx(0.575));
}

TEST_CASE("round trip on random rational points") {
  const hcb::CounterRng rng(7);
  for (const auto& params : {kNeutral, BakerParams::neutral(3), BakerParams(3, Rational(1, 9), Rational(2, 9)),
                             BakerParams(2, Rational(3, 10), Rational(1, 5))}) {
    for (std::uint64_t i = 0; i < 200; ++i) {
      Point3<Rational> p;
      for (int d = 0; d < 3; ++d) {
        // A factor 49 in the denominator keeps the point off every seam.
        const auto k = static_cast<long>(rng.bits(i, d) % 1000);
        const Rational x = Rational(7 * k + 1) / 7007;
        (d == 0 ? p.xu : d == 1 ? p.xc : p.xs) = x;
      }
      const auto img = hcb::apply_f3(params, p);
      CHECK(hcb::apply_f3_inverse(params, img) == p);
    }
  }
}

TEST_CASE("images tile the cube exactly when a + b = 1/M") {
  for (int M = 2; M <= 4; ++M) {
    for (int i = 1; i < 2 * M; ++i) {
      for (int j = 1; j < 2 * M; ++j) {
        const BakerParams params(M, Rational(i) / (2 * M * M), Rational(j) / (2 * M * M));
        const auto report = hcb::tiling_report(params);
        CAPTURE(M);
        CAPTURE(i);
        CAPTURE(j);
        CHECK(report.preserves_lebesgue() == params.is_measure_preserving());
      }
    }
  }
  const auto r = hcb::tiling_report(kNeutral);
  CHECK(r.total_image_volume == 1);
  CHECK(r.disjoint_interiors);
}

TEST_CASE("branch linear parts") {
  const BakerParams params(3, Rational(1, 9), Rational(2, 9));
  const auto a = hcb::linear_part(params, {SymbolKind::Alpha, 2});
  CHECK(a[0] == 9);
  CHECK(a[1] == Rational(1, 3));
  CHECK(a[2] == Rational(1, 3));
  const auto b = hcb::linear_part(params, {SymbolKind::Beta, 1});
  CHECK(b[0] == Rational(3, 2));
  CHECK(b[1] == 3);
  CHECK(b[2] == Rational(2, 9));
  for (const auto& br : hcb::branches(params)) {
    CHECK(br.scale == hcb::linear_part(params, br.symbol));
  }
}

TEST_CASE("itinerary statistics") {
  CHECK(hcb::itinerary_stats(kNeutral, {0.0, 0.0, 0.0}, 1000) == 1.0);
  const double f = hcb::itinerary_stats(kNeutral, {0.3141, 0.2718, 0.5772}, 1000000, 11);
  CHECK(std::abs(f - 0.5) < 0.002);
  const BakerParams p15(2, Rational(3, 20), Rational(7, 20));
  const double g = hcb::itinerary_stats(p15, {0.3141, 0.2718, 0.5772}, 1000000, 12);
  CHECK(std::abs(g - 0.3) < 0.002);
}
