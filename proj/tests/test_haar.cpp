#include <doctest.h>

#include "hcb/error.hpp"
#include "hcb/haar.hpp"
#include "hcb/rng.hpp"
#include "random_fns.hpp"

using hcb::HaarExpansion;
using hcb::PCFun1D;
using hcb::PCFun2D;
using hcb::PCFun3D;
using hcb::Rational;

namespace {

PCFun1D centered_affine(unsigned level) { return hcb::from_affine(Rational(1), Rational(-1, 2), level); }

}  // namespace

TEST_CASE("wavelets") {
  const auto w = hcb::wavelet(1, 0);
  CHECK(w.value_at({Rational(1, 4)}) == 1);
  CHECK(w.value_at({Rational(3, 4)}) == -1);
  const auto w21 = hcb::wavelet(2, 1);
  CHECK(w21.value_at({Rational(1, 4)}) == 0);
  CHECK(w21.value_at({Rational(5, 8)}) == 1);
  CHECK(w21.value_at({Rational(7, 8)}) == -1);
  CHECK_THROWS_AS(hcb::wavelet(2, 2), hcb::Error);
  CHECK_THROWS_AS(hcb::wavelet(0, 0), hcb::Error);
  for (int l = 1; l <= 6; ++l) {
    const auto s = hcb::square_wave(l);
    for (const auto& v : s.values()) CHECK(abs(v) == 1);
  }
}

TEST_CASE("analyze") {
  const auto e = hcb::analyze(hcb::wavelet(1, 0));
  CHECK(e == HaarExpansion{{{1, 0}, Rational(1)}});
  CHECK(hcb::analyze(PCFun1D()).empty());
  const unsigned L = 6;
  const auto a = hcb::analyze(centered_affine(L));
  CHECK(a.size() == (std::size_t{1} << L) - 1);
  for (const auto& [idx, c] : a) CHECK(c == -hcb::pow2(-idx.level - 1));
  CHECK_THROWS_AS(hcb::analyze(PCFun1D::constant(Rational(1))), hcb::Error);
  CHECK_THROWS_AS(hcb::analyze(hcb::project_zero_mean(PCFun1D(
                      {Rational(0), Rational(1, 3), Rational(1)}, {Rational(1), Rational(0)}))),
                  hcb::Error);
}

TEST_CASE("raw coefficients") {
  const auto f = centered_affine(8);
  CHECK(hcb::coefficient(f, 1, 0) == Rational(-1, 4));
  CHECK(hcb::coefficient(f, 2, 0) == Rational(-1, 16));
  CHECK(hcb::coefficient(PCFun1D::constant(Rational(1)), 3, 2) == 0);
}

TEST_CASE("holder bound and signs") {
  const auto f = centered_affine(8);
  const auto report = hcb::holder_bound_check(f, 1.0, Rational(3, 2));
  CHECK(report.all_pass);
  CHECK(report.levels.size() == 8);
  CHECK(hcb::holder_bound_check(PCFun1D(), 1.0, Rational(1)).all_pass);
  CHECK(hcb::uniform_sign(hcb::analyze(f)) == -1);
  CHECK(hcb::uniform_sign(hcb::analyze(Rational(-1) * f)) == 1);
  CHECK(hcb::uniform_sign(HaarExpansion{}) == 0);
  CHECK_FALSE(hcb::uniform_sign(HaarExpansion{{{1, 0}, Rational(1)}, {{2, 0}, Rational(-1)}}).has_value());
  // A bound that is too small fails at level 1.
  CHECK_FALSE(hcb::holder_bound_check(f, 1.0, Rational(1, 4)).all_pass);
}

TEST_CASE("level sup norms and square-wave coordinates") {
  const auto e = hcb::analyze(centered_affine(5));
  const auto norms = hcb::level_sup_norms(e);
  for (const auto& [l, v] : norms) CHECK(v == hcb::pow2(-l - 1));
  const auto sw = hcb::square_wave_coefficients(e);
  REQUIRE(sw.has_value());
  CHECK(sw->size() == 5);
  CHECK((*sw)[2] == Rational(-1, 16));
  CHECK_FALSE(hcb::square_wave_coefficients(hcb::analyze(hcb::wavelet(2, 0))).has_value());
}

TEST_CASE("Parseval and orthogonality of levels") {
  const hcb::CounterRng rng(21);
  for (std::uint64_t i = 0; i < 40; ++i) {
    const auto f = hcb::sample::dyadic_zero_mean(rng, i, 6);
    const auto g = hcb::sample::dyadic_zero_mean(rng, 100 + i, 6);
    const auto e = hcb::analyze(f);
    Rational energy(0);
    for (const auto& [idx, c] : e) energy += c * c * hcb::pow2(-(idx.level - 1));
    CHECK(energy == hcb::inner_product(f, f));
    CHECK(hcb::pairing(e, hcb::analyze(g)) == hcb::inner_product(f, g));
    CHECK(hcb::synthesize(e) == f);

    std::map<int, HaarExpansion> by_level;
    for (const auto& [idx, c] : e) by_level[idx.level][idx] = c;
    for (const auto& [l1, e1] : by_level) {
      for (const auto& [l2, e2] : by_level) {
        if (l1 != l2) CHECK(hcb::inner_product(hcb::synthesize(e1), hcb::synthesize(e2)) == 0);
      }
    }
  }
}

TEST_CASE("variance of x - 1/2 from its coefficients") {
  // sum over l of 2^{l-1} coefficients, each (2^{-l-1})^2 2^{-(l-1)}
  Rational total(0);
  for (int l = 1; l <= 40; ++l) total += hcb::pow2(-2 * l - 2);
  const Rational gap = Rational(1, 12) - total;
  CHECK(gap > 0);
  CHECK(gap < hcb::pow2(-80));
  // For the level-L projection the identity is exact.
  const auto f = centered_affine(7);
  Rational proj(0);
  for (int l = 1; l <= 7; ++l) proj += hcb::pow2(-2 * l - 2);
  CHECK(hcb::inner_product(f, f) == proj);
}

TEST_CASE("general-M components") {
  const PCFun1D f({Rational(0), Rational(1, 3), Rational(1)}, {Rational(2, 3), Rational(-1, 3)});
  const auto c = hcb::analyze_general_M(f, 3);
  CHECK(c.mean == 0);
  REQUIRE(!c.components.empty());
  CHECK(c.components[0] == f);
  for (std::size_t l = 1; l < c.components.size(); ++l) CHECK(c.components[l] == PCFun1D());

  const auto k = hcb::analyze_general_M(PCFun1D::constant(Rational(5)), 3);
  CHECK(k.mean == 5);
  for (const auto& comp : k.components) CHECK(comp == PCFun1D());
  CHECK_THROWS_AS(hcb::analyze_general_M(f, 2), hcb::Error);

  const hcb::CounterRng rng(4);
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto g = hcb::sample::dyadic_zero_mean(rng, i, 5);
    const auto lc = hcb::analyze_general_M(g, 2);
    const auto e = hcb::analyze(g);
    for (std::size_t l = 0; l < lc.components.size(); ++l) {
      HaarExpansion level;
      for (const auto& [idx, v] : e) {
        if (idx.level == static_cast<int>(l + 1)) level[idx] = v;
      }
      CHECK(lc.components[l] == hcb::synthesize(level));
    }
    CHECK(hcb::synthesize(lc) == g);
  }
  for (std::uint64_t i = 0; i < 10; ++i) {
    std::vector<Rational> v(27);
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = Rational(hcb::sample::uniform_int(rng, 50 + i, j, -5, 5));
    const PCFun1D g(hcb::uniform_breaks(27), v);
    const auto lc = hcb::analyze_general_M(g, 3);
    CHECK(hcb::synthesize(lc) == g);
    for (std::size_t a = 0; a < lc.components.size(); ++a) {
      CHECK(hcb::mean(lc.components[a]) == 0);
      for (std::size_t b = a + 1; b < lc.components.size(); ++b) {
        CHECK(hcb::inner_product(lc.components[a], lc.components[b]) == 0);
      }
    }
  }
}

TEST_CASE("tensor analysis") {
  const auto F = hcb::lift_center(centered_affine(4));
  const auto T = hcb::tensor_analyze(F);
  CHECK(T.zero == PCFun2D());
  CHECK(T.levels.size() == 15);
  for (const auto& [idx, g] : T.levels) CHECK(g == PCFun2D::constant(-hcb::pow2(-idx.level - 1)));

  const PCFun2D g({std::vector<Rational>{Rational(0), Rational(1, 2), Rational(1)},
                   std::vector<Rational>{Rational(0), Rational(1)}},
                  {Rational(1), Rational(-1)});
  const auto G = hcb::tensor(g, PCFun1D::constant(Rational(1)));
  const auto TG = hcb::tensor_analyze(G);
  CHECK(TG.zero == g);
  CHECK(TG.levels.empty());

  const hcb::CounterRng rng(8);
  for (std::uint64_t i = 0; i < 10; ++i) {
    const auto H = hcb::sample::dyadic_3d(rng, i);
    const auto TH = hcb::tensor_analyze(H);
    CHECK(TH.zero == hcb::center_average(H));
    CHECK(hcb::tensor_synthesize(TH) == H);
  }
}
