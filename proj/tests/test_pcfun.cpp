#include <doctest.h>

#include <set>

#include "hcb/error.hpp"
#include "hcb/haar.hpp"
#include "hcb/pcfun.hpp"
#include "hcb/rng.hpp"
#include "random_fns.hpp"

using hcb::PCFun1D;
using hcb::PCFun3D;
using hcb::Rational;

namespace {

PCFun1D indicator(const Rational& lo, const Rational& hi) {
  std::vector<Rational> br{Rational(0)};
  std::vector<Rational> v;
  if (lo > 0) {
    br.push_back(lo);
    v.emplace_back(0);
  }
  br.push_back(hi);
  v.emplace_back(1);
  if (hi < 1) {
    br.emplace_back(1);
    v.emplace_back(0);
  }
  return PCFun1D(br, v);
}

}  // namespace

TEST_CASE("constructor rejects malformed grids") {
  CHECK_THROWS_AS(PCFun1D({Rational(0), Rational(1, 2)}, {Rational(1)}), hcb::Error);
  CHECK_THROWS_AS(PCFun1D({Rational(0), Rational(1, 2), Rational(1, 4), Rational(1)},
                          {Rational(1), Rational(1), Rational(1)}),
                  hcb::Error);
  CHECK_THROWS_AS(PCFun1D({Rational(0), Rational(1)}, {Rational(1), Rational(2)}), hcb::Error);
}

TEST_CASE("refine keeps the function") {
  const auto one = PCFun1D::constant(Rational(1));
  const auto r = one.refine({Rational(1, 2)});
  CHECK(r.cells() == 2);
  CHECK(r.values() == std::vector<Rational>{Rational(1), Rational(1)});

  const auto chi = hcb::wavelet(1, 0);
  const auto rc = chi.refine({Rational(1, 4)});
  CHECK(rc.breaks() == std::vector<Rational>{Rational(0), Rational(1, 4), Rational(1, 2), Rational(1)});
  CHECK(rc.values() == std::vector<Rational>{Rational(1), Rational(1), Rational(-1)});
  CHECK(rc == chi);
  CHECK(rc.simplify().cells() == 2);
}

TEST_CASE("inner products of wavelets") {
  CHECK(hcb::inner_product(hcb::wavelet(1, 0), hcb::wavelet(1, 0)) == 1);
  CHECK(hcb::inner_product(hcb::wavelet(2, 1), hcb::wavelet(2, 1)) == Rational(1, 2));
  for (int l = 1; l <= 5; ++l) {
    for (long k = 0; k < (1L << (l - 1)); ++k) {
      CHECK(hcb::inner_product(PCFun1D::constant(Rational(1)), hcb::wavelet(l, k)) == 0);
    }
  }
}

TEST_CASE("mean, zero-mean projection and axpy") {
  CHECK(hcb::mean(indicator(Rational(0), Rational(1, 2))) == Rational(1, 2));
  CHECK(hcb::project_zero_mean(PCFun1D::constant(Rational(5, 3))) == PCFun1D());
  const auto chi = hcb::wavelet(1, 0);
  CHECK(hcb::axpy(Rational(2), chi, chi) == Rational(3) * chi);
  const auto f = indicator(Rational(1, 3), Rational(3, 4));
  CHECK(hcb::mean(hcb::project_zero_mean(f)) == 0);
}

TEST_CASE("from_affine") {
  const auto f = hcb::from_affine(Rational(1), Rational(-1, 2), 1);
  CHECK(f.values() == std::vector<Rational>{Rational(-1, 4), Rational(1, 4)});
  CHECK(hcb::from_affine(Rational(0), Rational(7, 3), 5) == PCFun1D::constant(Rational(7, 3)));
  for (unsigned L = 0; L <= 10; ++L) CHECK(hcb::mean(hcb::from_affine(Rational(1), Rational(-1, 2), L)) == 0);
  const auto g = hcb::from_affine(Rational(3), Rational(1), 2, 3);
  CHECK(g.cells() == 9);
  CHECK(g.values()[0] == Rational(1) + Rational(3) / 18);
}

TEST_CASE("osc_norm_star") {
  CHECK(hcb::osc_norm_star(hcb::wavelet(1, 0), 2, 1) == 2);
  CHECK(hcb::osc_norm_star(PCFun1D::constant(Rational(4)), 2, 3) == 0);
  CHECK(hcb::osc_norm_star(hcb::wavelet(2, 0), 2, 2) == 2);
  CHECK_THROWS_AS(hcb::osc_norm_star(hcb::wavelet(3, 0), 2, 2), hcb::Error);
}

TEST_CASE("xi strictly increasing") {
  const PCFun1D stair(hcb::uniform_breaks(4), {Rational(-3, 4), Rational(-1, 4), Rational(1, 4), Rational(3, 4)});
  CHECK(hcb::is_xi_strictly_increasing(stair, 2, 2));
  CHECK_FALSE(hcb::is_xi_strictly_increasing(hcb::wavelet(1, 0), 2, 1));
  CHECK(hcb::is_m_adic_measurable(stair, 2, 2));
  CHECK_FALSE(hcb::is_m_adic_measurable(stair, 2, 1));
  CHECK_FALSE(hcb::is_m_adic_measurable(stair, 3, 3));
}

TEST_CASE("inner product is symmetric, bilinear and positive") {
  const hcb::CounterRng rng(3);
  for (std::uint64_t i = 0; i < 40; ++i) {
    const auto a = hcb::sample::dyadic_zero_mean(rng, 2 * i, 4);
    const auto b = hcb::sample::dyadic_zero_mean(rng, 2 * i + 1, 5);
    const auto d = hcb::sample::dyadic_zero_mean(rng, 1000 + i, 3);
    CHECK(hcb::inner_product(a, b) == hcb::inner_product(b, a));
    const Rational s(3, 7);
    CHECK(hcb::inner_product(hcb::axpy(s, a, d), b) == s * hcb::inner_product(a, b) + hcb::inner_product(d, b));
    if (!(a == PCFun1D())) CHECK(hcb::inner_product(a, a) > 0);
  }
}

TEST_CASE("refinement preserves mean, inner products and oscillation") {
  const hcb::CounterRng rng(5);
  for (std::uint64_t i = 0; i < 30; ++i) {
    const auto f = hcb::sample::dyadic_zero_mean(rng, i, 4) + PCFun1D::constant(Rational(1, 3));
    const auto g = hcb::sample::dyadic_zero_mean(rng, 500 + i, 3);
    const std::vector<Rational> extra{Rational(1, 3), Rational(5, 32), Rational(7, 8)};
    const auto fr = f.refine(extra);
    CHECK(hcb::mean(fr) == hcb::mean(f));
    CHECK(hcb::inner_product(fr, g) == hcb::inner_product(f, g));
    const auto fd = f.refine(std::vector<Rational>{Rational(1, 64), Rational(33, 64)});
    CHECK(hcb::osc_norm_star(fd, 2, 4) == hcb::osc_norm_star(f, 2, 4));
  }
}

TEST_CASE("common refinement cell count") {
  const std::vector<Rational> a{Rational(0), Rational(1, 4), Rational(1, 2), Rational(1)};
  const std::vector<Rational> b{Rational(0), Rational(1, 3), Rational(1, 2), Rational(1)};
  const auto grid = hcb::common_grid<1>({a}, {b});
  std::set<Rational> uni(a.begin(), a.end());
  uni.insert(b.begin(), b.end());
  CHECK(grid[0].size() - 1 == uni.size() - 1);
  const PCFun1D f(a, {Rational(1), Rational(2), Rational(3)});
  const PCFun1D g(b, {Rational(1), Rational(2), Rational(3)});
  CHECK((f + g).cells() == uni.size() - 1);
}

TEST_CASE("3D functions") {
  const hcb::CounterRng rng(9);
  const auto F = hcb::sample::dyadic_3d(rng, 1);
  const auto G = hcb::sample::dyadic_3d(rng, 2);
  CHECK(hcb::inner_product(F, G) == hcb::inner_product(G, F));
  const auto one = PCFun3D::constant(Rational(1));
  CHECK(hcb::inner_product(F, one) == F.integral());
  CHECK(hcb::mean(hcb::project_zero_mean(F)) == 0);
  CHECK(hcb::l1_norm(one) == 1);
  CHECK(hcb::sup_norm(Rational(-2) * one) == 2);
  const auto p = F.value_at(std::array<Rational, 3>{Rational(1, 3), Rational(1, 5), Rational(1, 7)});
  const auto pd = F.value_at(std::array<double, 3>{1.0 / 3, 0.2, 1.0 / 7});
  CHECK(p.get_d() == doctest::Approx(pd));
}
