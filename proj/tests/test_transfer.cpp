#include <doctest.h>

#include <algorithm>

#include "hcb/error.hpp"
#include "hcb/haar.hpp"
#include "hcb/rng.hpp"
#include "hcb/transfer.hpp"
#include "oracles.hpp"
#include "random_fns.hpp"

using hcb::BakerParams;
using hcb::HaarExpansion;
using hcb::PCFun1D;
using hcb::PCFun2D;
using hcb::PCFun3D;
using hcb::Rational;
using hcb::ReducedOp;

namespace {

const ReducedOp kNeutralOp;
const BakerParams kNeutral = BakerParams::neutral(2);

int levels_of(const HaarExpansion& e, int* lo, int* hi) {
  *lo = 1 << 30;
  *hi = 0;
  for (const auto& [idx, c] : e) {
    *lo = std::min(*lo, idx.level);
    *hi = std::max(*hi, idx.level);
  }
  return static_cast<int>(e.size());
}

unsigned axis_depth(const std::vector<Rational>& breaks) {
  unsigned d = 0;
  for (const auto& b : breaks) d = std::max(d, hcb::denominator_exponent(b, 2).value());
  return d;
}

/// Random function in H_level.
PCFun1D random_level(const hcb::CounterRng& rng, std::uint64_t stream, int level) {
  HaarExpansion e;
  for (long k = 0; k < (1L << (level - 1)); ++k) {
    const long c = hcb::sample::uniform_int(rng, stream, static_cast<std::uint64_t>(k), -5, 5);
    if (c != 0) e[{level, k}] = Rational(c);
  }
  if (e.empty()) e[{level, 0}] = Rational(1);
  return hcb::synthesize(e);
}

}  // namespace

TEST_CASE("reduced operator validation") {
  CHECK_THROWS_AS(ReducedOp(1, Rational(1, 2)), hcb::Error);
  CHECK_THROWS_AS(ReducedOp(2, Rational(1)), hcb::Error);
  CHECK(ReducedOp::from_params(BakerParams(2, Rational(3, 10), Rational(1, 5))).w == Rational(3, 5));
  CHECK(kNeutralOp.is_neutral());
}

TEST_CASE("alpha and beta parts on wavelets") {
  CHECK(hcb::p_beta(kNeutralOp, hcb::wavelet(1, 0)) == PCFun1D());
  CHECK(hcb::p_alpha(kNeutralOp, hcb::wavelet(1, 0)) ==
        Rational(1, 2) * (hcb::wavelet(2, 0) + hcb::wavelet(2, 1)));
  CHECK(hcb::p_beta(kNeutralOp, hcb::wavelet(2, 0)) == Rational(1, 4) * hcb::wavelet(1, 0));
}

TEST_CASE("reduced operator against the piecewise-affine oracle") {
  const auto phi = oracle::PAFun::affine(Rational(1), Rational(-1, 2));
  CHECK(oracle::pair(phi, phi) == Rational(1, 12));
  CHECK(oracle::pair(oracle::reduced_step(phi, Rational(1, 2)), phi) == Rational(1, 24));

  const auto chi = hcb::wavelet(1, 0);
  CHECK(hcb::inner_product(hcb::p0_apply(kNeutralOp, chi, 2), chi) == Rational(1, 4));
  const auto oc = oracle::PAFun::from_pc(chi);
  CHECK(oracle::pair(oracle::reduced_step(oracle::reduced_step(oc, Rational(1, 2)), Rational(1, 2)), oc) ==
        Rational(1, 4));

  const hcb::CounterRng rng(31);
  for (const Rational& w : {Rational(1, 2), Rational(3, 5), Rational(1, 3)}) {
    const ReducedOp op(2, w);
    for (std::uint64_t i = 0; i < 15; ++i) {
      const auto f = hcb::sample::dyadic_zero_mean(rng, i, 4) + PCFun1D::constant(Rational(1, 5));
      const auto g = hcb::sample::dyadic_zero_mean(rng, 100 + i, 4);
      auto of = oracle::PAFun::from_pc(f);
      PCFun1D lib = f;
      for (int n = 1; n <= 3; ++n) {
        of = oracle::reduced_step(of, w);
        lib = hcb::p0_apply(op, lib);
        CHECK(oracle::pair(of, oracle::PAFun::from_pc(g)) == hcb::inner_product(lib, g));
      }
      // Mass is preserved.
      CHECK(hcb::mean(lib) == hcb::mean(f));
    }
  }
}

TEST_CASE("Haar-coefficient step") {
  CHECK(hcb::p0_haar_step({{{1, 0}, Rational(1)}}, kNeutralOp) ==
        HaarExpansion{{{2, 0}, Rational(1, 2)}, {{2, 1}, Rational(1, 2)}});
  CHECK(hcb::p0_haar_step({{{2, 0}, Rational(1)}}, kNeutralOp) ==
        HaarExpansion{{{1, 0}, Rational(1, 4)}, {{3, 0}, Rational(1, 2)}, {{3, 2}, Rational(1, 2)}});
  CHECK(hcb::p0_haar_step({}, kNeutralOp).empty());

  const hcb::CounterRng rng(12);
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto f = hcb::sample::dyadic_zero_mean(rng, i, 5);
    const ReducedOp op(2, Rational(2, 7));
    CHECK(hcb::synthesize(hcb::p0_haar_apply(hcb::analyze(f), op, 4)) == hcb::p0_apply(op, f, 4));
  }
}

TEST_CASE("square-wave step") {
  using State = hcb::SquareWaveState<Rational>;
  const auto s1 = hcb::squarewave_step(State::from_head({Rational(1)}), kNeutralOp);
  CHECK(s1.coeff(1) == 0);
  CHECK(s1.coeff(2) == Rational(1, 2));
  CHECK(s1.coeff(3) == 0);
  const auto s2 = hcb::squarewave_step(State::from_head({Rational(0), Rational(1)}), kNeutralOp);
  CHECK(s2.coeff(1) == Rational(1, 2));
  CHECK(s2.coeff(2) == 0);
  CHECK(s2.coeff(3) == Rational(1, 2));
  const auto z = hcb::squarewave_step(State::from_head({}), kNeutralOp);
  for (std::size_t l = 1; l < 6; ++l) CHECK(z.coeff(l) == 0);

  // The geometric tail of x - 1/2 reproduces the variance and the first step.
  const auto a = State::affine(Rational(1));
  CHECK(a.coeff(3) == Rational(-1, 16));
  CHECK(hcb::squarewave_pairing(a, a) == Rational(1, 12));
  CHECK(hcb::squarewave_pairing(hcb::squarewave_step(a, kNeutralOp), a) == Rational(1, 24));

  const auto sw = hcb::to_square_wave(hcb::analyze(hcb::square_wave(2) - Rational(3) * hcb::square_wave(4)));
  CHECK(sw.coeff(2) == 1);
  CHECK(sw.coeff(4) == -3);
  CHECK(sw.coeff(5) == 0);
  CHECK_THROWS_AS(hcb::to_square_wave(hcb::analyze(hcb::wavelet(2, 1))), hcb::Error);
}

TEST_CASE("level subspaces move one step") {
  for (int level = 1; level <= 20; ++level) {
    for (long k : {0L, (1L << (level - 1)) - 1}) {
      const auto w = hcb::wavelet(level, k);
      int lo = 0, hi = 0;
      levels_of(hcb::analyze(hcb::p_alpha(kNeutralOp, w)), &lo, &hi);
      CHECK(lo == level + 1);
      CHECK(hi == level + 1);
      const auto b = hcb::analyze(hcb::p_beta(kNeutralOp, w));
      if (level == 1) {
        CHECK(b.empty());
      } else {
        levels_of(b, &lo, &hi);
        CHECK(lo == level - 1);
        CHECK(hi == level - 1);
      }
    }
  }
}

TEST_CASE("sup-norm action on levels") {
  const hcb::CounterRng rng(13);
  for (int level = 1; level <= 6; ++level) {
    for (std::uint64_t i = 0; i < 5; ++i) {
      const auto f = random_level(rng, 10 * static_cast<std::uint64_t>(level) + i, level);
      CHECK(hcb::sup_norm(hcb::p_alpha(kNeutralOp, f)) == Rational(1, 2) * hcb::sup_norm(f));
      if (level >= 2) CHECK(hcb::sup_norm(hcb::p_beta(kNeutralOp, f)) <= Rational(1, 2) * hcb::sup_norm(f));
    }
  }
  // Equality for P_beta when the level is constant in k.
  CHECK(hcb::sup_norm(hcb::p_beta(kNeutralOp, hcb::square_wave(3))) == Rational(1, 2));
}

TEST_CASE("oscillation transfer") {
  const hcb::CounterRng rng(14);
  for (std::uint64_t i = 0; i < 10; ++i) {
    const auto f = hcb::sample::dyadic_zero_mean(rng, i, 4);
    for (const auto& row : hcb::osc_transition_check(kNeutralOp, f, 4)) CHECK(row.holds);
  }
  const ReducedOp op3(3, Rational(1, 3));
  for (std::uint64_t i = 0; i < 6; ++i) {
    std::vector<Rational> v(9);
    for (std::size_t j = 0; j < 9; ++j) v[j] = Rational(hcb::sample::uniform_int(rng, 40 + i, j, -4, 4));
    const PCFun1D f(hcb::uniform_breaks(9), v);
    for (const auto& row : hcb::osc_transition_check(op3, f, 3)) CHECK(row.holds);
  }
  const PCFun1D stair(hcb::uniform_breaks(4), {Rational(-3, 4), Rational(-1, 4), Rational(1, 4), Rational(3, 4)});
  for (const auto& row : hcb::osc_transition_check(kNeutralOp, stair, 5)) {
    CHECK(row.holds);
    CHECK(row.equal);
  }
}

TEST_CASE("xi-increasing cone is invariant") {
  const hcb::CounterRng rng(15);
  for (std::uint64_t i = 0; i < 10; ++i) {
    std::vector<Rational> v(8);
    for (std::size_t j = 0; j < 8; j += 2) {
      v[j] = Rational(hcb::sample::uniform_int(rng, i, j, -5, 5));
      v[j + 1] = v[j] + Rational(hcb::sample::uniform_int(rng, i, j + 1, 1, 4));
    }
    PCFun1D f(hcb::uniform_breaks(8), v);
    REQUIRE(hcb::is_xi_strictly_increasing(f, 2, 3));
    for (unsigned level = 4; level <= 7; ++level) {
      f = hcb::p0_apply(kNeutralOp, f);
      CHECK(hcb::is_xi_strictly_increasing(f, 2, level));
    }
  }
}

TEST_CASE("full operator") {
  CHECK(hcb::p_full_3d(kNeutral, PCFun3D::constant(Rational(1))) == PCFun3D::constant(Rational(1)));
  const BakerParams m3(3, Rational(1, 9), Rational(2, 9));
  CHECK(hcb::p_full_3d(m3, PCFun3D::constant(Rational(1))) == PCFun3D::constant(Rational(1)));

  const hcb::CounterRng rng(16);
  for (std::uint64_t i = 0; i < 4; ++i) {
    const auto F = hcb::sample::dyadic_3d(rng, i, 2);
    const auto G = hcb::sample::dyadic_3d(rng, 50 + i, 2);
    PCFun3D current = F;
    for (int n = 1; n <= 2; ++n) {
      const auto next = hcb::p_full_3d(kNeutral, current);
      // G o f needs two extra levels in x_u and one in x_c.
      std::array<unsigned, 3> cells{};
      for (std::size_t d = 0; d < 3; ++d) {
        const unsigned extra = d == 0 ? 2 : d == 1 ? 1 : 0;
        const unsigned depth = std::max(axis_depth(current.breaks(d)), axis_depth(G.breaks(d)) + extra);
        cells[d] = 1u << depth;
      }
      CHECK(hcb::inner_product(next, G) == oracle::pair_with_composition(kNeutral, current, G, cells));
      current = next;
    }
  }
}

TEST_CASE("center marginal of P is the reduced operator") {
  const hcb::CounterRng rng(17);
  for (const auto& params : {kNeutral, BakerParams(2, Rational(3, 10), Rational(1, 5)),
                             BakerParams(3, Rational(1, 9), Rational(2, 9))}) {
    const auto op = ReducedOp::from_params(params);
    for (std::uint64_t i = 0; i < 4; ++i) {
      std::vector<Rational> v(static_cast<std::size_t>(params.M() * params.M()));
      for (std::size_t j = 0; j < v.size(); ++j) v[j] = Rational(hcb::sample::uniform_int(rng, i, j, -6, 6));
      const PCFun1D g(hcb::uniform_breaks(v.size()), v);
      PCFun3D F = hcb::lift_center(g);
      for (unsigned n = 1; n <= 3; ++n) {
        F = hcb::p_full_3d(params, F);
        CHECK(hcb::center_marginal(F) == hcb::p0_apply(op, g, n));
      }
    }
  }
}

TEST_CASE("tensor operators") {
  hcb::TensorComponents T;
  T.zero = PCFun2D();
  T.levels[{1, 0}] = PCFun2D::constant(Rational(1));
  const auto B = hcb::p_hat_beta(T);
  const PCFun2D expected({std::vector<Rational>{Rational(0), Rational(1)},
                          std::vector<Rational>{Rational(0), Rational(1, 2), Rational(3, 4), Rational(1)}},
                         {Rational(0), Rational(1), Rational(-1)});
  CHECK(B.zero == expected);
  CHECK(B.levels.empty());

  hcb::TensorComponents Z;
  Z.zero = PCFun2D({std::vector<Rational>{Rational(0), Rational(1, 2), Rational(1)},
                    std::vector<Rational>{Rational(0), Rational(1, 4), Rational(1)}},
                   {Rational(1), Rational(-2), Rational(3), Rational(1)});
  const auto D = hcb::p_hat_alpha_displayed(Z);
  CHECK(D.zero == PCFun2D());
  for (const auto& [idx, g] : D.levels) CHECK(idx == hcb::HaarIndex{1, 0});

  const auto F = hcb::tensor_synthesize(Z);
  const auto exact = hcb::tensor_synthesize(hcb::p_hat_alpha(Z));
  const auto shown = hcb::tensor_synthesize(D);
  CHECK(hcb::component_split_apply(kNeutral, hcb::SplitPart::ZeroOne, F) == shown);
  CHECK(hcb::component_split_apply(kNeutral, hcb::SplitPart::ZeroZero, F) ==
        hcb::tensor_synthesize(hcb::p_hat_beta(Z)) + (exact - shown));

  const hcb::CounterRng rng(18);
  for (std::uint64_t i = 0; i < 6; ++i) {
    const auto H = hcb::sample::dyadic_3d(rng, i, 3);
    const auto TH = hcb::tensor_analyze(H);
    CHECK(hcb::tensor_synthesize(hcb::add(hcb::p_hat_alpha(TH), hcb::p_hat_beta(TH))) ==
          hcb::p_full_3d(kNeutral, H));
  }
}

TEST_CASE("split components") {
  const auto F = hcb::lift_center(hcb::from_affine(Rational(1), Rational(-1, 2), 3));
  CHECK(hcb::pi0(F) == PCFun3D());
  CHECK(hcb::component_split_apply(kNeutral, hcb::SplitPart::ZeroOne, F) == PCFun3D());
  CHECK(hcb::component_split_apply(kNeutral, hcb::SplitPart::ZeroZero, F) == PCFun3D());

  const hcb::CounterRng rng(19);
  for (std::uint64_t i = 0; i < 3; ++i) {
    const auto H = hcb::sample::dyadic_3d(rng, i, 2);
    PCFun3D sum;
    for (auto part : {hcb::SplitPart::Star, hcb::SplitPart::ZeroOne, hcb::SplitPart::OneZero,
                      hcb::SplitPart::ZeroZero}) {
      sum += hcb::component_split_apply(kNeutral, part, H);
    }
    CHECK(sum == hcb::p_full_3d(kNeutral, H));
    for (unsigned n = 1; n <= 2; ++n) {
      const auto c = hcb::composition_identities(kNeutral, H, n);
      CHECK(c.off_zero);
      CHECK(c.on_zero);
    }
  }
  CHECK_THROWS_AS(hcb::composition_identities(kNeutral, F, 0), hcb::Error);
}

TEST_CASE("fiber-average decay") {
  const PCFun3D u({std::vector<Rational>{Rational(0), Rational(1)}, std::vector<Rational>{Rational(0), Rational(1)},
                   std::vector<Rational>{Rational(0), Rational(1, 2), Rational(1)}},
                  {Rational(1), Rational(-1)});
  const hcb::AffineForm v{Rational(1, 3), Rational(1), Rational(-1, 2), Rational(2)};
  const auto rows = hcb::fiber_average_decay_check(kNeutral, u, v, 1.0, 12);
  REQUIRE(rows.size() == 13);
  CHECK(rows[0].value == hcb::pair_affine(u, v));
  for (const auto& r : rows) CHECK(r.pass);

  for (const auto& r : hcb::fiber_average_decay_check(kNeutral, PCFun3D(), v, 1.0, 5)) CHECK(r.value == 0);
  CHECK_THROWS_AS(hcb::fiber_average_decay_check(kNeutral, PCFun3D::constant(Rational(1)), v, 1.0, 2), hcb::Error);
  CHECK_THROWS_AS(hcb::fiber_average_decay_check(BakerParams(2, Rational(1, 5), Rational(1, 5)), u, v, 1.0, 2),
                  hcb::Error);

  // The exact left side agrees with the full operator.
  PCFun3D Pu = u;
  for (unsigned n = 1; n <= 4; ++n) {
    Pu = hcb::p_full_3d(kNeutral, Pu);
    CHECK(rows[n].value == hcb::pair_affine(Pu, v));
  }
}
