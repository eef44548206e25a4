#include "verify.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "hcb/correlation.hpp"
#include "hcb/haar.hpp"
#include "hcb/ruin_walk.hpp"
#include "hcb/simd/kernels.hpp"
#include "hcb/transfer.hpp"
#include "random_fns.hpp"

namespace hcb::cli {

namespace {

template <class... Parts>
std::string cat(const Parts&... parts) {
  std::ostringstream os;
  (os << ... << parts);
  return os.str();
}

CheckResult check_tensor_split(const std::vector<PCFun3D>& inputs) {
  const BakerParams params = BakerParams::neutral(2);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const TensorComponents T = tensor_analyze(inputs[i]);
    if (!(tensor_synthesize(add(p_hat_alpha(T), p_hat_beta(T))) == p_full_3d(params, inputs[i]))) {
      return {"tensor-split", false, cat("mismatch on input ", i)};
    }
  }
  return {"tensor-split", true, cat(inputs.size(), " inputs")};
}

CheckResult check_compositions(const BakerParams& params, const std::vector<PCFun3D>& inputs, unsigned n_max) {
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (unsigned n = 1; n <= n_max; ++n) {
      const CompositionCheck c = composition_identities(params, inputs[i], n);
      if (!c.off_zero || !c.on_zero) {
        return {"composition-formulas", false,
                cat("input ", i, " n=", n, c.off_zero ? "" : " off-zero", c.on_zero ? "" : " on-zero")};
      }
    }
  }
  return {"composition-formulas", true, cat(inputs.size(), " inputs, n <= ", n_max)};
}

CheckResult check_projection(const BakerParams& params, const std::vector<PCFun1D>& inputs, unsigned n_max) {
  const ReducedOp op = ReducedOp::from_params(params);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    PCFun3D F = lift_center(inputs[i]);
    PCFun1D g = inputs[i];
    for (unsigned n = 1; n <= n_max; ++n) {
      F = p_full_3d(params, F);
      g = p0_apply(op, g);
      if (!(center_marginal(F) == g)) return {"reduced-projection", false, cat("input ", i, " n=", n)};
    }
  }
  return {"reduced-projection", true, cat(inputs.size(), " inputs, n <= ", n_max)};
}

CheckResult check_exact_values() {
  const auto phi = Observable1D::affine(1, Rational(-1, 2));
  ExactOptions opts;
  opts.rational = true;
  const auto s = exact_reduced_correlation(phi, phi, 1, CorrMethod::ExactSquareWave, opts);
  const PCFun1D chi = wavelet(1, 0);
  const Rational haar2 = inner_product(p0_apply(ReducedOp{}, chi, 2), chi);
  const bool pass = *s.records[0].exact == Rational(1, 12) && *s.records[1].exact == Rational(1, 24) &&
                    haar2 == Rational(1, 4);
  return {"exact-values", pass,
          cat(to_string(*s.records[0].exact), ", ", to_string(*s.records[1].exact), ", ", to_string(haar2))};
}

CheckResult check_oracles(const CounterRng& rng, unsigned count, unsigned n_max) {
  const ReducedOp op;
  unsigned span_cases = 0;
  for (unsigned i = 0; i < count; ++i) {
    PCFun1D f = sample::dyadic_zero_mean(rng, 1000 + i, 5);
    if (i % 4 == 0) {
      // sums of square waves exercise the third route
      f = PCFun1D::constant(0);
      for (int l = 1; l <= 3; ++l) f += Rational(sample::uniform_int(rng, 1000 + i, 100 + l, -4, 4)) * square_wave(l);
    }
    HaarExpansion e = analyze(f);
    const auto sw = square_wave_coefficients(e);
    std::optional<SquareWaveState<Rational>> state;
    if (sw) {
      state = SquareWaveState<Rational>::from_head(*sw);
      ++span_cases;
    }
    PCFun1D g = f;
    for (unsigned n = 1; n <= n_max; ++n) {
      g = p0_apply(op, g);
      e = p0_haar_step(e, op);
      if (!(synthesize(e) == g)) return {"oracle-equivalence", false, cat("haar route, input ", i, " n=", n)};
      if (state) {
        *state = squarewave_step(*state, op);
        if (!(synthesize(square_wave_expansion(*state)) == g)) {
          return {"oracle-equivalence", false, cat("square-wave route, input ", i, " n=", n)};
        }
      }
    }
  }
  return {"oracle-equivalence", true, cat(count, " inputs (", span_cases, " square-wave), n <= ", n_max)};
}

CheckResult check_ruin(long l_max, long n_max) {
  for (long l = 1; l <= l_max; ++l) {
    RuinState<Rational> s = RuinState<Rational>::delta(l);
    for (long n = 0; n <= n_max; ++n) {
      if (n > 0) s = step(s);
      for (long lp = 1; lp <= l + n; ++lp) {
        if (transition_prob(l, lp, n) != s.at(lp)) return {"ruin-closed-form", false, cat(l, "->", lp, " n=", n)};
      }
    }
  }
  return {"ruin-closed-form", true, cat("l <= ", l_max, ", n <= ", n_max)};
}

CheckResult check_domination(const CounterRng& rng) {
  const DominationReport stair = domination_check(*staircase(4).function(), 8, 12);
  if (!stair.all_equal) return {"domination", false, "staircase is not an equality"};
  for (unsigned i = 0; i < 10; ++i) {
    const PCFun1D f = sample::dyadic_zero_mean(rng, 2000 + i, 4);
    if (f == PCFun1D::constant(0)) continue;
    if (!domination_check(f, 6, 10).all_hold) return {"domination", false, cat("random input ", i)};
  }
  return {"domination", true, cat("staircase equal with C = ", to_string(stair.c_phi))};
}

CheckResult check_fiber(unsigned n_max) {
  PCFun3D::Grid grid{std::vector<Rational>{0, 1}, {0, 1}, {0, Rational(1, 2), 1}};
  const PCFun3D u(grid, {Rational(1), Rational(-1)});
  const AffineForm v{Rational(1, 3), Rational(1), Rational(-1, 2), Rational(2)};
  for (const auto& row : fiber_average_decay_check(BakerParams::neutral(2), u, v, 1.0, n_max)) {
    if (!row.pass) return {"fiber-decay", false, cat("n=", row.n)};
  }
  return {"fiber-decay", true, cat("n <= ", n_max)};
}

CheckResult check_tiling() {
  int cases = 0;
  for (int M = 2; M <= 3; ++M) {
    for (long p = 1; p < 2 * M; ++p) {
      const Rational a = Rational(p) / (2 * M * M);
      for (const Rational& b : {Rational(Rational(1, M) - a), Rational(a / 2)}) {
        if (b <= 0 || b * M >= 1 || a * M >= 1) continue;
        const BakerParams params(M, a, b);
        const TilingReport r = tiling_report(params);
        const bool tiles = r.preserves_lebesgue();
        if (tiles != params.is_measure_preserving()) return {"tiling", false, cat("M=", M, " a=", to_string(a))};
        ++cases;
      }
    }
  }
  return {"tiling", true, cat(cases, " parameter pairs")};
}

CheckResult check_simd(const CounterRng& rng) {
  if (!simd::isa_available(simd::Isa::Avx2)) return {"simd-equivalence", true, "no vector unit; scalar only"};
  const auto& ref = simd::kernels_for(simd::Isa::Scalar);
  const auto& vec = simd::kernels_for(simd::Isa::Avx2);
  const std::size_t n = 1037;
  std::vector<double> a(n + 1), b(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    a[i] = rng.uniform(7, i) - 0.5;
    b[i] = rng.uniform(8, i) - 0.5;
  }
  std::vector<double> o1(n), o2(n);
  ref.stencil(a.data(), o1.data(), n, 0.6, 0.4);
  vec.stencil(a.data(), o2.data(), n, 0.6, 0.4);
  if (o1 != o2) return {"simd-equivalence", false, "stencil"};
  if (std::bit_cast<std::uint64_t>(ref.dot(a.data(), b.data(), n)) !=
      std::bit_cast<std::uint64_t>(vec.dot(a.data(), b.data(), n))) {
    return {"simd-equivalence", false, "dot"};
  }
  for (const BakerParams& params : {BakerParams::neutral(2), BakerParams(3, Rational(1, 9), Rational(2, 9))}) {
    const simd::BakerConstants c(params);
    std::vector<double> u1(n), c1(n), s1(n), off(n), offc(n);
    for (std::size_t i = 0; i < n; ++i) {
      u1[i] = rng.uniform(9, i);
      c1[i] = rng.uniform(10, i);
      s1[i] = rng.uniform(11, i);
      off[i] = kDitherScale * rng.uniform(12, i);
      offc[i] = kDitherScale * rng.uniform(13, i);
    }
    auto u2 = u1, c2 = c1, s2 = s1;
    for (int t = 0; t < 30; ++t) {
      ref.baker_step(c, u1.data(), c1.data(), s1.data(), n, off.data(), offc.data());
      vec.baker_step(c, u2.data(), c2.data(), s2.data(), n, off.data(), offc.data());
    }
    if (u1 != u2 || c1 != c2 || s1 != s2) return {"simd-equivalence", false, "baker step"};
  }
  return {"simd-equivalence", true, "stencil, dot and baker step bit-identical"};
}

CheckResult check_decay_slope() {
  const auto phi = Observable1D::affine(1, Rational(-1, 2));
  const auto s = exact_reduced_correlation(phi, phi, 8192, CorrMethod::ExactSquareWave);
  const SlopeFit fit = decay_slope_fit(s, 512, 8192);
  const bool pass = fit.slope >= -1.55 && fit.slope <= -1.45;
  return {"decay-slope", pass, cat("slope ", fit.slope)};
}

CheckResult check_monte_carlo(std::uint64_t seed, unsigned threads) {
  const auto phi = Observable1D::affine(1, Rational(-1, 2));
  const auto exact = exact_reduced_correlation(phi, phi, 5, CorrMethod::ExactSquareWave);
  const auto obs = Observable3D::from_affine(AffineForm{Rational(-1, 2), 0, 1, 0});
  McOptions opts;
  opts.seed = seed;
  opts.samples = 400000;
  opts.threads = threads;
  const auto mc = mc_correlation(BakerParams::neutral(2), obs, obs, {1, 5}, opts);
  for (const auto& r : mc.records) {
    const double z = std::abs(r.value - exact.records[static_cast<std::size_t>(r.n)].value) / r.err;
    if (z > 4.0) return {"monte-carlo", false, cat("n=", r.n, " z=", z)};
  }
  return {"monte-carlo", true, "within 4 standard errors at n = 1, 5"};
}

}  // namespace

std::vector<CheckResult> verify_identities(const BakerParams& params, unsigned n_max, unsigned count,
                                           std::uint64_t seed) {
  const CounterRng rng(seed);
  std::vector<PCFun3D> inputs;
  std::vector<PCFun1D> centers;
  for (unsigned i = 0; i < count; ++i) {
    inputs.push_back(sample::dyadic_3d(rng, i, 2));
    centers.push_back(sample::dyadic_zero_mean(rng, 500 + i, 4));
  }
  std::vector<CheckResult> out;
  if (params.M() == 2 && params.a() == Rational(1, 4) && params.b() == Rational(1, 4)) {
    out.push_back(check_tensor_split(inputs));
  }
  out.push_back(check_compositions(params, inputs, n_max));
  if (params.is_measure_preserving()) out.push_back(check_projection(params, centers, n_max + 2));
  return out;
}

std::vector<CheckResult> verify_all(std::uint64_t seed, unsigned threads) {
  const CounterRng rng(seed);
  std::vector<CheckResult> out = verify_identities(BakerParams::neutral(2), 3, 4, seed);
  for (auto& r : verify_identities(BakerParams(3, Rational(1, 9), Rational(2, 9)), 2, 2, seed)) {
    r.name += "-M3";
    out.push_back(std::move(r));
  }
  out.push_back(check_exact_values());
  out.push_back(check_oracles(rng, 24, 8));
  out.push_back(check_ruin(12, 32));
  out.push_back(check_domination(rng));
  out.push_back(check_fiber(12));
  out.push_back(check_tiling());
  out.push_back(check_simd(rng));
  out.push_back(check_decay_slope());
  out.push_back(check_monte_carlo(seed, threads));
  return out;
}

nlohmann::json report_json(const std::vector<CheckResult>& checks) {
  nlohmann::json out;
  out["checks"] = nlohmann::json::array();
  for (const auto& c : checks) out["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  out["pass"] = all_pass(checks);
  return out;
}

bool all_pass(const std::vector<CheckResult>& checks) {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

}  // namespace hcb::cli
