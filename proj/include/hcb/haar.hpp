#pragma once

// Haar wavelets chi_{l,k}(x) = chi(2^{l-1} x - k) on [0,1], where chi is +1 on
// [0,1/2) and -1 on [1/2,1). An expansion stores c_{l,k} with the represented
// function sum c_{l,k} chi_{l,k}, so c_{l,k} = 2^{l-1} <f, chi_{l,k}>.

#include <compare>
#include <map>
#include <optional>
#include <vector>

#include "hcb/pcfun.hpp"

namespace hcb {

struct HaarIndex {
  int level;  // >= 1
  long k;     // 0 <= k < 2^{level-1}

  auto operator<=>(const HaarIndex&) const = default;
};

/// Throws IndexOutOfRange unless level >= 1 and 0 <= k < 2^{level-1}.
void check_index(const HaarIndex& idx);

using HaarExpansion = std::map<HaarIndex, Rational>;

PCFun1D wavelet(int level, long k);

/// Square wave s_l = sum_k chi_{l,k}.
PCFun1D square_wave(int level);

/// Exact expansion of a zero-mean function with dyadic breakpoints.
/// Throws NonZeroMean or NonDyadicBreakpoints.
HaarExpansion analyze(const PCFun1D& f);

PCFun1D synthesize(const HaarExpansion& e);

/// The raw inner product <f, chi_{l,k}>.
Rational coefficient(const PCFun1D& f, int level, long k);

/// Smallest L with all breakpoints in 2^{-L} Z, if any.
std::optional<unsigned> dyadic_level(const PCFun1D& f);

/// ||phi_l||_inf = max_k |c_{l,k}|, since the level-l wavelets have disjoint supports.
std::map<int, Rational> level_sup_norms(const HaarExpansion& e);

/// <f, g> computed from the expansions of f and g.
Rational pairing(const HaarExpansion& a, const HaarExpansion& b);

/// Coordinates a_l (stored at l-1) in the span of the square waves, when each
/// level's coefficients do not depend on k; nullopt otherwise.
std::optional<std::vector<Rational>> square_wave_coefficients(const HaarExpansion& e);

struct HolderLevelCheck {
  int level;
  Rational sup_norm;
  double bound;
  bool pass;
};

struct HolderReport {
  std::vector<HolderLevelCheck> levels;
  bool all_pass = true;
};

/// Checks ||phi_l||_inf <= 2^{-theta l} * holder_norm level by level. The
/// comparison is exact when theta * l is an integer.
HolderReport holder_bound_check(const PCFun1D& f, double theta, const Rational& holder_norm);

/// -1 if every nonzero coefficient is negative, +1 if every one is positive,
/// 0 for the empty expansion, nullopt for mixed signs.
std::optional<int> uniform_sign(const HaarExpansion& e);

/// Components for the M-adic partitions: component[l-1] lies in H_l, the
/// orthogonal complement of depth l-1 inside depth l functions.
struct LevelComponents {
  unsigned M = 2;
  Rational mean;
  std::vector<PCFun1D> components;
};

/// Throws NotMAdic when some breakpoint is not M-adic.
LevelComponents analyze_general_M(const PCFun1D& f, unsigned M);

PCFun1D synthesize(const LevelComponents& c);

/// 2D factors are functions of (x_u, x_s). The represented 3D function is
/// zero(x_u, x_s) + sum levels[(l,k)](x_u, x_s) * chi_{l,k}(x_c).
struct TensorComponents {
  PCFun2D zero;
  std::map<HaarIndex, PCFun2D> levels;
};

/// Throws NonDyadicBreakpoints when the x_c breakpoints are not dyadic.
TensorComponents tensor_analyze(const PCFun3D& F);
PCFun3D tensor_synthesize(const TensorComponents& T);

/// (x_u, x_c, x_s) -> us(x_u, x_s) * c(x_c).
PCFun3D tensor(const PCFun2D& us, const PCFun1D& c);

/// x_c-average, a function of (x_u, x_s).
PCFun2D center_average(const PCFun3D& F);

/// Average over (x_u, x_s), a function of x_c.
PCFun1D center_marginal(const PCFun3D& F);

/// (x_u, x_c, x_s) -> g(x_c).
PCFun3D lift_center(const PCFun1D& g);

}  // namespace hcb
