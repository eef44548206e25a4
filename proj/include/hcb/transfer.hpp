#pragma once

// Transfer operators of the baker maps acting on exact piecewise-constant
// functions, and the reduced operator on functions of x_c alone.

#include <functional>
#include <vector>

#include "hcb/baker_map.hpp"
#include "hcb/expr.hpp"
#include "hcb/haar.hpp"
#include "hcb/pcfun.hpp"

namespace hcb {

/// Reduced operator P0 = P_alpha + P_beta on functions of x_c, with
///   P_alpha u(x) = w u(Mx - k + 1)            on [(k-1)/M, k/M)
///   P_beta  u(x) = (1-w)/M sum_k u((x + k)/M)  for k = 0..M-1.
/// The neutral map has w = 1/2.
struct ReducedOp {
  unsigned M = 2;
  Rational w{1, 2};

  ReducedOp() = default;
  /// Throws InvalidArgument unless M >= 2 and 0 < w < 1.
  ReducedOp(unsigned M, Rational w);
  static ReducedOp from_params(const BakerParams& params);

  bool is_neutral() const { return w == Rational(1, 2); }
};

PCFun1D p_alpha(const ReducedOp& op, const PCFun1D& f);
PCFun1D p_beta(const ReducedOp& op, const PCFun1D& f);

/// P0^n f, simplified after every step.
PCFun1D p0_apply(const ReducedOp& op, const PCFun1D& f, unsigned n = 1);

/// One application of P0 on Haar coefficients (M = 2):
///   chi_{l,k}   -> w (chi_{l+1,k} + chi_{l+1,k+2^{l-1}})
///   chi_{l+1,k} -> (1-w)/2 chi_{l, k mod 2^{l-1}},  chi_{1,0} -> 0 under P_beta.
HaarExpansion p0_haar_step(const HaarExpansion& e, const ReducedOp& op);
HaarExpansion p0_haar_apply(const HaarExpansion& e, const ReducedOp& op, unsigned n);

struct OscTransitionRow {
  unsigned n;
  unsigned level;
  Rational lhs;  // ||phi_l^{(n+1)}||_*
  Rational rhs;  // w ||phi_{l-1}^{(n)}||_* + (1-w) ||phi_{l+1}^{(n)}||_*, first term absent at l = 1
  bool holds;
  bool equal;
};

/// Level-to-level transfer of the oscillation norms osc_norm_star of the
/// M-adic components of P0^n f, for n < n_max.
std::vector<OscTransitionRow> osc_transition_check(const ReducedOp& op, const PCFun1D& f, unsigned n_max);

/// Coordinates of sum_l a_l s_l in the square waves s_l = sum_k chi_{l,k}.
/// Levels 1..head.size() are stored; deeper levels follow the geometric tail
/// a_l = tail * ratio^{l - head.size() - 1}. The tail is exact for affine
/// observables, whose coordinates are geometric in l.
template <class T>
struct SquareWaveState {
  std::vector<T> head;
  T tail{0};
  T ratio{0};

  /// a_l for l >= 1.
  T coeff(std::size_t level) const;

  static SquareWaveState from_head(std::vector<T> head);
  /// Coordinates of the cell-average limit of x -> slope * x + intercept.
  static SquareWaveState affine(const Rational& slope);
};

/// a'_l = w a_{l-1} + (1-w) a_{l+1} with a_0 = 0. The tail moves one level
/// deeper and its scale picks up ratio * (w / ratio + (1-w) ratio).
template <class T>
SquareWaveState<T> squarewave_step(const SquareWaveState<T>& s, const ReducedOp& op);

/// sum_l a_l b_l, including the geometric tails in closed form.
template <class T>
T squarewave_pairing(const SquareWaveState<T>& a, const SquareWaveState<T>& b);

/// Coordinates of e in the square waves; throws NotInSquareWaveSpan.
SquareWaveState<Rational> to_square_wave(const HaarExpansion& e);

/// The expansion represented by the head of s. Throws InvalidArgument when
/// the tail is nonzero.
HaarExpansion square_wave_expansion(const SquareWaveState<Rational>& s);

/// Exact pushforward u -> u o f^{-1} / |det Df|, which is P when f preserves
/// Lebesgue measure. Output is simplified.
PCFun3D p_full_3d(const BakerParams& params, const PCFun3D& F);
PCFun3D p_full_3d(const BakerParams& params, const PCFun3D& F, unsigned n);

/// Projection onto functions constant in x_c, F -> (x_c-average) tensor 1.
PCFun3D pi0(const PCFun3D& F);

/// Tensor-level operators for M = 2 and a = b = 1/4. p_hat_alpha returns the
/// exact alpha part of P; p_hat_alpha_displayed drops the constant-in-x_c
/// part of its image of the zero component, keeping only the chi_{1,0} term.
TensorComponents p_hat_alpha(const TensorComponents& T);
TensorComponents p_hat_alpha_displayed(const TensorComponents& T);
TensorComponents p_hat_beta(const TensorComponents& T);

TensorComponents add(const TensorComponents& A, const TensorComponents& B);

enum class SplitPart { Star, ZeroOne, OneZero, ZeroZero };

/// Star = (I - pi0) P (I - pi0), ZeroOne = (I - pi0) P pi0,
/// OneZero = pi0 P (I - pi0), ZeroZero = pi0 P pi0.
PCFun3D component_split_apply(const BakerParams& params, SplitPart which, const PCFun3D& F);

struct CompositionCheck {
  bool off_zero = false;  // P^n (I - pi0) = P_*^n + sum_k P^k P_10 P_*^{n-k-1}
  bool on_zero = false;   // P^n pi0 = P_00^n + sum_k P^k P_01 P_00^{n-k-1}
};

CompositionCheck composition_identities(const BakerParams& params, const PCFun3D& F, unsigned n);

using Affine3 = AffineForm;

/// Exact <F, v>.
Rational pair_affine(const PCFun3D& F, const Affine3& v);

struct FiberDecayRow {
  unsigned n;
  Rational value;      // <P^n u, v>
  double bound;        // 2^{-theta n} ||u||_1 ||v||_{C^theta}
  bool pass;
};

/// Requires zero x_s-averages of u on every (x_u, x_c) cell (FiberAverageNonZero)
/// and a Lebesgue-preserving map. For affine v only the x_s-moment
/// m(x_u, x_c) = int u x_s dx_s matters, and it is pushed forward exactly.
/// With theta = 1 the bound comparison is exact.
std::vector<FiberDecayRow> fiber_average_decay_check(const BakerParams& params, const PCFun3D& u, const Affine3& v,
                                                     double theta, unsigned n_max);

}  // namespace hcb
