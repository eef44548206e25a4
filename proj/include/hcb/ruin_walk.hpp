#pragma once

// Symmetric simple random walk on {1, 2, ...} absorbed at 0.

#include <vector>

#include "hcb/pcfun.hpp"
#include "hcb/rational.hpp"

namespace hcb {

/// q[l-1] is the mass at level l after n steps.
template <class T>
struct RuinState {
  long n = 0;
  std::vector<T> q;

  static RuinState delta(long level);
  T at(long level) const;
  T survival() const;
};

/// q'_l = q_{l-1}/2 + q_{l+1}/2 for l >= 2 and q'_1 = q_2/2.
template <class T>
RuinState<T> step(const RuinState<T>& s);

/// Probability of moving from l to lp in n steps without touching 0:
/// 2^{-n} (C(n, (n-l+lp)/2) - C(n, (n-l-lp)/2)) when n - l + lp is even,
/// binomials with out-of-range lower index read as 0.
Rational transition_prob(long l, long lp, long n);

/// Double evaluation through log-gamma and a log1p product for the
/// difference; exact below n = 64.
double transition_prob_double(long l, long lp, long n);

RuinState<Rational> evolve_from(const RuinState<Rational>& q0, long n);

/// sum over lp of q0_lp p_{lp,l}^{(n)}.
RuinState<Rational> q_via_transition(const RuinState<Rational>& q0, long n);

struct RatioRow {
  long n, l, lp;
  double p;
  double ratio;  // p n^{3/2} / (l lp)
};

struct RatioReport {
  std::vector<RatioRow> rows;
  double r_min = 0;
  double r_max = 0;
};

/// All pairs l, lp <= l_max with n - l + lp even; l_max = 0 means floor(n^{1/4}).
RatioReport asymptotic_ratio_report(const std::vector<long>& n_list, long l_max = 0);

struct DominationRow {
  unsigned n;
  int level;
  Rational lhs;  // ||phi_l^{(n)}||_inf
  Rational rhs;  // C_phi q_l^{(n)}
  bool holds;
  bool equal;
};

struct DominationReport {
  Rational c_phi;
  std::vector<DominationRow> rows;
  bool all_hold = true;
  bool all_equal = true;
};

/// Compares Haar level norms of P0^n f (neutral, M = 2) against the walk
/// started from the normalized level norms of f. Throws ZeroFunction.
/// Levels 1..max(l_max, deepest level reached) are reported.
DominationReport domination_check(const PCFun1D& f, unsigned n_max, int l_max = 0);

}  // namespace hcb
