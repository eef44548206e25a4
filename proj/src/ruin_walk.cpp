#include "hcb/ruin_walk.hpp"

#include <algorithm>
#include <cmath>

#include "hcb/error.hpp"
#include "hcb/haar.hpp"
#include "hcb/transfer.hpp"

namespace hcb {

template <class T>
RuinState<T> RuinState<T>::delta(long level) {
  if (level < 1) throw Error(ErrorCode::InvalidArgument, "levels start at 1");
  RuinState s;
  s.q.assign(static_cast<std::size_t>(level), T(0));
  s.q.back() = T(1);
  return s;
}

template <class T>
T RuinState<T>::at(long level) const {
  if (level < 1 || static_cast<std::size_t>(level) > q.size()) return T(0);
  return q[static_cast<std::size_t>(level - 1)];
}

template <class T>
T RuinState<T>::survival() const {
  T s(0);
  for (const auto& v : q) s += v;
  return s;
}

template <class T>
RuinState<T> step(const RuinState<T>& s) {
  RuinState<T> out;
  out.n = s.n + 1;
  const std::size_t size = s.q.size();
  out.q.assign(size + 1, T(0));
  const T half = scalar_from<T>(Rational(1, 2));
  for (std::size_t i = 0; i <= size; ++i) {
    const T prev = i >= 1 && i - 1 < size ? s.q[i - 1] : T(0);
    const T next = i + 1 < size ? s.q[i + 1] : T(0);
    out.q[i] = half * prev + half * next;
  }
  while (!out.q.empty() && out.q.back() == 0) out.q.pop_back();
  return out;
}

template struct RuinState<Rational>;
template struct RuinState<double>;
template RuinState<Rational> step<Rational>(const RuinState<Rational>&);
template RuinState<double> step<double>(const RuinState<double>&);

namespace {

mpz_class binomial(long n, long k) {
  mpz_class out(0);
  if (k < 0 || k > n) return out;
  mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return out;
}

void check_args(long l, long lp, long n) {
  if (l < 1 || lp < 1) throw Error(ErrorCode::InvalidArgument, "levels start at 1");
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "n must be non-negative");
}

}  // namespace

Rational transition_prob(long l, long lp, long n) {
  check_args(l, lp, n);
  if ((n - l + lp) % 2 != 0) return Rational(0);
  const long j = (n - l + lp) / 2;
  const long j2 = (n - l - lp) / 2;
  const mpz_class count = binomial(n, j) - binomial(n, j2);
  Rational p(count);
  p /= pow2(n);
  return p;
}

double transition_prob_double(long l, long lp, long n) {
  check_args(l, lp, n);
  if (n < 64) return transition_prob(l, lp, n).get_d();
  if ((n - l + lp) % 2 != 0) return 0.0;
  const long j = (n - l + lp) / 2;
  if (j < 0 || j > n) return 0.0;
  const double log_main = std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(j) + 1) -
                          std::lgamma(static_cast<double>(n - j) + 1) - static_cast<double>(n) * std::log(2.0);
  const double main = std::exp(log_main);
  const long j2 = j - lp;
  if (j2 < 0) return main;
  // C(n, j2) / C(n, j) = prod_{i<lp} (j - i) / (n - j + i + 1).
  double log_ratio = 0.0;
  for (long i = 0; i < lp; ++i) {
    const double num = static_cast<double>(2 * j - 2 * i - n - 1);
    const double den = static_cast<double>(n - j + i + 1);
    log_ratio += std::log1p(num / den);
  }
  return -main * std::expm1(log_ratio);
}

RuinState<Rational> evolve_from(const RuinState<Rational>& q0, long n) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "n must be non-negative");
  RuinState<Rational> s = q0;
  for (long i = 0; i < n; ++i) s = step(s);
  return s;
}

RuinState<Rational> q_via_transition(const RuinState<Rational>& q0, long n) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "n must be non-negative");
  RuinState<Rational> out;
  out.n = q0.n + n;
  const long support = static_cast<long>(q0.q.size());
  out.q.assign(static_cast<std::size_t>(support + n), Rational(0));
  for (long lp = 1; lp <= support; ++lp) {
    const Rational& mass = q0.q[static_cast<std::size_t>(lp - 1)];
    if (mass == 0) continue;
    for (long l = std::max(1L, lp - n); l <= lp + n; ++l) {
      out.q[static_cast<std::size_t>(l - 1)] += mass * transition_prob(lp, l, n);
    }
  }
  while (!out.q.empty() && out.q.back() == 0) out.q.pop_back();
  return out;
}

RatioReport asymptotic_ratio_report(const std::vector<long>& n_list, long l_max) {
  RatioReport report;
  bool first = true;
  for (long n : n_list) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be positive");
    long cap = l_max;
    if (cap == 0) {
      cap = static_cast<long>(std::floor(std::pow(static_cast<double>(n), 0.25)));
      while ((cap + 1) * (cap + 1) * (cap + 1) * (cap + 1) <= n) ++cap;
      while (cap * cap * cap * cap > n) --cap;
    }
    const double scale = std::pow(static_cast<double>(n), 1.5);
    for (long l = 1; l <= cap; ++l) {
      for (long lp = 1; lp <= cap; ++lp) {
        if ((n - l + lp) % 2 != 0) continue;
        const double p = transition_prob_double(l, lp, n);
        const double ratio = p * scale / static_cast<double>(l * lp);
        report.rows.push_back({n, l, lp, p, ratio});
        if (first) {
          report.r_min = report.r_max = ratio;
          first = false;
        } else {
          report.r_min = std::min(report.r_min, ratio);
          report.r_max = std::max(report.r_max, ratio);
        }
      }
    }
  }
  return report;
}

DominationReport domination_check(const PCFun1D& f, unsigned n_max, int l_max) {
  HaarExpansion e = analyze(f);
  if (e.empty()) throw Error(ErrorCode::ZeroFunction, "domination needs a nonzero function");
  DominationReport report;
  const auto norms0 = level_sup_norms(e);
  report.c_phi = 0;
  for (const auto& [level, v] : norms0) report.c_phi += v;
  RuinState<Rational> q;
  q.q.assign(static_cast<std::size_t>(norms0.rbegin()->first), Rational(0));
  for (const auto& [level, v] : norms0) q.q[static_cast<std::size_t>(level - 1)] = v / report.c_phi;

  const ReducedOp op;
  for (unsigned n = 0; n <= n_max; ++n) {
    if (n > 0) {
      e = p0_haar_step(e, op);
      q = step(q);
    }
    const auto norms = level_sup_norms(e);
    int top = std::max<int>(l_max, static_cast<int>(q.q.size()));
    if (!norms.empty()) top = std::max(top, norms.rbegin()->first);
    for (int level = 1; level <= top; ++level) {
      auto it = norms.find(level);
      DominationRow row{n, level, it == norms.end() ? Rational(0) : it->second, report.c_phi * q.at(level), false,
                        false};
      row.holds = row.lhs <= row.rhs;
      row.equal = row.lhs == row.rhs;
      report.all_hold = report.all_hold && row.holds;
      report.all_equal = report.all_equal && row.equal;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

}  // namespace hcb
