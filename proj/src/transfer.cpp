#include "hcb/transfer.hpp"

#include <cmath>

#include "hcb/error.hpp"
#include "hcb/simd/kernels.hpp"

namespace hcb {

ReducedOp::ReducedOp(unsigned M_, Rational w_) : M(M_), w(std::move(w_)) {
  if (M < 2) throw Error(ErrorCode::InvalidArgument, "M must be at least 2");
  if (w <= 0 || w >= 1) throw Error(ErrorCode::InvalidArgument, "weight must lie in (0, 1)");
}

ReducedOp ReducedOp::from_params(const BakerParams& params) {
  return ReducedOp(static_cast<unsigned>(params.M()), params.alpha_weight());
}

namespace {

std::vector<AffinePiece<1>> alpha_pieces(const ReducedOp& op) {
  std::vector<AffinePiece<1>> pieces;
  for (unsigned k = 1; k <= op.M; ++k) {
    Rational shift(k - 1, op.M);
    shift.canonicalize();
    pieces.push_back({{Rational(0)}, {Rational(1)}, {Rational(1, op.M)}, {shift}, op.w});
  }
  return pieces;
}

std::vector<AffinePiece<1>> beta_pieces(const ReducedOp& op) {
  std::vector<AffinePiece<1>> pieces;
  const Rational weight = (Rational(1) - op.w) / op.M;
  for (unsigned k = 0; k < op.M; ++k) {
    Rational lo(k, op.M), hi(k + 1, op.M);
    lo.canonicalize();
    hi.canonicalize();
    pieces.push_back({{lo}, {hi}, {Rational(op.M)}, {Rational(-static_cast<long>(k))}, weight});
  }
  return pieces;
}

}  // namespace

PCFun1D p_alpha(const ReducedOp& op, const PCFun1D& f) { return push_pieces<1>(f, alpha_pieces(op)).simplify(); }

PCFun1D p_beta(const ReducedOp& op, const PCFun1D& f) { return push_pieces<1>(f, beta_pieces(op)).simplify(); }

PCFun1D p0_apply(const ReducedOp& op, const PCFun1D& f, unsigned n) {
  auto pieces = alpha_pieces(op);
  auto beta = beta_pieces(op);
  pieces.insert(pieces.end(), beta.begin(), beta.end());
  PCFun1D g = f;
  for (unsigned i = 0; i < n; ++i) g = push_pieces<1>(g, pieces).simplify();
  return g;
}

HaarExpansion p0_haar_step(const HaarExpansion& e, const ReducedOp& op) {
  if (op.M != 2) throw Error(ErrorCode::InvalidArgument, "Haar dynamics need M = 2");
  const Rational beta_weight = (Rational(1) - op.w) / 2;
  HaarExpansion out;
  auto add = [&out](HaarIndex idx, const Rational& c) {
    auto [it, inserted] = out.emplace(idx, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) out.erase(it);
    }
  };
  for (const auto& [idx, c] : e) {
    const long half = 1L << (idx.level - 1);
    const Rational a = op.w * c;
    add({idx.level + 1, idx.k}, a);
    add({idx.level + 1, idx.k + half}, a);
    if (idx.level >= 2) {
      const long lower = 1L << (idx.level - 2);
      add({idx.level - 1, idx.k % lower}, beta_weight * c);
    }
  }
  return out;
}

HaarExpansion p0_haar_apply(const HaarExpansion& e, const ReducedOp& op, unsigned n) {
  HaarExpansion out = e;
  for (unsigned i = 0; i < n; ++i) out = p0_haar_step(out, op);
  return out;
}

namespace {

std::vector<Rational> osc_norms(const PCFun1D& f, unsigned M) {
  const auto comps = analyze_general_M(f, M);
  std::vector<Rational> out;
  for (std::size_t i = 0; i < comps.components.size(); ++i) {
    out.push_back(osc_norm_star(comps.components[i], M, static_cast<unsigned>(i + 1)));
  }
  return out;
}

Rational level_norm(const std::vector<Rational>& norms, std::size_t level) {
  if (level == 0 || level > norms.size()) return Rational(0);
  return norms[level - 1];
}

}  // namespace

std::vector<OscTransitionRow> osc_transition_check(const ReducedOp& op, const PCFun1D& f, unsigned n_max) {
  std::vector<OscTransitionRow> rows;
  PCFun1D g = f;
  auto norms = osc_norms(g, op.M);
  for (unsigned n = 0; n < n_max; ++n) {
    g = p0_apply(op, g);
    auto next = osc_norms(g, op.M);
    const std::size_t top = std::max(next.size(), norms.size() + 1);
    for (std::size_t level = 1; level <= top; ++level) {
      OscTransitionRow row{n, static_cast<unsigned>(level), level_norm(next, level), Rational(0), false, false};
      row.rhs = (Rational(1) - op.w) * level_norm(norms, level + 1);
      if (level >= 2) row.rhs += op.w * level_norm(norms, level - 1);
      row.holds = row.lhs <= row.rhs;
      row.equal = row.lhs == row.rhs;
      rows.push_back(std::move(row));
    }
    norms = std::move(next);
  }
  return rows;
}

template <class T>
T SquareWaveState<T>::coeff(std::size_t level) const {
  if (level == 0) return T(0);
  if (level <= head.size()) return head[level - 1];
  if (tail == 0) return T(0);
  T out = tail;
  for (std::size_t i = head.size() + 1; i < level; ++i) out *= ratio;
  return out;
}

template <class T>
SquareWaveState<T> SquareWaveState<T>::from_head(std::vector<T> h) {
  SquareWaveState s;
  s.head = std::move(h);
  return s;
}

template <class T>
SquareWaveState<T> SquareWaveState<T>::affine(const Rational& slope) {
  SquareWaveState s;
  s.tail = scalar_from<T>(Rational(-slope / 4));
  s.ratio = scalar_from<T>(Rational(1, 2));
  return s;
}

template <class T>
SquareWaveState<T> squarewave_step(const SquareWaveState<T>& s, const ReducedOp& op) {
  if (op.M != 2) throw Error(ErrorCode::InvalidArgument, "square-wave dynamics need M = 2");
  const T w = scalar_from<T>(op.w);
  const T v = scalar_from<T>(Rational(1 - op.w));
  const std::size_t K = s.head.size();
  std::vector<T> in(s.head);
  in.push_back(s.tail);
  in.push_back(s.tail * s.ratio);
  SquareWaveState<T> out;
  out.head.resize(K + 1);
  if constexpr (is_exact_v<T>) {
    for (std::size_t i = 0; i <= K; ++i) {
      const T prev = i == 0 ? T(0) : in[i - 1];
      out.head[i] = w * prev + v * in[i + 1];
    }
  } else {
    simd::kernels().stencil(in.data(), out.head.data(), K + 1, w, v);
  }
  out.ratio = s.ratio;
  if (s.tail != 0) out.tail = s.tail * s.ratio * (w / s.ratio + v * s.ratio);
  return out;
}

namespace {

// a_1..a_count, with the tail expanded by repeated multiplication.
template <class T>
std::vector<T> coefficients(const SquareWaveState<T>& s, std::size_t count) {
  std::vector<T> out(count, T(0));
  std::copy_n(s.head.begin(), std::min(count, s.head.size()), out.begin());
  T t = s.tail;
  for (std::size_t i = s.head.size(); i < count && t != 0; ++i) {
    out[i] = t;
    t *= s.ratio;
  }
  return out;
}

}  // namespace

template <class T>
T squarewave_pairing(const SquareWaveState<T>& a, const SquareWaveState<T>& b) {
  const std::size_t K = std::max(a.head.size(), b.head.size());
  T s(0);
  const std::vector<T> av = coefficients(a, K + 1);
  const std::vector<T> bv = coefficients(b, K + 1);
  if constexpr (is_exact_v<T>) {
    for (std::size_t i = 0; i < K; ++i) s += av[i] * bv[i];
  } else {
    s = simd::kernels().dot(av.data(), bv.data(), K);
  }
  const T& ta = av[K];
  const T& tb = bv[K];
  if (ta != 0 && tb != 0) {
    const T rr = a.ratio * b.ratio;
    if (!(rr < 1 && rr > -1)) throw Error(ErrorCode::InvalidArgument, "tails do not converge");
    s += ta * tb / (T(1) - rr);
  }
  return s;
}

SquareWaveState<Rational> to_square_wave(const HaarExpansion& e) {
  auto coords = square_wave_coefficients(e);
  if (!coords) throw Error(ErrorCode::NotInSquareWaveSpan, "coefficients vary with k inside a level");
  return SquareWaveState<Rational>::from_head(std::move(*coords));
}

HaarExpansion square_wave_expansion(const SquareWaveState<Rational>& s) {
  if (s.tail != 0) throw Error(ErrorCode::InvalidArgument, "state has an infinite tail");
  HaarExpansion out;
  for (std::size_t l = 1; l <= s.head.size(); ++l) {
    if (s.head[l - 1] == 0) continue;
    const long count = 1L << (l - 1);
    for (long k = 0; k < count; ++k) out.emplace(HaarIndex{static_cast<int>(l), k}, s.head[l - 1]);
  }
  return out;
}

template struct SquareWaveState<Rational>;
template struct SquareWaveState<double>;
template SquareWaveState<Rational> squarewave_step<Rational>(const SquareWaveState<Rational>&, const ReducedOp&);
template SquareWaveState<double> squarewave_step<double>(const SquareWaveState<double>&, const ReducedOp&);
template Rational squarewave_pairing<Rational>(const SquareWaveState<Rational>&, const SquareWaveState<Rational>&);
template double squarewave_pairing<double>(const SquareWaveState<double>&, const SquareWaveState<double>&);

namespace {

std::vector<AffinePiece<3>> branch_pieces(const BakerParams& params) {
  std::vector<AffinePiece<3>> pieces;
  for (const auto& br : branches(params)) {
    AffinePiece<3> p;
    p.lo = br.domain.lo;
    p.hi = br.domain.hi;
    p.scale = br.scale;
    p.shift = br.shift;
    p.weight = Rational(1) / (br.scale[0] * br.scale[1] * br.scale[2]);
    pieces.push_back(std::move(p));
  }
  return pieces;
}

}  // namespace

PCFun3D p_full_3d(const BakerParams& params, const PCFun3D& F) {
  return push_pieces<3>(F, branch_pieces(params)).simplify();
}

PCFun3D p_full_3d(const BakerParams& params, const PCFun3D& F, unsigned n) {
  const auto pieces = branch_pieces(params);
  PCFun3D G = F;
  for (unsigned i = 0; i < n; ++i) G = push_pieces<3>(G, pieces).simplify();
  return G;
}

PCFun3D pi0(const PCFun3D& F) { return tensor(center_average(F), PCFun1D::constant(Rational(1))).simplify(); }

namespace {

// The four (x_u, x_s) pieces of the neutral M = 2 map.
AffinePiece<2> piece_A_left() {
  return {{Rational(0), Rational(0)}, {Rational(1, 4), Rational(1)}, {Rational(4), Rational(1, 2)},
          {Rational(0), Rational(0)}, Rational(1)};
}
AffinePiece<2> piece_A_right() {
  return {{Rational(1, 4), Rational(0)}, {Rational(1, 2), Rational(1)}, {Rational(4), Rational(1, 2)},
          {Rational(-1), Rational(0)}, Rational(1)};
}
AffinePiece<2> piece_B_lower() {
  return {{Rational(1, 2), Rational(0)}, {Rational(1), Rational(1)}, {Rational(2), Rational(1, 4)},
          {Rational(-1), Rational(1, 2)}, Rational(1)};
}
AffinePiece<2> piece_B_upper() {
  return {{Rational(1, 2), Rational(0)}, {Rational(1), Rational(1)}, {Rational(2), Rational(1, 4)},
          {Rational(-1), Rational(3, 4)}, Rational(1)};
}

PCFun2D push_one(const PCFun2D& u, const AffinePiece<2>& p) { return push_pieces<2>(u, {p}).simplify(); }

void accumulate(std::map<HaarIndex, PCFun2D>& m, const HaarIndex& idx, const PCFun2D& g) {
  auto it = m.find(idx);
  if (it == m.end()) {
    m.emplace(idx, g);
  } else {
    it->second = (it->second + g).simplify();
  }
}

TensorComponents alpha_impl(const TensorComponents& T, bool exact) {
  TensorComponents out;
  for (const auto& [idx, u] : T.levels) {
    const long half = 1L << (idx.level - 1);
    accumulate(out.levels, {idx.level + 1, idx.k}, push_one(u, piece_A_left()));
    accumulate(out.levels, {idx.level + 1, idx.k + half}, push_one(u, piece_A_right()));
  }
  const PCFun2D left = push_one(T.zero, piece_A_left());
  const PCFun2D right = push_one(T.zero, piece_A_right());
  const Rational half(1, 2);
  accumulate(out.levels, {1, 0}, (half * (left - right)).simplify());
  if (exact) out.zero = (half * (left + right)).simplify();
  return out;
}

}  // namespace

TensorComponents p_hat_alpha(const TensorComponents& T) { return alpha_impl(T, true); }

TensorComponents p_hat_alpha_displayed(const TensorComponents& T) { return alpha_impl(T, false); }

TensorComponents p_hat_beta(const TensorComponents& T) {
  TensorComponents out;
  PCFun2D zero = (push_one(T.zero, piece_B_lower()) + push_one(T.zero, piece_B_upper())).simplify();
  for (const auto& [idx, u] : T.levels) {
    if (idx.level == 1) {
      zero = (zero + push_one(u, piece_B_lower()) - push_one(u, piece_B_upper())).simplify();
      continue;
    }
    const long quarter = 1L << (idx.level - 2);
    if (idx.k < quarter) {
      accumulate(out.levels, {idx.level - 1, idx.k}, push_one(u, piece_B_lower()));
    } else {
      accumulate(out.levels, {idx.level - 1, idx.k - quarter}, push_one(u, piece_B_upper()));
    }
  }
  out.zero = std::move(zero);
  return out;
}

TensorComponents add(const TensorComponents& A, const TensorComponents& B) {
  TensorComponents out;
  out.zero = (A.zero + B.zero).simplify();
  out.levels = A.levels;
  for (const auto& [idx, g] : B.levels) accumulate(out.levels, idx, g);
  return out;
}

PCFun3D component_split_apply(const BakerParams& params, SplitPart which, const PCFun3D& F) {
  const PCFun3D on = pi0(F);
  const PCFun3D input = (which == SplitPart::Star || which == SplitPart::OneZero) ? (F - on).simplify() : on;
  const PCFun3D image = p_full_3d(params, input);
  const PCFun3D image_on = pi0(image);
  if (which == SplitPart::OneZero || which == SplitPart::ZeroZero) return image_on;
  return (image - image_on).simplify();
}

CompositionCheck composition_identities(const BakerParams& params, const PCFun3D& F, unsigned n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "the identities are stated for n >= 1");
  CompositionCheck out;
  auto check = [&](SplitPart inner, SplitPart feed, const PCFun3D& start) {
    // sum_k P^k H_{n-k-1} by Horner, with G_j = inner^j F and H_j = feed(G_j).
    std::vector<PCFun3D> G{F};
    for (unsigned j = 1; j <= n; ++j) G.push_back(component_split_apply(params, inner, G.back()));
    PCFun3D acc = component_split_apply(params, feed, G[0]);
    for (unsigned j = 1; j < n; ++j) acc = (p_full_3d(params, acc) + component_split_apply(params, feed, G[j])).simplify();
    const PCFun3D rhs = (G[n] + acc).simplify();
    return p_full_3d(params, start, n) == rhs;
  };
  const PCFun3D on = pi0(F);
  out.off_zero = check(SplitPart::Star, SplitPart::OneZero, (F - on).simplify());
  out.on_zero = check(SplitPart::ZeroZero, SplitPart::ZeroOne, on);
  return out;
}

Rational pair_affine(const PCFun3D& F, const Affine3& v) {
  const auto& bu = F.breaks(0);
  const auto& bc = F.breaks(1);
  const auto& bs = F.breaks(2);
  Rational s(0);
  std::size_t i = 0;
  for (std::size_t iu = 0; iu + 1 < bu.size(); ++iu) {
    for (std::size_t ic = 0; ic + 1 < bc.size(); ++ic) {
      for (std::size_t is = 0; is + 1 < bs.size(); ++is, ++i) {
        const Rational& val = F.values()[i];
        if (val == 0) continue;
        const Rational vol = (bu[iu + 1] - bu[iu]) * (bc[ic + 1] - bc[ic]) * (bs[is + 1] - bs[is]);
        const Rational center = v.c0 + v.cu * (bu[iu] + bu[iu + 1]) / 2 + v.cc * (bc[ic] + bc[ic + 1]) / 2 +
                                v.cs * (bs[is] + bs[is + 1]) / 2;
        s += val * vol * center;
      }
    }
  }
  return s;
}

std::vector<FiberDecayRow> fiber_average_decay_check(const BakerParams& params, const PCFun3D& u, const Affine3& v,
                                                     double theta, unsigned n_max) {
  if (!params.is_measure_preserving()) throw Error(ErrorCode::NotMeasurePreserving, "a + b must equal 1/M");
  if (!(theta > 0 && theta <= 1)) throw Error(ErrorCode::InvalidArgument, "theta must lie in (0, 1]");
  const std::size_t nu = u.cells(0), nc = u.cells(1), ns = u.cells(2);
  const auto& bs = u.breaks(2);
  std::vector<Rational> moment(nu * nc, Rational(0));
  for (std::size_t iu = 0; iu < nu; ++iu) {
    for (std::size_t ic = 0; ic < nc; ++ic) {
      Rational avg(0);
      Rational first(0);
      for (std::size_t is = 0; is < ns; ++is) {
        const Rational& val = u.values()[(iu * nc + ic) * ns + is];
        avg += val * (bs[is + 1] - bs[is]);
        first += val * (bs[is + 1] * bs[is + 1] - bs[is] * bs[is]) / 2;
      }
      if (avg != 0) throw Error(ErrorCode::FiberAverageNonZero, "u has a nonzero x_s-average on some cell");
      moment[iu * nc + ic] = first;
    }
  }
  PCFun2D m({u.breaks(0), u.breaks(1)}, std::move(moment));
  m = m.simplify();

  std::vector<AffinePiece<2>> pieces;
  for (const auto& br : branches(params)) {
    pieces.push_back({{br.domain.lo[0], br.domain.lo[1]},
                      {br.domain.hi[0], br.domain.hi[1]},
                      {br.scale[0], br.scale[1]},
                      {br.shift[0], br.shift[1]},
                      Rational(br.scale[2] * br.scale[2])});
  }

  const Rational l1 = l1_norm(u);
  const Rational sup = v.sup_abs();
  const Rational grad2 = v.grad_norm_squared();
  const double seminorm = std::sqrt(grad2.get_d()) * std::pow(std::sqrt(3.0), 1.0 - theta);
  const double holder = sup.get_d() + seminorm;

  std::vector<FiberDecayRow> rows;
  for (unsigned n = 0; n <= n_max; ++n) {
    if (n > 0) m = push_pieces<2>(m, pieces).simplify();
    FiberDecayRow row{n, v.cs * m.integral(), 0.0, false};
    row.bound = std::exp2(-theta * n) * l1.get_d() * holder;
    if (l1 == 0) {
      row.pass = row.value == 0;
    } else if (theta == 1.0) {
      const Rational excess = abs(row.value) * pow2(n) / l1 - sup;
      row.pass = excess <= 0 || excess * excess <= grad2;
    } else {
      row.pass = std::abs(row.value.get_d()) <= row.bound;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace hcb
