#include "hcb/haar.hpp"

#include <algorithm>
#include <cmath>

#include "hcb/error.hpp"

namespace hcb {

namespace {

constexpr unsigned kMaxDyadicLevel = 24;

std::size_t pow2_size(unsigned e) { return std::size_t{1} << e; }

std::optional<unsigned> dyadic_level_of(const std::vector<Rational>& breaks) {
  unsigned level = 0;
  for (const auto& b : breaks) {
    auto e = denominator_exponent(b, 2);
    if (!e) return std::nullopt;
    level = std::max(level, *e);
  }
  return level;
}

// In-place Haar pyramid on 2^L cell values. Returns the cell mean and fills
// coefficients by level.
Rational pyramid(std::vector<Rational> v, unsigned L, const std::function<void(int, long, const Rational&)>& emit) {
  for (unsigned level = L; level >= 1; --level) {
    const std::size_t half = pow2_size(level - 1);
    std::vector<Rational> next(half);
    for (std::size_t k = 0; k < half; ++k) {
      Rational c = (v[2 * k] - v[2 * k + 1]) / 2;
      if (c != 0) emit(static_cast<int>(level), static_cast<long>(k), c);
      next[k] = (v[2 * k] + v[2 * k + 1]) / 2;
    }
    v = std::move(next);
  }
  return v[0];
}

unsigned deepest_level(const HaarExpansion& e) {
  unsigned L = 0;
  for (const auto& [idx, c] : e) L = std::max(L, static_cast<unsigned>(idx.level));
  return L;
}

std::vector<Rational> inverse_pyramid(const Rational& mean, unsigned L,
                                      const std::function<Rational(int, long)>& coeff) {
  std::vector<Rational> v(1, mean);
  for (unsigned level = 1; level <= L; ++level) {
    std::vector<Rational> next(2 * v.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
      const Rational c = coeff(static_cast<int>(level), static_cast<long>(k));
      next[2 * k] = v[k] + c;
      next[2 * k + 1] = v[k] - c;
    }
    v = std::move(next);
  }
  return v;
}

}  // namespace

void check_index(const HaarIndex& idx) {
  if (idx.level < 1 || idx.level > 62 || idx.k < 0 || idx.k >= (1L << (idx.level - 1))) {
    throw Error(ErrorCode::IndexOutOfRange,
                "invalid Haar index (" + std::to_string(idx.level) + ", " + std::to_string(idx.k) + ")");
  }
}

PCFun1D wavelet(int level, long k) {
  check_index({level, k});
  const Rational width = pow2(-(level - 1));
  const Rational lo = width * k;
  const Rational mid = lo + width / 2;
  const Rational hi = lo + width;
  std::vector<Rational> b{Rational(0)};
  std::vector<Rational> v;
  if (lo > 0) {
    b.push_back(lo);
    v.push_back(Rational(0));
  }
  b.push_back(mid);
  v.push_back(Rational(1));
  b.push_back(hi);
  v.push_back(Rational(-1));
  if (hi < 1) {
    b.push_back(Rational(1));
    v.push_back(Rational(0));
  }
  return PCFun1D(std::move(b), std::move(v));
}

PCFun1D square_wave(int level) {
  check_index({level, 0});
  const std::size_t cells = pow2_size(static_cast<unsigned>(level));
  std::vector<Rational> v(cells);
  for (std::size_t i = 0; i < cells; ++i) v[i] = (i % 2 == 0) ? 1 : -1;
  return PCFun1D(uniform_breaks(cells), std::move(v));
}

std::optional<unsigned> dyadic_level(const PCFun1D& f) { return dyadic_level_of(f.simplify().breaks()); }

HaarExpansion analyze(const PCFun1D& f) {
  if (f.integral() != 0) throw Error(ErrorCode::NonZeroMean, "Haar analysis needs a zero-mean function");
  const PCFun1D s = f.simplify();
  const auto L = dyadic_level_of(s.breaks());
  if (!L) throw Error(ErrorCode::NonDyadicBreakpoints, "breakpoints are not dyadic");
  if (*L > kMaxDyadicLevel) throw Error(ErrorCode::InvalidArgument, "dyadic level too deep");
  HaarExpansion out;
  if (*L == 0) return out;
  pyramid(s.resample({uniform_breaks(pow2_size(*L))}), *L,
          [&out](int level, long k, const Rational& c) { out.emplace(HaarIndex{level, k}, c); });
  return out;
}

PCFun1D synthesize(const HaarExpansion& e) {
  const unsigned L = deepest_level(e);
  if (L == 0) return PCFun1D();
  auto values = inverse_pyramid(Rational(0), L, [&e](int level, long k) {
    auto it = e.find({level, k});
    return it == e.end() ? Rational(0) : it->second;
  });
  auto breaks = uniform_breaks(values.size());
  return PCFun1D(std::move(breaks), std::move(values)).simplify();
}

Rational coefficient(const PCFun1D& f, int level, long k) { return inner_product(f, wavelet(level, k)); }

std::map<int, Rational> level_sup_norms(const HaarExpansion& e) {
  std::map<int, Rational> out;
  for (const auto& [idx, c] : e) {
    Rational a = abs(c);
    auto [it, inserted] = out.emplace(idx.level, a);
    if (!inserted && a > it->second) it->second = a;
  }
  return out;
}

Rational pairing(const HaarExpansion& a, const HaarExpansion& b) {
  const HaarExpansion& small = a.size() <= b.size() ? a : b;
  const HaarExpansion& large = a.size() <= b.size() ? b : a;
  Rational s(0);
  for (const auto& [idx, c] : small) {
    auto it = large.find(idx);
    if (it != large.end()) s += c * it->second * pow2(-(idx.level - 1));
  }
  return s;
}

std::optional<std::vector<Rational>> square_wave_coefficients(const HaarExpansion& e) {
  const unsigned L = deepest_level(e);
  std::vector<Rational> out(L, Rational(0));
  std::vector<std::size_t> counts(L, 0);
  for (const auto& [idx, c] : e) {
    const std::size_t i = static_cast<std::size_t>(idx.level - 1);
    if (counts[i] > 0 && out[i] != c) return std::nullopt;
    out[i] = c;
    ++counts[i];
  }
  for (std::size_t i = 0; i < L; ++i) {
    if (counts[i] != 0 && counts[i] != pow2_size(static_cast<unsigned>(i))) return std::nullopt;
  }
  return out;
}

HolderReport holder_bound_check(const PCFun1D& f, double theta, const Rational& holder_norm) {
  HolderReport report;
  const auto norms = level_sup_norms(analyze(f));
  for (const auto& [level, sup] : norms) {
    HolderLevelCheck row{level, sup, 0.0, false};
    const double exponent = theta * level;
    if (exponent == std::floor(exponent) && std::abs(exponent) < 1e6) {
      const Rational bound = pow2(-static_cast<long>(exponent)) * holder_norm;
      row.bound = bound.get_d();
      row.pass = sup <= bound;
    } else {
      row.bound = std::exp2(-exponent) * holder_norm.get_d();
      row.pass = sup.get_d() <= row.bound;
    }
    report.all_pass = report.all_pass && row.pass;
    report.levels.push_back(std::move(row));
  }
  return report;
}

std::optional<int> uniform_sign(const HaarExpansion& e) {
  int sign = 0;
  for (const auto& [idx, c] : e) {
    const int s = sgn(c);
    if (s == 0) continue;
    if (sign == 0) {
      sign = s;
    } else if (s != sign) {
      return std::nullopt;
    }
  }
  return sign;
}

LevelComponents analyze_general_M(const PCFun1D& f, unsigned M) {
  if (M < 2) throw Error(ErrorCode::InvalidArgument, "M must be at least 2");
  const PCFun1D s = f.simplify();
  unsigned L = 0;
  for (const auto& b : s.breaks()) {
    auto e = denominator_exponent(b, M);
    if (!e) throw Error(ErrorCode::NotMAdic, "breakpoint " + to_string(b) + " is not M-adic");
    L = std::max(L, *e);
  }
  LevelComponents out;
  out.M = M;
  out.mean = s.integral();
  std::size_t cells = 1;
  for (unsigned i = 0; i < L; ++i) cells *= M;
  if (cells > (std::size_t{1} << kMaxDyadicLevel)) throw Error(ErrorCode::InvalidArgument, "M-adic depth too large");
  // Conditional expectations from the finest depth upward.
  std::vector<std::vector<Rational>> expectations(L + 1);
  expectations[L] = s.resample({uniform_breaks(cells)});
  for (unsigned level = L; level >= 1; --level) {
    const auto& fine = expectations[level];
    std::vector<Rational> coarse(fine.size() / M);
    for (std::size_t i = 0; i < coarse.size(); ++i) {
      Rational acc(0);
      for (unsigned j = 0; j < M; ++j) acc += fine[i * M + j];
      coarse[i] = acc / M;
    }
    expectations[level - 1] = std::move(coarse);
  }
  for (unsigned level = 1; level <= L; ++level) {
    const auto& fine = expectations[level];
    const auto& coarse = expectations[level - 1];
    std::vector<Rational> v(fine.size());
    for (std::size_t i = 0; i < fine.size(); ++i) v[i] = fine[i] - coarse[i / M];
    out.components.push_back(PCFun1D(uniform_breaks(fine.size()), std::move(v)).simplify());
  }
  return out;
}

PCFun1D synthesize(const LevelComponents& c) {
  PCFun1D f = PCFun1D::constant(c.mean);
  for (const auto& comp : c.components) f += comp;
  return f.simplify();
}

TensorComponents tensor_analyze(const PCFun3D& F) {
  const PCFun3D s = F.simplify();
  const auto L = dyadic_level_of(s.breaks(1));
  if (!L) throw Error(ErrorCode::NonDyadicBreakpoints, "x_c breakpoints are not dyadic");
  if (*L > kMaxDyadicLevel) throw Error(ErrorCode::InvalidArgument, "dyadic level too deep");
  const std::size_t nc = pow2_size(*L);
  const auto vals = s.resample({s.breaks(0), uniform_breaks(nc), s.breaks(2)});
  const std::size_t nu = s.cells(0);
  const std::size_t ns = s.cells(2);
  const PCFun2D::Grid us_grid{s.breaks(0), s.breaks(2)};

  std::vector<Rational> zero(nu * ns);
  std::map<HaarIndex, std::vector<Rational>> levels;
  for (std::size_t iu = 0; iu < nu; ++iu) {
    for (std::size_t is = 0; is < ns; ++is) {
      std::vector<Rational> column(nc);
      for (std::size_t ic = 0; ic < nc; ++ic) column[ic] = vals[(iu * nc + ic) * ns + is];
      const std::size_t cell = iu * ns + is;
      zero[cell] = pyramid(std::move(column), *L, [&](int level, long k, const Rational& c) {
        auto& slot = levels[HaarIndex{level, k}];
        if (slot.empty()) slot.assign(nu * ns, Rational(0));
        slot[cell] = c;
      });
    }
  }
  TensorComponents out;
  out.zero = PCFun2D(us_grid, std::move(zero)).simplify();
  for (auto& [idx, v] : levels) out.levels.emplace(idx, PCFun2D(us_grid, std::move(v)).simplify());
  return out;
}

PCFun3D tensor_synthesize(const TensorComponents& T) {
  PCFun2D::Grid grid = T.zero.grid();
  unsigned L = 0;
  for (const auto& [idx, g] : T.levels) {
    grid = common_grid<2>(grid, g.grid());
    L = std::max(L, static_cast<unsigned>(idx.level));
  }
  const std::size_t nu = grid[0].size() - 1;
  const std::size_t ns = grid[1].size() - 1;
  const std::size_t nc = pow2_size(L);
  const auto zero = T.zero.resample(grid);
  std::map<HaarIndex, std::vector<Rational>> level_vals;
  for (const auto& [idx, g] : T.levels) level_vals.emplace(idx, g.resample(grid));

  std::vector<Rational> out(nu * nc * ns);
  for (std::size_t iu = 0; iu < nu; ++iu) {
    for (std::size_t is = 0; is < ns; ++is) {
      const std::size_t cell = iu * ns + is;
      auto column = inverse_pyramid(zero[cell], L, [&](int level, long k) {
        auto it = level_vals.find({level, k});
        return it == level_vals.end() ? Rational(0) : it->second[cell];
      });
      for (std::size_t ic = 0; ic < nc; ++ic) out[(iu * nc + ic) * ns + is] = column[ic];
    }
  }
  return PCFun3D({grid[0], uniform_breaks(nc), grid[1]}, std::move(out)).simplify();
}

PCFun3D tensor(const PCFun2D& us, const PCFun1D& c) {
  const std::size_t nu = us.cells(0);
  const std::size_t ns = us.cells(1);
  const std::size_t nc = c.cells();
  std::vector<Rational> out(nu * nc * ns);
  for (std::size_t iu = 0; iu < nu; ++iu) {
    for (std::size_t ic = 0; ic < nc; ++ic) {
      for (std::size_t is = 0; is < ns; ++is) {
        out[(iu * nc + ic) * ns + is] = us.values()[iu * ns + is] * c.values()[ic];
      }
    }
  }
  return PCFun3D({us.breaks(0), c.breaks(), us.breaks(1)}, std::move(out));
}

PCFun2D center_average(const PCFun3D& F) {
  const std::size_t nu = F.cells(0);
  const std::size_t nc = F.cells(1);
  const std::size_t ns = F.cells(2);
  const auto& b = F.breaks(1);
  std::vector<Rational> out(nu * ns, Rational(0));
  for (std::size_t iu = 0; iu < nu; ++iu) {
    for (std::size_t ic = 0; ic < nc; ++ic) {
      const Rational w = b[ic + 1] - b[ic];
      for (std::size_t is = 0; is < ns; ++is) {
        const Rational& v = F.values()[(iu * nc + ic) * ns + is];
        if (v != 0) out[iu * ns + is] += w * v;
      }
    }
  }
  return PCFun2D({F.breaks(0), F.breaks(2)}, std::move(out));
}

PCFun1D center_marginal(const PCFun3D& F) {
  const std::size_t nu = F.cells(0);
  const std::size_t nc = F.cells(1);
  const std::size_t ns = F.cells(2);
  const auto& bu = F.breaks(0);
  const auto& bs = F.breaks(2);
  std::vector<Rational> out(nc, Rational(0));
  for (std::size_t iu = 0; iu < nu; ++iu) {
    const Rational wu = bu[iu + 1] - bu[iu];
    for (std::size_t ic = 0; ic < nc; ++ic) {
      for (std::size_t is = 0; is < ns; ++is) {
        const Rational& v = F.values()[(iu * nc + ic) * ns + is];
        if (v != 0) out[ic] += wu * (bs[is + 1] - bs[is]) * v;
      }
    }
  }
  return PCFun1D(F.breaks(1), std::move(out));
}

PCFun3D lift_center(const PCFun1D& g) { return tensor(PCFun2D::constant(Rational(1)), g); }

}  // namespace hcb
