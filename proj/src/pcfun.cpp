#include "hcb/pcfun.hpp"

#include <algorithm>

#include "hcb/error.hpp"

namespace hcb {

namespace {

using Breaks = std::vector<Rational>;

void validate_breaks(const Breaks& b) {
  if (b.size() < 2) throw Error(ErrorCode::InvalidArgument, "a grid needs at least two breakpoints");
  if (b.front() != 0 || b.back() != 1) throw Error(ErrorCode::InvalidArgument, "breakpoints must start at 0 and end at 1");
  for (std::size_t i = 1; i < b.size(); ++i) {
    if (!(b[i - 1] < b[i])) throw Error(ErrorCode::InvalidArgument, "breakpoints must be strictly increasing");
  }
}

Breaks merge_breaks(const Breaks& a, const Breaks& b) {
  Breaks out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// For each cell of fine, the index of the coarse cell containing it.
std::vector<std::size_t> cell_map(const Breaks& coarse, const Breaks& fine) {
  std::vector<std::size_t> out(fine.size() - 1);
  std::size_t i = 0;
  const std::size_t last = coarse.size() - 2;
  for (std::size_t j = 0; j + 1 < fine.size(); ++j) {
    while (i < last && coarse[i + 1] <= fine[j]) ++i;
    out[j] = i;
  }
  return out;
}

template <std::size_t D>
std::array<std::size_t, D> strides_of(const std::array<std::size_t, D>& shape) {
  std::array<std::size_t, D> s{};
  std::size_t acc = 1;
  for (std::size_t d = D; d-- > 0;) {
    s[d] = acc;
    acc *= shape[d];
  }
  return s;
}

template <std::size_t D>
std::array<std::size_t, D> shape_of(const std::array<Breaks, D>& g) {
  std::array<std::size_t, D> s{};
  for (std::size_t d = 0; d < D; ++d) s[d] = g[d].size() - 1;
  return s;
}

struct AxisOffsets {
  std::vector<std::size_t> out;
  std::vector<std::size_t> src;
};

// Visits the product of per-axis (out, src) offset lists.
template <std::size_t D, class Fn>
void for_each_cell(const std::array<AxisOffsets, D>& axes, Fn&& fn) {
  for (const auto& a : axes) {
    if (a.out.empty()) return;
  }
  std::array<std::size_t, D> idx{};
  std::size_t out = 0;
  std::size_t src = 0;
  for (std::size_t d = 0; d < D; ++d) {
    out += axes[d].out[0];
    src += axes[d].src[0];
  }
  while (true) {
    fn(out, src);
    std::size_t d = D;
    while (d-- > 0) {
      out -= axes[d].out[idx[d]];
      src -= axes[d].src[idx[d]];
      if (++idx[d] < axes[d].out.size()) {
        out += axes[d].out[idx[d]];
        src += axes[d].src[idx[d]];
        break;
      }
      idx[d] = 0;
      out += axes[d].out[0];
      src += axes[d].src[0];
      if (d == 0) return;
    }
  }
}

template <std::size_t D>
std::vector<Rational> cell_volumes(const std::array<Breaks, D>& g) {
  std::vector<Rational> vols(1, Rational(1));
  for (std::size_t d = 0; d < D; ++d) {
    std::vector<Rational> next;
    next.reserve(vols.size() * (g[d].size() - 1));
    for (const auto& v : vols) {
      for (std::size_t j = 0; j + 1 < g[d].size(); ++j) next.push_back(v * (g[d][j + 1] - g[d][j]));
    }
    vols = std::move(next);
  }
  return vols;
}

std::size_t locate(const Breaks& b, const Rational& x) {
  auto it = std::upper_bound(b.begin(), b.end(), x);
  std::size_t i = static_cast<std::size_t>(it - b.begin());
  if (i == 0) return 0;
  return std::min(i - 1, b.size() - 2);
}

std::size_t locate(const Breaks& b, double x) {
  auto it = std::upper_bound(b.begin(), b.end(), x, [](double v, const Rational& q) { return v < q.get_d(); });
  std::size_t i = static_cast<std::size_t>(it - b.begin());
  if (i == 0) return 0;
  return std::min(i - 1, b.size() - 2);
}

}  // namespace

template <std::size_t D>
PCFun<D>::PCFun() {
  for (auto& b : breaks_) b = {Rational(0), Rational(1)};
  values_.assign(1, Rational(0));
}

template <std::size_t D>
PCFun<D>::PCFun(Grid breaks, std::vector<Rational> values) : breaks_(std::move(breaks)), values_(std::move(values)) {
  std::size_t n = 1;
  for (auto& b : breaks_) {
    for (auto& q : b) q.canonicalize();
    validate_breaks(b);
    n *= b.size() - 1;
  }
  if (values_.size() != n) throw Error(ErrorCode::DimensionMismatch, "value count does not match the grid");
  for (auto& v : values_) v.canonicalize();
}

template <std::size_t D>
PCFun<D> PCFun<D>::constant(const Rational& c) {
  PCFun f;
  f.values_[0] = c;
  return f;
}

template <std::size_t D>
std::size_t PCFun<D>::flat(const Index& idx) const {
  std::size_t out = 0;
  for (std::size_t d = 0; d < D; ++d) out = out * cells(d) + idx[d];
  return out;
}

template <std::size_t D>
Rational PCFun<D>::value_at(const Coord& x) const {
  Index idx{};
  for (std::size_t d = 0; d < D; ++d) {
    if (x[d] < 0 || x[d] > 1) return Rational(0);
    idx[d] = locate(breaks_[d], x[d]);
  }
  return at(idx);
}

template <std::size_t D>
double PCFun<D>::value_at(const std::array<double, D>& x) const {
  Index idx{};
  for (std::size_t d = 0; d < D; ++d) {
    if (x[d] < 0.0 || x[d] > 1.0) return 0.0;
    idx[d] = locate(breaks_[d], x[d]);
  }
  return at(idx).get_d();
}

template <std::size_t D>
std::vector<Rational> PCFun<D>::resample(const Grid& finer) const {
  std::array<AxisOffsets, D> axes;
  const auto out_strides = strides_of<D>(shape_of<D>(finer));
  const auto src_strides = strides_of<D>(shape_of<D>(breaks_));
  std::size_t total = 1;
  for (std::size_t d = 0; d < D; ++d) {
    const auto map = cell_map(breaks_[d], finer[d]);
    total *= map.size();
    axes[d].out.resize(map.size());
    axes[d].src.resize(map.size());
    for (std::size_t j = 0; j < map.size(); ++j) {
      axes[d].out[j] = j * out_strides[d];
      axes[d].src[j] = map[j] * src_strides[d];
    }
  }
  std::vector<Rational> out(total);
  for_each_cell<D>(axes, [&](std::size_t o, std::size_t s) { out[o] = values_[s]; });
  return out;
}

template <std::size_t D>
PCFun<D> PCFun<D>::refine(const Grid& extra) const {
  Grid g;
  for (std::size_t d = 0; d < D; ++d) {
    Breaks e;
    for (const auto& q : extra[d]) {
      if (q > 0 && q < 1) e.push_back(q);
    }
    std::sort(e.begin(), e.end());
    g[d] = merge_breaks(breaks_[d], e);
  }
  auto vals = resample(g);
  return PCFun(std::move(g), std::move(vals));
}

template <std::size_t D>
PCFun<D> PCFun<D>::simplify() const {
  Grid g = breaks_;
  std::vector<Rational> vals = values_;
  for (std::size_t d = 0; d < D; ++d) {
    const auto shape = shape_of<D>(g);
    const std::size_t inner = strides_of<D>(shape)[d];
    const std::size_t n = shape[d];
    const std::size_t outer = vals.size() / (n * inner);
    std::vector<bool> keep(n, true);
    for (std::size_t i = 1; i < n; ++i) {
      bool same = true;
      for (std::size_t o = 0; o < outer && same; ++o) {
        const std::size_t base = o * n * inner;
        for (std::size_t r = 0; r < inner; ++r) {
          if (vals[base + i * inner + r] != vals[base + (i - 1) * inner + r]) {
            same = false;
            break;
          }
        }
      }
      keep[i] = !same;
    }
    if (std::all_of(keep.begin(), keep.end(), [](bool k) { return k; })) continue;
    Breaks nb;
    for (std::size_t i = 0; i < n; ++i) {
      if (keep[i]) nb.push_back(g[d][i]);
    }
    nb.push_back(Rational(1));
    std::vector<Rational> nv;
    nv.reserve(outer * nb.size() * inner);
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t i = 0; i < n; ++i) {
        if (!keep[i]) continue;
        const std::size_t base = o * n * inner + i * inner;
        for (std::size_t r = 0; r < inner; ++r) nv.push_back(vals[base + r]);
      }
    }
    g[d] = std::move(nb);
    vals = std::move(nv);
  }
  PCFun out;
  out.breaks_ = std::move(g);
  out.values_ = std::move(vals);
  return out;
}

template <std::size_t D>
Rational PCFun<D>::integral() const {
  const auto vols = cell_volumes<D>(breaks_);
  Rational s(0);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] != 0) s += values_[i] * vols[i];
  }
  return s;
}

template <std::size_t D>
PCFun<D>& PCFun<D>::operator+=(const PCFun& g) {
  *this = combine<D>(*this, g, [](const Rational& x, const Rational& y) { return Rational(x + y); });
  return *this;
}

template <std::size_t D>
PCFun<D>& PCFun<D>::operator-=(const PCFun& g) {
  *this = combine<D>(*this, g, [](const Rational& x, const Rational& y) { return Rational(x - y); });
  return *this;
}

template <std::size_t D>
PCFun<D>& PCFun<D>::operator*=(const Rational& s) {
  for (auto& v : values_) v *= s;
  return *this;
}

template <std::size_t D>
bool PCFun<D>::operator==(const PCFun& g) const {
  const auto grid = common_grid<D>(breaks_, g.breaks_);
  return resample(grid) == g.resample(grid);
}

template <std::size_t D>
typename PCFun<D>::Grid common_grid(const typename PCFun<D>::Grid& a, const typename PCFun<D>::Grid& b) {
  typename PCFun<D>::Grid g;
  for (std::size_t d = 0; d < D; ++d) g[d] = merge_breaks(a[d], b[d]);
  return g;
}

template <std::size_t D>
PCFun<D> combine(const PCFun<D>& f, const PCFun<D>& g,
                 const std::function<Rational(const Rational&, const Rational&)>& op) {
  auto grid = common_grid<D>(f.grid(), g.grid());
  const auto vf = f.resample(grid);
  const auto vg = g.resample(grid);
  std::vector<Rational> out(vf.size());
  for (std::size_t i = 0; i < vf.size(); ++i) out[i] = op(vf[i], vg[i]);
  return PCFun<D>(std::move(grid), std::move(out));
}

template <std::size_t D>
Rational inner_product(const PCFun<D>& f, const PCFun<D>& g) {
  const auto grid = common_grid<D>(f.grid(), g.grid());
  const auto vf = f.resample(grid);
  const auto vg = g.resample(grid);
  const auto vols = cell_volumes<D>(grid);
  Rational s(0);
  for (std::size_t i = 0; i < vf.size(); ++i) {
    if (vf[i] != 0 && vg[i] != 0) s += vf[i] * vg[i] * vols[i];
  }
  return s;
}

template <std::size_t D>
Rational mean(const PCFun<D>& f) {
  return f.integral();
}

template <std::size_t D>
PCFun<D> project_zero_mean(const PCFun<D>& f) {
  const Rational m = f.integral();
  std::vector<Rational> vals = f.values();
  for (auto& v : vals) v -= m;
  return PCFun<D>(f.grid(), std::move(vals));
}

template <std::size_t D>
PCFun<D> axpy(const Rational& s, const PCFun<D>& f, const PCFun<D>& g) {
  return combine<D>(f, g, [&s](const Rational& x, const Rational& y) { return Rational(s * x + y); });
}

template <std::size_t D>
Rational l1_norm(const PCFun<D>& f) {
  const auto vols = cell_volumes<D>(f.grid());
  Rational s(0);
  for (std::size_t i = 0; i < vols.size(); ++i) s += abs(f.values()[i]) * vols[i];
  return s;
}

template <std::size_t D>
Rational sup_norm(const PCFun<D>& f) {
  Rational m(0);
  for (const auto& v : f.values()) {
    Rational a = abs(v);
    if (a > m) m = a;
  }
  return m;
}

template <std::size_t D>
PCFun<D> push_pieces(const PCFun<D>& F, const std::vector<AffinePiece<D>>& pieces) {
  struct AxisPlan {
    Rational src_lo, src_hi, img_lo, img_hi;
  };
  std::vector<std::array<AxisPlan, D>> plans;
  std::vector<const AffinePiece<D>*> active;
  typename PCFun<D>::Grid grid;
  for (auto& g : grid) g = {Rational(0), Rational(1)};
  std::array<Breaks, D> candidates;

  for (const auto& p : pieces) {
    std::array<AxisPlan, D> plan;
    bool empty = p.weight == 0;
    for (std::size_t d = 0; d < D && !empty; ++d) {
      if (p.scale[d] <= 0) throw Error(ErrorCode::InvalidArgument, "piece scales must be positive");
      AxisPlan& a = plan[d];
      a.src_lo = std::max(p.lo[d], Rational(0));
      a.src_hi = std::min(p.hi[d], Rational(1));
      a.img_lo = std::max(Rational(p.scale[d] * a.src_lo + p.shift[d]), Rational(0));
      a.img_hi = std::min(Rational(p.scale[d] * a.src_hi + p.shift[d]), Rational(1));
      if (!(a.img_lo < a.img_hi)) {
        empty = true;
        break;
      }
      // Clip the source range to the part that lands in the cube.
      a.src_lo = (a.img_lo - p.shift[d]) / p.scale[d];
      a.src_hi = (a.img_hi - p.shift[d]) / p.scale[d];
    }
    if (empty) continue;
    for (std::size_t d = 0; d < D; ++d) {
      const AxisPlan& a = plan[d];
      candidates[d].push_back(a.img_lo);
      candidates[d].push_back(a.img_hi);
      const Breaks& b = F.breaks(d);
      auto it = std::upper_bound(b.begin(), b.end(), a.src_lo);
      for (; it != b.end() && *it < a.src_hi; ++it) candidates[d].push_back(p.scale[d] * *it + p.shift[d]);
    }
    plans.push_back(plan);
    active.push_back(&p);
  }
  for (std::size_t d = 0; d < D; ++d) {
    std::sort(candidates[d].begin(), candidates[d].end());
    grid[d] = merge_breaks(grid[d], candidates[d]);
  }

  const auto out_strides = strides_of<D>(shape_of<D>(grid));
  const auto src_strides = strides_of<D>(shape_of<D>(F.grid()));
  std::size_t total = 1;
  for (std::size_t d = 0; d < D; ++d) total *= grid[d].size() - 1;
  std::vector<Rational> out(total, Rational(0));

  for (std::size_t pi = 0; pi < active.size(); ++pi) {
    const AffinePiece<D>& p = *active[pi];
    std::array<AxisOffsets, D> axes;
    for (std::size_t d = 0; d < D; ++d) {
      const AxisPlan& a = plans[pi][d];
      const Breaks& G = grid[d];
      const Breaks& b = F.breaks(d);
      std::size_t j = static_cast<std::size_t>(std::lower_bound(G.begin(), G.end(), a.img_lo) - G.begin());
      std::size_t i = locate(b, a.src_lo);
      const std::size_t last = b.size() - 2;
      Rational next_image = i < last ? Rational(p.scale[d] * b[i + 1] + p.shift[d]) : Rational(2);
      for (; j + 1 < G.size() && G[j] < a.img_hi; ++j) {
        while (i < last && next_image <= G[j]) {
          ++i;
          next_image = i < last ? Rational(p.scale[d] * b[i + 1] + p.shift[d]) : Rational(2);
        }
        axes[d].out.push_back(j * out_strides[d]);
        axes[d].src.push_back(i * src_strides[d]);
      }
    }
    const auto& vals = F.values();
    if (p.weight == 1) {
      for_each_cell<D>(axes, [&](std::size_t o, std::size_t s) {
        if (vals[s] != 0) out[o] += vals[s];
      });
    } else {
      for_each_cell<D>(axes, [&](std::size_t o, std::size_t s) {
        if (vals[s] != 0) out[o] += p.weight * vals[s];
      });
    }
  }
  return PCFun<D>(std::move(grid), std::move(out));
}

std::vector<Rational> uniform_breaks(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "grid needs at least one cell");
  std::vector<Rational> b(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    b[i] = Rational(static_cast<unsigned long>(i), static_cast<unsigned long>(n));
    b[i].canonicalize();
  }
  return b;
}

PCFun1D from_affine(const Rational& slope, const Rational& intercept, unsigned level, unsigned base) {
  if (base < 2) throw Error(ErrorCode::InvalidArgument, "base must be at least 2");
  mpz_class n;
  mpz_ui_pow_ui(n.get_mpz_t(), base, level);
  if (n > 1 << 24) throw Error(ErrorCode::InvalidArgument, "grid too fine");
  const std::size_t cells = n.get_ui();
  std::vector<Rational> values(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    Rational mid(2 * static_cast<unsigned long>(i) + 1, 2 * static_cast<unsigned long>(cells));
    mid.canonicalize();
    values[i] = slope * mid + intercept;
  }
  return PCFun1D(uniform_breaks(cells), std::move(values));
}

bool is_m_adic_measurable(const PCFun1D& f, unsigned M, unsigned level) {
  const PCFun1D s = f.simplify();
  mpz_class n;
  mpz_ui_pow_ui(n.get_mpz_t(), M, level);
  for (const auto& b : s.breaks()) {
    Rational scaled = b * n;
    if (scaled.get_den() != 1) return false;
  }
  return true;
}

namespace {

std::vector<Rational> values_on_m_adic_grid(const PCFun1D& f, unsigned M, unsigned level) {
  if (level == 0) throw Error(ErrorCode::InvalidArgument, "level must be at least 1");
  if (!is_m_adic_measurable(f, M, level)) {
    throw Error(ErrorCode::NotInK, "function is not constant on the M-adic cells of the requested depth");
  }
  mpz_class n;
  mpz_ui_pow_ui(n.get_mpz_t(), M, level);
  if (n > 1 << 24) throw Error(ErrorCode::InvalidArgument, "grid too fine");
  return f.resample({uniform_breaks(n.get_ui())});
}

}  // namespace

Rational osc_norm_star(const PCFun1D& f, unsigned M, unsigned level) {
  const auto vals = values_on_m_adic_grid(f, M, level);
  Rational best(0);
  for (std::size_t start = 0; start < vals.size(); start += M) {
    const auto [lo, hi] = std::minmax_element(vals.begin() + static_cast<long>(start),
                                              vals.begin() + static_cast<long>(start + M));
    Rational osc = *hi - *lo;
    if (osc > best) best = osc;
  }
  return best;
}

bool is_xi_strictly_increasing(const PCFun1D& f, unsigned M, unsigned level) {
  if (level == 0 || !is_m_adic_measurable(f, M, level)) return false;
  const auto vals = values_on_m_adic_grid(f, M, level);
  for (std::size_t start = 0; start < vals.size(); start += M) {
    for (std::size_t i = start + 1; i < start + M; ++i) {
      if (!(vals[i - 1] < vals[i])) return false;
    }
  }
  return true;
}

#define HCB_PCFUN_INSTANTIATE(D)                                                                            \
  template class PCFun<D>;                                                                                  \
  template PCFun<D>::Grid common_grid<D>(const PCFun<D>::Grid&, const PCFun<D>::Grid&);                     \
  template PCFun<D> combine<D>(const PCFun<D>&, const PCFun<D>&,                                            \
                               const std::function<Rational(const Rational&, const Rational&)>&);           \
  template Rational inner_product<D>(const PCFun<D>&, const PCFun<D>&);                                     \
  template Rational mean<D>(const PCFun<D>&);                                                               \
  template PCFun<D> project_zero_mean<D>(const PCFun<D>&);                                                  \
  template PCFun<D> axpy<D>(const Rational&, const PCFun<D>&, const PCFun<D>&);                             \
  template Rational l1_norm<D>(const PCFun<D>&);                                                            \
  template Rational sup_norm<D>(const PCFun<D>&);                                                           \
  template PCFun<D> push_pieces<D>(const PCFun<D>&, const std::vector<AffinePiece<D>>&);

HCB_PCFUN_INSTANTIATE(1)
HCB_PCFUN_INSTANTIATE(2)
HCB_PCFUN_INSTANTIATE(3)

#undef HCB_PCFUN_INSTANTIATE

}  // namespace hcb
