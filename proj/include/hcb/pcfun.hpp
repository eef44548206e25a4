#pragma once

// Exact piecewise-constant functions on [0,1]^D over product grids.
//
// Axis d carries strictly increasing breakpoints 0 = b_0 < ... < b_m = 1 and
// cells [b_i, b_{i+1}); the last cell is closed at 1. Values are stored flat in
// row-major order with axis 0 slowest.

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "hcb/rational.hpp"

namespace hcb {

template <std::size_t D>
class PCFun {
 public:
  using Breaks = std::vector<Rational>;
  using Grid = std::array<Breaks, D>;
  using Index = std::array<std::size_t, D>;
  using Coord = std::array<Rational, D>;

  /// The zero function on a single cell.
  PCFun();

  /// Throws InvalidArgument on malformed breakpoints and DimensionMismatch
  /// when the value count does not match the grid.
  PCFun(Grid breaks, std::vector<Rational> values);

  /// One-dimensional convenience form.
  PCFun(Breaks breaks, std::vector<Rational> values)
    requires(D == 1)
      : PCFun(Grid{std::move(breaks)}, std::move(values)) {}

  static PCFun constant(const Rational& c);

  const Breaks& breaks(std::size_t axis = 0) const { return breaks_[axis]; }
  const Grid& grid() const { return breaks_; }
  const std::vector<Rational>& values() const { return values_; }
  std::size_t cells(std::size_t axis = 0) const { return breaks_[axis].size() - 1; }
  std::size_t cell_count() const { return values_.size(); }

  const Rational& at(const Index& idx) const { return values_[flat(idx)]; }
  std::size_t flat(const Index& idx) const;

  /// Right-continuous point evaluation; points outside the cube give 0.
  Rational value_at(const Coord& x) const;
  double value_at(const std::array<double, D>& x) const;

  /// Same function with the extra breakpoints inserted. Points outside
  /// [0,1] are ignored.
  PCFun refine(const Grid& extra) const;
  PCFun refine(const Breaks& extra) const
    requires(D == 1)
  {
    return refine(Grid{extra});
  }

  /// Same function on the coarsest product grid that represents it.
  PCFun simplify() const;

  /// Values resampled on a grid that refines this function's grid.
  std::vector<Rational> resample(const Grid& finer) const;

  Rational integral() const;

  PCFun& operator+=(const PCFun& g);
  PCFun& operator-=(const PCFun& g);
  PCFun& operator*=(const Rational& s);

  /// Functional equality, independent of the representation.
  bool operator==(const PCFun& g) const;

 private:
  Grid breaks_;
  std::vector<Rational> values_;
};

using PCFun1D = PCFun<1>;
using PCFun2D = PCFun<2>;
using PCFun3D = PCFun<3>;

/// Per-axis union of two grids.
template <std::size_t D>
typename PCFun<D>::Grid common_grid(const typename PCFun<D>::Grid& a, const typename PCFun<D>::Grid& b);

/// Applies op cell by cell on the common refinement.
template <std::size_t D>
PCFun<D> combine(const PCFun<D>& f, const PCFun<D>& g,
                 const std::function<Rational(const Rational&, const Rational&)>& op);

template <std::size_t D>
Rational inner_product(const PCFun<D>& f, const PCFun<D>& g);

template <std::size_t D>
Rational mean(const PCFun<D>& f);

template <std::size_t D>
PCFun<D> project_zero_mean(const PCFun<D>& f);

/// s * f + g.
template <std::size_t D>
PCFun<D> axpy(const Rational& s, const PCFun<D>& f, const PCFun<D>& g);

template <std::size_t D>
PCFun<D> operator+(PCFun<D> f, const PCFun<D>& g) {
  f += g;
  return f;
}

template <std::size_t D>
PCFun<D> operator-(PCFun<D> f, const PCFun<D>& g) {
  f -= g;
  return f;
}

template <std::size_t D>
PCFun<D> operator*(const Rational& s, PCFun<D> f) {
  f *= s;
  return f;
}

template <std::size_t D>
Rational l1_norm(const PCFun<D>& f);

template <std::size_t D>
Rational sup_norm(const PCFun<D>& f);

/// A diagonal affine piece of a pushforward: the source box [lo, hi] is
/// carried by y_d = scale_d * x_d + shift_d (scale_d > 0) and the values are
/// multiplied by weight. F is taken to be 0 outside the unit cube and image
/// points outside the cube are discarded.
template <std::size_t D>
struct AffinePiece {
  std::array<Rational, D> lo;
  std::array<Rational, D> hi;
  std::array<Rational, D> scale;
  std::array<Rational, D> shift;
  Rational weight{1};
};

/// G(y) = sum over pieces of weight * F(g^{-1} y) on g([lo, hi]).
template <std::size_t D>
PCFun<D> push_pieces(const PCFun<D>& F, const std::vector<AffinePiece<D>>& pieces);

/// Cell averages of x -> slope * x + intercept on the uniform base^level grid.
PCFun1D from_affine(const Rational& slope, const Rational& intercept, unsigned level, unsigned base = 2);

/// Uniform grid 0, 1/n, ..., 1.
std::vector<Rational> uniform_breaks(std::size_t n);

/// True when f is constant on every cell of the M-adic partition of depth level.
bool is_m_adic_measurable(const PCFun1D& f, unsigned M, unsigned level);

/// max over cells I of depth level-1 of (sup_I f - inf_I f). Requires level >= 1
/// and throws NotInK unless f is measurable at depth level.
Rational osc_norm_star(const PCFun1D& f, unsigned M, unsigned level);

/// f is measurable at depth level and, inside each cell of depth level-1,
/// its values on the M subcells strictly increase.
bool is_xi_strictly_increasing(const PCFun1D& f, unsigned M, unsigned level);

}  // namespace hcb
