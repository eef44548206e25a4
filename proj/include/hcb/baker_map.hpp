#pragma once

// Heterochaos baker maps tau_a, f_a and f_{a,b} for general M >= 2.
//
// Coordinates are (x_u, x_c) on the square and (x_u, x_c, x_s) on the cube.
// Strips are half-open on the right, [(k-1)a, ka), with the last beta
// strip closed at 1, so classification is total on the closed cube.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hcb/rational.hpp"

namespace hcb {

enum class CenterType { MostlyExpanding, MostlyNeutral, MostlyContracting };

std::string center_type_name(CenterType t);

class BakerParams {
 public:
  /// Throws InvalidArgument unless M >= 2 and 0 < a, b < 1/M.
  BakerParams(int M, Rational a, Rational b);

  /// The Lebesgue-preserving map with mostly neutral center, a = b = 1/(2M).
  static BakerParams neutral(int M = 2);

  int M() const { return M_; }
  const Rational& a() const { return a_; }
  const Rational& b() const { return b_; }

  /// a + b == 1/M, decided exactly.
  bool is_measure_preserving() const;
  CenterType center_type() const;

  /// Fraction of time spent in the alpha strips, w = Ma.
  Rational alpha_weight() const { return Rational(M_) * a_; }

 private:
  int M_;
  Rational a_;
  Rational b_;
};

enum class SymbolKind { Alpha, Beta };

struct Symbol {
  SymbolKind kind;
  int k;  // 1..M

  bool operator==(const Symbol&) const = default;
};

std::string symbol_name(const Symbol& s);

template <class T>
struct Point2 {
  T xu;
  T xc;
  bool operator==(const Point2&) const = default;
};

template <class T>
struct Point3 {
  T xu;
  T xc;
  T xs;
  bool operator==(const Point3&) const = default;
};

/// Axis-aligned box [lo, hi] in the cube; used for the domains Omega_gamma
/// and their images.
struct Box3 {
  std::array<Rational, 3> lo;
  std::array<Rational, 3> hi;
  Rational volume() const;
};

/// Per-branch affine data: f(x) = scale * x + shift on the domain box.
struct Branch {
  Symbol symbol;
  Box3 domain;
  std::array<Rational, 3> scale;
  std::array<Rational, 3> shift;
  Box3 image() const;
};

/// All 2M branches of f_{a,b} in the order alpha_1..alpha_M, beta_1..beta_M.
std::vector<Branch> branches(const BakerParams& params);

/// Diagonal of the linear part on the given region: (u, c, s) factors.
std::array<Rational, 3> linear_part(const BakerParams& params, const Symbol& s);

template <class T>
Symbol classify(const BakerParams& params, const Point3<T>& p);

template <class T>
Symbol classify2(const BakerParams& params, const Point2<T>& p);

template <class T>
T apply_tau(const BakerParams& params, const T& xu);

template <class T>
Point2<T> apply_f2(const BakerParams& params, const Point2<T>& p);

template <class T>
Point3<T> apply_f3(const BakerParams& params, const Point3<T>& p);

/// Preimage under f_{a,b}. Throws BoundaryPoint when p sits on an interior
/// seam between image cells; those form a null set.
template <class T>
Point3<T> apply_f3_inverse(const BakerParams& params, const Point3<T>& p);

/// [p, f(p), ..., f^n(p)]. Floating orbits clamp coordinates into [0, 1].
template <class T>
std::vector<Point3<T>> orbit(const BakerParams& params, const Point3<T>& p, long n);

/// Size of the x_u offset added per step by dithered floating orbits.
inline constexpr double kDitherScale = 0x1.0p-40;

/// Fraction of the first n steps spent in the alpha strips.
///
/// A plain double orbit of an expanding map exhausts its mantissa after a few
/// dozen steps and then sits on the fixed point at 0. When dither_seed is set,
/// each step adds a tiny counter-based uniform offset to x_u modulo 1, which
/// keeps the itinerary distributed as for Lebesgue-typical points.
double itinerary_stats(const BakerParams& params, const Point3<double>& p, long n,
                       std::optional<std::uint64_t> dither_seed = std::nullopt);

/// Exact check of how the images f(Omega_gamma) sit in the cube.
struct TilingReport {
  bool disjoint_interiors = false;
  Rational total_image_volume;
  bool covers_cube = false;
  bool unit_jacobians = false;  // vol f(Omega) == vol Omega for every branch
  bool preserves_lebesgue() const { return disjoint_interiors && covers_cube && unit_jacobians; }
};

TilingReport tiling_report(const BakerParams& params);

}  // namespace hcb
