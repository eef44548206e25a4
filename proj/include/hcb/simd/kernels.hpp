#pragma once

// Hot loops with a scalar reference and an AVX2 variant chosen at runtime.
// Both variants perform the same floating-point operations in the same order,
// so their results are bit-identical.

#include <cstddef>
#include <string_view>
#include <vector>

#include "hcb/baker_map.hpp"

namespace hcb::simd {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

/// Double-precision branch data for batched orbit stepping.
struct BakerConstants {
  int M = 2;
  std::vector<double> alpha_hi;   // k*a, strip k is xu < alpha_hi[k-1]
  std::vector<double> alpha_lo;   // (k-1)*a
  double a = 0;
  double inv_M = 0;
  std::vector<double> alpha_c_shift;  // (k-1)/M
  double alpha_s_scale = 0;           // 1 - M*b
  double beta_lo = 0;                 // M*a
  double beta_width = 0;              // 1 - M*a
  std::vector<double> beta_edges;     // j/M for j = 1..M-1
  double beta_s_scale = 0;            // b
  std::vector<double> beta_s_shift;   // 1 + b*(k-M-1)

  explicit BakerConstants(const BakerParams& params);
};

struct Kernels {
  Isa isa;

  /// out[i] = left * in[i-1] + right * in[i+1] for i < n, with in[-1] = 0.
  /// Reads in[0..n].
  void (*stencil)(const double* in, double* out, std::size_t n, double left, double right);

  /// Sum of a[i] * b[i] over four interleaved partial sums.
  double (*dot)(const double* a, const double* b, std::size_t n);

  /// One application of f to n points in place. When non-null, du[i] is
  /// added to xu[i] and dc[i] to xc[i] afterwards, modulo 1.
  void (*baker_step)(const BakerConstants& c, double* xu, double* xc, double* xs, std::size_t n,
                     const double* du, const double* dc);
};

bool isa_available(Isa isa);

/// The kernel table for the given instruction set; Scalar when unavailable.
const Kernels& kernels_for(Isa isa);

/// The best available table. Setting HCB_SIMD=scalar forces the reference.
const Kernels& kernels();

namespace detail {
const Kernels& scalar_kernels();
const Kernels* avx2_kernels();
}  // namespace detail

}  // namespace hcb::simd
