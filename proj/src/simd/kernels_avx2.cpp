#include <immintrin.h>

#include "hcb/simd/kernels.hpp"

namespace hcb::simd {

namespace {

void stencil_avx2(const double* in, double* out, std::size_t n, double left, double right) {
  if (n == 0) return;
  out[0] = left * 0.0 + right * in[1];
  const __m256d vl = _mm256_set1_pd(left);
  const __m256d vr = _mm256_set1_pd(right);
  std::size_t i = 1;
  for (; i + 4 <= n; i += 4) {
    const __m256d prev = _mm256_loadu_pd(in + i - 1);
    const __m256d next = _mm256_loadu_pd(in + i + 1);
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_mul_pd(vl, prev), _mm256_mul_pd(vr, next)));
  }
  for (; i < n; ++i) out[i] = left * in[i - 1] + right * in[i + 1];
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s = s + a[i] * b[i];
  return s;
}

void baker_step_avx2(const BakerConstants& c, double* xu, double* xc, double* xs, std::size_t n,
                     const double* du, const double* dc) {
  const int M = c.M;
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d alpha_top = _mm256_set1_pd(c.alpha_hi[M - 1]);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d u = _mm256_loadu_pd(xu + i);
    const __m256d v = _mm256_loadu_pd(xc + i);
    const __m256d w = _mm256_loadu_pd(xs + i);

    // Beta data, then overwritten lane-wise by alpha data.
    __m256d ca = _mm256_set1_pd(-static_cast<double>(M - 1));
    __m256d sa = _mm256_set1_pd(c.beta_s_shift[M - 1]);
    for (int j = M - 2; j >= 0; --j) {
      const __m256d in_strip = _mm256_cmp_pd(v, _mm256_set1_pd(c.beta_edges[j]), _CMP_LT_OQ);
      ca = _mm256_blendv_pd(ca, _mm256_set1_pd(-static_cast<double>(j)), in_strip);
      sa = _mm256_blendv_pd(sa, _mm256_set1_pd(c.beta_s_shift[j]), in_strip);
    }
    __m256d alo = _mm256_set1_pd(c.alpha_lo[M - 1]);
    __m256d aca = _mm256_set1_pd(c.alpha_c_shift[M - 1]);
    for (int j = M - 1; j >= 0; --j) {
      const __m256d in_strip = _mm256_cmp_pd(u, _mm256_set1_pd(c.alpha_hi[j]), _CMP_LT_OQ);
      alo = _mm256_blendv_pd(alo, _mm256_set1_pd(c.alpha_lo[j]), in_strip);
      aca = _mm256_blendv_pd(aca, _mm256_set1_pd(c.alpha_c_shift[j]), in_strip);
    }
    const __m256d is_alpha = _mm256_cmp_pd(u, alpha_top, _CMP_LT_OQ);
    const __m256d lo = _mm256_blendv_pd(_mm256_set1_pd(c.beta_lo), alo, is_alpha);
    const __m256d div = _mm256_blendv_pd(_mm256_set1_pd(c.beta_width), _mm256_set1_pd(c.a), is_alpha);
    const __m256d cm = _mm256_blendv_pd(_mm256_set1_pd(static_cast<double>(M)), _mm256_set1_pd(c.inv_M), is_alpha);
    ca = _mm256_blendv_pd(ca, aca, is_alpha);
    const __m256d sm = _mm256_blendv_pd(_mm256_set1_pd(c.beta_s_scale), _mm256_set1_pd(c.alpha_s_scale), is_alpha);
    sa = _mm256_blendv_pd(sa, zero, is_alpha);

    __m256d nu = _mm256_div_pd(_mm256_sub_pd(u, lo), div);
    __m256d nc = _mm256_add_pd(_mm256_mul_pd(v, cm), ca);
    __m256d ns = _mm256_add_pd(_mm256_mul_pd(w, sm), sa);
    nu = _mm256_min_pd(_mm256_max_pd(nu, zero), one);
    nc = _mm256_min_pd(_mm256_max_pd(nc, zero), one);
    ns = _mm256_min_pd(_mm256_max_pd(ns, zero), one);
    if (du != nullptr) {
      nu = _mm256_add_pd(nu, _mm256_loadu_pd(du + i));
      const __m256d wrap = _mm256_cmp_pd(nu, one, _CMP_GE_OQ);
      nu = _mm256_sub_pd(nu, _mm256_and_pd(wrap, one));
    }
    if (dc != nullptr) {
      nc = _mm256_add_pd(nc, _mm256_loadu_pd(dc + i));
      const __m256d wrap = _mm256_cmp_pd(nc, one, _CMP_GE_OQ);
      nc = _mm256_sub_pd(nc, _mm256_and_pd(wrap, one));
    }
    _mm256_storeu_pd(xu + i, nu);
    _mm256_storeu_pd(xc + i, nc);
    _mm256_storeu_pd(xs + i, ns);
  }
  if (i < n) {
    detail::scalar_kernels().baker_step(c, xu + i, xc + i, xs + i, n - i, du == nullptr ? nullptr : du + i,
                                        dc == nullptr ? nullptr : dc + i);
  }
}

}  // namespace

namespace detail {

const Kernels* avx2_kernels() {
  static const Kernels k{Isa::Avx2, &stencil_avx2, &dot_avx2, &baker_step_avx2};
  return &k;
}

}  // namespace detail

}  // namespace hcb::simd
