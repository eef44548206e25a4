#include <algorithm>
#include <cstdlib>
#include <string>

#include "hcb/simd/kernels.hpp"

namespace hcb::simd {

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

BakerConstants::BakerConstants(const BakerParams& params) : M(params.M()) {
  const Rational& ra = params.a();
  const Rational& rb = params.b();
  a = ra.get_d();
  inv_M = Rational(1, M).get_d();
  for (int k = 1; k <= M; ++k) {
    alpha_hi.push_back(Rational(Rational(k) * ra).get_d());
    alpha_lo.push_back(Rational(Rational(k - 1) * ra).get_d());
    Rational off(k - 1, M);
    off.canonicalize();
    alpha_c_shift.push_back(off.get_d());
    beta_s_shift.push_back(Rational(Rational(1) + rb * Rational(k - M - 1)).get_d());
  }
  for (int j = 1; j < M; ++j) {
    Rational edge(j, M);
    edge.canonicalize();
    beta_edges.push_back(edge.get_d());
  }
  alpha_s_scale = Rational(Rational(1) - Rational(M) * rb).get_d();
  beta_lo = Rational(Rational(M) * ra).get_d();
  beta_width = Rational(Rational(1) - Rational(M) * ra).get_d();
  beta_s_scale = rb.get_d();
}

namespace {

double unit(double x) { return std::min(std::max(x, 0.0), 1.0); }

void stencil_scalar(const double* in, double* out, std::size_t n, double left, double right) {
  for (std::size_t i = 0; i < n; ++i) {
    const double prev = i == 0 ? 0.0 : in[i - 1];
    out[i] = left * prev + right * in[i + 1];
  }
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (std::size_t j = 0; j < 4; ++j) acc[j] = acc[j] + a[i + j] * b[i + j];
  }
  double s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (; i < n; ++i) s = s + a[i] * b[i];
  return s;
}

void baker_step_scalar(const BakerConstants& c, double* xu, double* xc, double* xs, std::size_t n,
                       const double* du, const double* dc) {
  const int M = c.M;
  for (std::size_t i = 0; i < n; ++i) {
    double lo, div, cm, ca, sm, sa;
    if (xu[i] < c.alpha_hi[M - 1]) {
      int k = M - 1;
      for (int j = M - 1; j >= 0; --j) {
        if (xu[i] < c.alpha_hi[j]) k = j;
      }
      lo = c.alpha_lo[k];
      div = c.a;
      cm = c.inv_M;
      ca = c.alpha_c_shift[k];
      sm = c.alpha_s_scale;
      sa = 0.0;
    } else {
      int k = M - 1;
      for (int j = M - 2; j >= 0; --j) {
        if (xc[i] < c.beta_edges[j]) k = j;
      }
      lo = c.beta_lo;
      div = c.beta_width;
      cm = static_cast<double>(M);
      ca = -static_cast<double>(k);
      sm = c.beta_s_scale;
      sa = c.beta_s_shift[k];
    }
    xu[i] = unit((xu[i] - lo) / div);
    xc[i] = unit(xc[i] * cm + ca);
    xs[i] = unit(xs[i] * sm + sa);
    if (du != nullptr) {
      xu[i] = xu[i] + du[i];
      if (xu[i] >= 1.0) xu[i] = xu[i] - 1.0;
    }
    if (dc != nullptr) {
      xc[i] = xc[i] + dc[i];
      if (xc[i] >= 1.0) xc[i] = xc[i] - 1.0;
    }
  }
}

}  // namespace

namespace detail {

const Kernels& scalar_kernels() {
  static const Kernels k{Isa::Scalar, &stencil_scalar, &dot_scalar, &baker_step_scalar};
  return k;
}

}  // namespace detail

bool isa_available(Isa isa) {
  if (isa == Isa::Scalar) return true;
#if defined(__x86_64__) || defined(__i386__)
  return detail::avx2_kernels() != nullptr && __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const Kernels& kernels_for(Isa isa) {
  if (isa == Isa::Avx2 && isa_available(Isa::Avx2)) return *detail::avx2_kernels();
  return detail::scalar_kernels();
}

const Kernels& kernels() {
  static const Kernels& chosen = [] () -> const Kernels& {
    const char* env = std::getenv("HCB_SIMD");
    if (env != nullptr && std::string(env) == "scalar") return detail::scalar_kernels();
    return kernels_for(Isa::Avx2);
  }();
  return chosen;
}

}  // namespace hcb::simd
