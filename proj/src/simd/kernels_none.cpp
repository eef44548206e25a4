#include "hcb/simd/kernels.hpp"

namespace hcb::simd::detail {

const Kernels* avx2_kernels() { return nullptr; }

}  // namespace hcb::simd::detail
